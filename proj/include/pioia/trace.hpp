// Per-iteration run log and its CSV form.

#ifndef PIOIA_TRACE_HPP_
#define PIOIA_TRACE_HPP_

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace pioia {

struct TraceRow {
  int iter = 0;
  std::string stage;  // lp | ig | oia
  double wall_time_s = 0.0;
  double lb = 0.0;
  double ub = 0.0;
  double gap = 0.0;
  std::size_t soc_cuts = 0;
  std::size_t cap_cuts = 0;
  std::size_t benders_cuts = 0;
  std::size_t n_binary = 0;
  double mip_gap = 0.0;
  double solver_limit = 0.0;
  std::string status;
};

inline constexpr const char* kTraceHeader =
    "iter,stage,wall_time_s,lb,ub,gap,soc_cuts,cap_cuts,benders_cuts,n_binary,mip_gap,solver_limit,status";

class RunTrace {
 public:
  // Nudges wall_time_s up so the column is strictly increasing.
  void add(TraceRow row);
  const std::vector<TraceRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;

 private:
  std::vector<TraceRow> rows_;
};

// Shortest decimal that reads back to the same double; "inf" / "-inf".
std::string format_number(double v);

}  // namespace pioia

#endif  // PIOIA_TRACE_HPP_
