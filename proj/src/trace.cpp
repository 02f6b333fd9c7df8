#include "pioia/trace.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace pioia {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) {
      // keep moderate magnitudes out of exponent form: 220, not 2.2e+02
      const double a = std::abs(v);
      if (a >= 1.0 && a < 1e16) {
        const int digits = static_cast<int>(std::floor(std::log10(a))) + 1;
        if (digits > prec) std::snprintf(buf, sizeof buf, "%.*g", digits, v);
      }
      break;
    }
  }
  return buf;
}

void RunTrace::add(TraceRow row) {
  if (!rows_.empty() && !(row.wall_time_s > rows_.back().wall_time_s)) {
    const double prev = rows_.back().wall_time_s;
    row.wall_time_s = prev + std::max(1e-9, std::abs(prev) * 1e-12);
  }
  rows_.push_back(std::move(row));
}

void RunTrace::write_csv(std::ostream& out) const {
  out << kTraceHeader << "\n";
  for (const auto& r : rows_) {
    out << r.iter << ',' << r.stage << ',' << format_number(r.wall_time_s) << ','
        << format_number(r.lb) << ',' << format_number(r.ub) << ',' << format_number(r.gap) << ','
        << r.soc_cuts << ',' << r.cap_cuts << ',' << r.benders_cuts << ',' << r.n_binary << ','
        << format_number(r.mip_gap) << ',' << format_number(r.solver_limit) << ',' << r.status
        << "\n";
  }
}

void RunTrace::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace " + path);
  write_csv(out);
}

}  // namespace pioia
