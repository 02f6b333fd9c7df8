// Uniform solve contract for ModelSpecs.
//
// Two backends implement it:
//   "ipm"       LP and MILP through the dense simplex / branch-and-bound,
//               cone-constrained continuous models through the primal-dual
//               interior-point method (conic_ipm.hpp).
//   "reference" the same LP / MILP engine; cone-constrained models through a
//               simplex cutting-plane loop on supporting hyperplanes of each
//               cone. Slow, but shares no code with the interior-point path,
//               which makes it the cross-check for conic results.
//
// Row duals follow one convention everywhere: dual[i] is the derivative of
// the optimal objective with respect to rows[i].rhs.

#ifndef PIOIA_SOLVER_HPP_
#define PIOIA_SOLVER_HPP_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pioia/model_spec.hpp"

namespace pioia {

enum class SolveStatus {
  kOptimal,
  kGapReached,
  kTimeLimit,
  kInfeasible,
  kUnbounded,
  kNumericError,
};

const char* to_string(SolveStatus status);

struct SolveControls {
  double mip_gap = 0.0;          // relative gap target
  double time_limit = 1e9;       // seconds
  std::optional<std::vector<double>> warm_start;
  int threads = 1;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::kNumericError;
  std::vector<double> primal;
  double objective = kInf;
  double dual_bound = -kInf;
  std::vector<double> duals;  // continuous solves only
  std::vector<std::string> warnings;
  std::string message;
  long nodes = 0;
  long iterations = 0;

  bool has_solution() const { return !primal.empty(); }
};

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  // Ignores integrality flags: callers wanting the LP relaxation pass the
  // spec as is.
  virtual SolveOutcome solve_continuous(const ModelSpec& spec) = 0;
  // Outer (cone-free) models only. Throws std::invalid_argument on cones.
  virtual SolveOutcome solve_mixed(const ModelSpec& spec,
                                   const SolveControls& controls) = 0;
};

// "ipm" or "reference". Throws std::invalid_argument on unknown names.
std::unique_ptr<SolverBackend> make_backend(std::string_view name);
// PIOIA_BACKEND if set, otherwise "ipm".
std::string default_backend_name();

// Returns a copy of `spec` whose integrality set is exactly `binary_ids`.
// Every id must belong to `allowed_ids` (the commitment partition).
ModelSpec restrict_integrality(const ModelSpec& spec,
                               const std::vector<int>& binary_ids,
                               const std::vector<int>& allowed_ids);

}  // namespace pioia

#endif  // PIOIA_SOLVER_HPP_
