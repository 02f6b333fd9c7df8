// LP-based branch-and-bound over a DenseSimplex.
//
// Depth-first dives from every processed node, best-bound selection when a
// dive ends. Queued siblings carry a tableau snapshot of their parent while
// the snapshot budget lasts; otherwise they restart from the root tableau
// with the dual simplex.

#ifndef PIOIA_BRANCH_AND_BOUND_HPP_
#define PIOIA_BRANCH_AND_BOUND_HPP_

#include <chrono>
#include <cstddef>
#include <optional>
#include <vector>

#include "pioia/simplex.hpp"
#include "pioia/solver.hpp"

namespace pioia {

struct MipOptions {
  double relative_gap = 0.0;
  std::chrono::steady_clock::time_point deadline =
      std::chrono::steady_clock::time_point::max();
  double integrality_tolerance = 1e-6;
  long node_limit = 1000000;
  std::size_t snapshot_bytes = std::size_t{256} << 20;
  // Known feasible point (same column space as the LpProblem).
  std::optional<std::vector<double>> incumbent;
  double incumbent_objective = kInf;
};

struct MipResult {
  SolveStatus status = SolveStatus::kNumericError;
  std::vector<double> x;
  double objective = kInf;
  double bound = -kInf;
  long nodes = 0;
  long lp_iterations = 0;
};

MipResult branch_and_bound(const LpProblem& lp,
                           const std::vector<int>& integer_cols,
                           const MipOptions& options);

}  // namespace pioia

#endif  // PIOIA_BRANCH_AND_BOUND_HPP_
