// Time-block Benders cuts on the epigraph variables psi_t.
//
// psi_t(p) = min  sum_g C^V p_g + C^P (slacks at t)
//            s.t. flow definitions, balances, cones, slack bounds of period t,
//                 q_g in [q_min, q_max], p_g = p_anchor_g (coupling rows).
// No commitment or reserve rows: the function is convex in p alone, so the
// cut psi_t >= psi* + pi^T (p - p*) is globally valid.

#ifndef PIOIA_BENDERS_HPP_
#define PIOIA_BENDERS_HPP_

#include <string>
#include <vector>

#include "pioia/cuts.hpp"
#include "pioia/formulation.hpp"
#include "pioia/solver.hpp"

namespace pioia {

struct TimeBlockDual {
  int t = 0;
  bool ok = false;            // false: no cut for this period
  std::string message;
  double psi_star = 0.0;
  std::vector<double> pi_star;   // per generator
  std::vector<double> p_anchor;  // per generator
};

// The single-period subproblem. `p_ids` receives the generator output ids.
ModelSpec build_time_block(const UcInstance& inst, FormulationVariant variant, int t,
                           const std::vector<double>& p_anchor, std::vector<int>* p_ids = nullptr);

// Throws std::invalid_argument for F1 (no slacks, subproblem may be
// infeasible) or a wrongly sized anchor.
TimeBlockDual solve_time_block(const UcInstance& inst, FormulationVariant variant, int t,
                               const std::vector<double>& p_anchor, SolverBackend& backend);

// psi_t >= psi* + pi^T (p - p*) over the outer model's ids.
Cut benders_cut(const TimeBlockDual& dual, const VariableIndex& outer_index,
                int iteration = 0, const std::string& stage = "oia");

// Value of the cut's right-hand side  psi* + pi^T (p - p*)  at p.
double benders_cut_value(const TimeBlockDual& dual, const std::vector<double>& p);

}  // namespace pioia

#endif  // PIOIA_BENDERS_HPP_
