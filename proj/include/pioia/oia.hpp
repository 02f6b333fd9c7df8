// Alternating outer-inner approximation: outer MILP over the cut pool gives
// LB, inner SOCP at the outer commitment gives UB, cuts tighten the outer
// model, MIP gap and time limit adapt between rounds.

#ifndef PIOIA_OIA_HPP_
#define PIOIA_OIA_HPP_

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pioia/cuts.hpp"
#include "pioia/formulation.hpp"
#include "pioia/solver.hpp"
#include "pioia/trace.hpp"

namespace pioia {

struct AlgoParams {
  double eps = 1e-4;             // relative gap for convergence
  double abs_gap = 1e-6;         // also converged once UB - LB is this small
  double eps_tol = 1e-5;         // violation / activity tolerance
  double eps_par = 5e-6;         // parallel-cut tolerance
  double p_cut = 0.55;           // share of violated constraints cut per family
  double mip_gap_init = 0.01;
  double solver_time_init = 200.0;
  double eps_lp = 0.05;
  double eps_ig = 0.01;
  int k_ig = 0;                  // 0: ceil(|G| / 4)
  int max_iter = 200;            // per stage
  double time_budget = 3600.0;   // whole run, seconds
  double gap_shrink = 0.9;
  double gap_quarter = 4.0;
  double time_growth = 1.1;
  double delta_tol = 1e-3;       // accepted, unused
  SocCutNorm soc_norm = SocCutNorm::kSupporting;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

enum class Termination { kNone, kConverged, kMaxIter, kTimeBudget, kStalled };
const char* to_string(Termination t);

struct Incumbent {
  CommitmentSchedule schedule;
  std::vector<double> primal;  // inner solution, ids of VariableIndex(inst, false)
  double objective = kInf;
};

struct SolverState {
  explicit SolverState(double eps_par = 5e-6) : pool(eps_par) {}

  CutPool pool;
  std::vector<int> binary_ids;  // current integrality set B
  double ub = kInf;
  double lb = -kInf;
  std::optional<Incumbent> incumbent;
  RunTrace trace;
  int iteration = 0;            // across stages
  int oia_iterations = 0;
  std::vector<std::string> events;
  Termination termination = Termination::kNone;
  // Worst pooled-cut violation of any warm start handed to the MILP.
  double max_warm_start_cut_violation = 0.0;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  double elapsed() const;
};

struct RunOptions {
  bool epigraph = false;  // outer model carries psi_t
  bool benders = false;   // time-block cuts after each inner solve
};

// delta' = max(min(shrink * delta, (UB - LB) / (quarter * UB)), eps / 10),
// t' = growth * t. delta is left alone when UB is not finite and positive.
std::pair<double, double> update_controls(double mip_gap, double solver_time, double ub,
                                          double lb, const AlgoParams& params);

// (line, dir, t) with p^2 + q^2 - S^2 >= -eps_tol at x.
std::set<LineKey> active_capacity_keys(const UcInstance& inst, const VariableIndex& ix,
                                       const std::vector<double>& x, double eps_tol);

// Outer model: base rows, every pooled cut, integrality restricted to B.
ModelSpec assemble_outer(const ModelSpec& base, const CutPool& pool,
                         const std::vector<int>& binary_ids, const VariableIndex& ix);

// Cuts at x for the p_cut most violated rotated-cone rows. Returns the
// number added to the pool.
std::size_t add_soc_cuts(const UcInstance& inst, const VariableIndex& ix,
                         const std::vector<double>& x, const AlgoParams& params,
                         CutPool* pool, int iteration, const std::string& stage);

// Capacity cuts at x restricted to `keys`.
std::size_t add_cap_cuts(const UcInstance& inst, const VariableIndex& ix,
                         const std::vector<double>& x, const std::set<LineKey>& keys,
                         const AlgoParams& params, CutPool* pool, int iteration,
                         const std::string& stage);

// Outer-model point for an inner solution: psi_t (if present) set to the
// period's dispatch and penalty cost.
std::vector<double> lift_to_outer(const UcInstance& inst, const VariableIndex& ix,
                                  const std::vector<double>& inner_x);

// Converged: relative gap <= eps, or UB - LB <= abs_gap (near-zero optima).
bool converged(double ub, double lb, const AlgoParams& params);

// Runs the loop until convergence, max_iter rounds, the time
// budget, or a stall (no new cuts with the MIP gap already at its floor).
// Sets B to every commitment id. Throws std::runtime_error if the outer model
// is infeasible.
void run_oia(SolverState& state, const UcInstance& inst, FormulationVariant variant,
             const AlgoParams& params, SolverBackend& backend, const RunOptions& options = {});

}  // namespace pioia

#endif  // PIOIA_OIA_HPP_
