#include "pioia/oia.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pioia/benders.hpp"
#include "pioia/metrics.hpp"

namespace pioia {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("parameter ") + what);
}

// Decimal factors applied as integer ratios, so 200 * 1.1 gives 220 rather
// than the double one ulp above it.
double scale(double v, double factor) {
  const double num = std::round(factor * 1e6);
  if (std::abs(num - factor * 1e6) < 1e-6) return v * num / 1e6;
  return v * factor;
}

std::size_t add_benders_cuts(const UcInstance& inst, FormulationVariant variant,
                             const VariableIndex& ix, const std::vector<double>& inner_x,
                             SolverBackend& backend, SolverState& state) {
  const VariableIndex inner_ix(inst, false);
  std::size_t added = 0;
  for (int t = 0; t < inst.horizon; ++t) {
    std::vector<double> anchor;
    for (int g = 0; g < inner_ix.num_gens(); ++g) anchor.push_back(inner_x[inner_ix.p(g, t)]);
    const TimeBlockDual d = solve_time_block(inst, variant, t, anchor, backend);
    if (!d.ok) {
      state.events.push_back("iteration " + std::to_string(state.iteration) +
                             ": no Benders cut for t=" + std::to_string(t + 1) + " (" + d.message + ")");
      continue;
    }
    if (state.pool.try_add(benders_cut(d, ix, state.iteration, "oia"))) ++added;
  }
  return added;
}

}  // namespace

void AlgoParams::validate() const {
  require(eps > 0 && eps < 1, "eps must lie in (0, 1)");
  require(abs_gap >= 0, "abs_gap must be nonnegative");
  require(eps_tol > 0, "eps_tol must be positive");
  require(eps_par > 0 && eps_par < 1, "eps_par must lie in (0, 1)");
  require(p_cut > 0 && p_cut <= 1, "p_cut must lie in (0, 1]");
  require(mip_gap_init > 0, "mip_gap_init must be positive");
  require(solver_time_init > 0, "solver_time_init must be positive");
  require(eps_lp > 0, "eps_lp must be positive");
  require(eps_ig > 0, "eps_ig must be positive");
  require(k_ig >= 0, "k_ig must be nonnegative (0 = automatic)");
  require(max_iter > 0, "max_iter must be positive");
  require(time_budget > 0, "time_budget must be positive");
  require(gap_shrink > 0 && gap_shrink <= 1, "gap_shrink must lie in (0, 1]");
  require(gap_quarter > 0, "gap_quarter must be positive");
  require(time_growth >= 1, "time_growth must be at least 1");
  require(delta_tol > 0, "delta_tol must be positive");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kNone: return "none";
    case Termination::kConverged: return "converged";
    case Termination::kMaxIter: return "max_iter";
    case Termination::kTimeBudget: return "time_budget";
    case Termination::kStalled: return "stalled";
  }
  return "?";
}

double SolverState::elapsed() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::pair<double, double> update_controls(double mip_gap, double solver_time, double ub,
                                          double lb, const AlgoParams& params) {
  double next = mip_gap;
  if (std::isfinite(ub) && ub > 0) {
    next = std::min(scale(mip_gap, params.gap_shrink), (ub - lb) / (params.gap_quarter * ub));
    next = std::max(next, params.eps / 10);
  }
  return {next, scale(solver_time, params.time_growth)};
}

bool converged(double ub, double lb, const AlgoParams& params) {
  if (!std::isfinite(ub)) return false;
  return gap(ub, lb) <= params.eps || ub - lb <= params.abs_gap;
}

std::set<LineKey> active_capacity_keys(const UcInstance& inst, const VariableIndex& ix,
                                       const std::vector<double>& x, double eps_tol) {
  std::set<LineKey> keys;
  for (const auto& r : cap_residuals(inst, ix, x)) {
    if (r.value >= -eps_tol) keys.insert(r.key);
  }
  return keys;
}

ModelSpec assemble_outer(const ModelSpec& base, const CutPool& pool,
                         const std::vector<int>& binary_ids, const VariableIndex& ix) {
  ModelSpec spec = restrict_integrality(base, binary_ids, ix.commitment_ids());
  pool.append_rows(&spec);
  return spec;
}

std::size_t add_soc_cuts(const UcInstance& inst, const VariableIndex& ix,
                         const std::vector<double>& x, const AlgoParams& params,
                         CutPool* pool, int iteration, const std::string& stage) {
  std::size_t added = 0;
  for (const LineKey& key : select_violated(soc_residuals(inst, ix, x), params.eps_tol, params.p_cut)) {
    const Line& line = inst.lines[key.line];
    const int a = inst.bus_index(line.from), b = inst.bus_index(line.to);
    const SocIds ids{ix.cline(key.line, key.t), ix.sline(key.line, key.t), ix.cbus(a, key.t),
                     ix.cbus(b, key.t)};
    const Cut cut = soc_cut(ids, x[ids.c_nm], x[ids.s_nm], x[ids.c_nn], x[ids.c_mm],
                            params.soc_norm, {key, iteration, stage});
    if (pool->try_add(cut)) ++added;
  }
  return added;
}

std::size_t add_cap_cuts(const UcInstance& inst, const VariableIndex& ix,
                         const std::vector<double>& x, const std::set<LineKey>& keys,
                         const AlgoParams& params, CutPool* pool, int iteration,
                         const std::string& stage) {
  std::vector<KeyedResidual> candidates;
  for (const auto& r : cap_residuals(inst, ix, x)) {
    if (keys.count(r.key)) candidates.push_back(r);
  }
  std::size_t added = 0;
  for (const LineKey& key : select_violated(candidates, params.eps_tol, params.p_cut)) {
    const int p = ix.pf(key.line, key.dir, key.t), q = ix.qf(key.line, key.dir, key.t);
    const Cut cut = line_capacity_cut(p, q, x[p], x[q], inst.lines[key.line].s_max,
                                      {key, iteration, stage});
    if (pool->try_add(cut)) ++added;
  }
  return added;
}

std::vector<double> lift_to_outer(const UcInstance& inst, const VariableIndex& ix,
                                  const std::vector<double>& inner_x) {
  std::vector<double> x = inner_x;
  x.resize(ix.num_vars(), 0.0);
  if (!ix.epigraph()) return x;
  const double cp = inst.penalty_cost();
  for (int t = 0; t < inst.horizon; ++t) {
    double v = 0.0;
    for (int g = 0; g < ix.num_gens(); ++g) v += inst.generators[g].cost_variable * x[ix.p(g, t)];
    for (int n = 0; n < ix.num_buses(); ++n) {
      v += cp * (x[ix.pu(n, t)] + x[ix.qu(n, t)] + x[ix.po(n, t)] + x[ix.qo(n, t)]);
    }
    x[ix.psi(t)] = v;
  }
  return x;
}

void run_oia(SolverState& state, const UcInstance& inst, FormulationVariant variant,
             const AlgoParams& params, SolverBackend& backend, const RunOptions& options) {
  params.validate();
  if (options.benders && !options.epigraph) {
    throw std::invalid_argument("Benders cuts need the epigraph outer model");
  }
  if (options.benders && variant == FormulationVariant::kF1) {
    throw std::invalid_argument("method m4 (Benders cuts) is not available with variant f1: "
                                "time-block subproblems need load slacks");
  }
  const VariableIndex ix(inst, options.epigraph);
  const VariableIndex inner_ix(inst, false);
  const ModelSpec base = build_outer_base(inst, variant, options.epigraph);
  state.binary_ids = ix.commitment_ids();
  std::set<LineKey> all_keys;
  for (const auto& r : cap_residuals(inst, inner_ix, std::vector<double>(inner_ix.num_vars(), 0.0))) {
    all_keys.insert(r.key);
  }

  double delta = params.mip_gap_init;
  double tsolve = params.solver_time_init;
  state.termination = Termination::kNone;
  for (int k = 0;; ++k) {
    if (k >= params.max_iter) {
      state.termination = Termination::kMaxIter;
      break;
    }
    const double remaining = params.time_budget - state.elapsed();
    if (remaining <= 0) {
      state.termination = Termination::kTimeBudget;
      break;
    }
    const ModelSpec outer = assemble_outer(base, state.pool, state.binary_ids, ix);
    SolveControls controls;
    controls.mip_gap = delta;
    controls.time_limit = std::min(tsolve, remaining);
    if (state.incumbent) {
      std::vector<double> ws = lift_to_outer(inst, ix, state.incumbent->primal);
      state.max_warm_start_cut_violation =
          std::max(state.max_warm_start_cut_violation, state.pool.max_violation(ws));
      controls.warm_start = std::move(ws);
    }
    const SolveOutcome out = backend.solve_mixed(outer, controls);
    ++state.iteration;
    ++state.oia_iterations;
    if (out.status == SolveStatus::kInfeasible || out.status == SolveStatus::kUnbounded) {
      throw std::runtime_error(std::string("outer model ") + to_string(out.status) +
                               " at iteration " + std::to_string(state.iteration) +
                               (variant == FormulationVariant::kF1
                                    ? " (variant f1 has no load slacks; try f2)"
                                    : ""));
    }
    for (const auto& w : out.warnings) {
      state.events.push_back("iteration " + std::to_string(state.iteration) + ": " + w);
    }
    if (std::isfinite(out.dual_bound)) state.lb = std::max(state.lb, out.dual_bound);

    std::string inner_status = "none";
    std::size_t added = 0;
    if (out.has_solution()) {
      const CommitmentSchedule xhat = schedule_from_values(inst, ix, out.primal);
      std::set<LineKey> active;
      const SolveOutcome inner = backend.solve_continuous(build_inner(inst, xhat, variant));
      inner_status = to_string(inner.status);
      if (inner.status == SolveStatus::kOptimal) {
        if (inner.objective < state.ub) {
          state.ub = inner.objective;
          state.incumbent = Incumbent{xhat, inner.primal, inner.objective};
        }
        active = active_capacity_keys(inst, inner_ix, inner.primal, params.eps_tol);
        if (options.benders) added += add_benders_cuts(inst, variant, ix, inner.primal, backend, state);
      } else {
        // No inner point to define an active set: every line is a candidate.
        active = all_keys;
        state.events.push_back("iteration " + std::to_string(state.iteration) + ": inner solve " +
                               inner_status + ", UB not updated");
      }
      added += add_soc_cuts(inst, ix, out.primal, params, &state.pool, state.iteration, "oia");
      added += add_cap_cuts(inst, ix, out.primal, active, params, &state.pool, state.iteration, "oia");
      if (added == 0 && !converged(state.ub, state.lb, params) && active.size() < all_keys.size()) {
        const std::size_t extra =
            add_cap_cuts(inst, ix, out.primal, all_keys, params, &state.pool, state.iteration, "oia");
        if (extra > 0) {
          state.events.push_back("iteration " + std::to_string(state.iteration) +
                                 ": active set exhausted, capacity cuts taken from all lines");
        }
        added += extra;
      }
    } else {
      state.events.push_back("iteration " + std::to_string(state.iteration) +
                             ": outer solve returned no solution (" + to_string(out.status) + ")");
    }
    if (std::isfinite(state.ub) && state.lb > state.ub + 1e-6 * std::max(1.0, std::abs(state.ub))) {
      state.events.push_back("iteration " + std::to_string(state.iteration) + ": LB exceeds UB by " +
                             format_number(state.lb - state.ub));
    }

    TraceRow row;
    row.iter = state.iteration;
    row.stage = "oia";
    row.wall_time_s = state.elapsed();
    row.lb = state.lb;
    row.ub = state.ub;
    row.gap = gap(state.ub, state.lb);
    row.soc_cuts = state.pool.count(CutKind::kSoc);
    row.cap_cuts = state.pool.count(CutKind::kCap);
    row.benders_cuts = state.pool.count(CutKind::kBenders);
    row.n_binary = state.binary_ids.size();
    row.mip_gap = delta;
    row.solver_limit = tsolve;  // configured limit; the budget clamp would make traces timing-dependent
    row.status = std::string(to_string(out.status)) + "/" + inner_status;
    state.trace.add(row);

    if (converged(state.ub, state.lb, params)) {
      state.termination = Termination::kConverged;
      break;
    }
    const bool floor_reached = delta <= params.eps / 10 * (1 + 1e-12);
    const bool solved_exactly =
        out.has_solution() && out.objective - out.dual_bound <= 1e-9 * std::max(1.0, std::abs(out.objective));
    if (added == 0 && (floor_reached || solved_exactly)) {
      state.termination = Termination::kStalled;
      state.events.push_back("iteration " + std::to_string(state.iteration) +
                             ": no new cuts and the outer model cannot tighten further");
      break;
    }
    std::tie(delta, tsolve) = update_controls(delta, tsolve, state.ub, state.lb, params);
  }
}

}  // namespace pioia
