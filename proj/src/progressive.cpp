#include "pioia/progressive.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "pioia/metrics.hpp"

namespace pioia {

namespace {

std::set<LineKey> every_line_key(const UcInstance& inst) {
  const VariableIndex inner(inst, false);
  std::set<LineKey> keys;
  for (const auto& r : cap_residuals(inst, inner, std::vector<double>(inner.num_vars(), 0.0))) {
    keys.insert(r.key);
  }
  return keys;
}

bool small_gain(double lb, double lb_old, double tol) {
  return (lb - lb_old) / std::max(std::abs(lb), 1.0) < tol;
}

TraceRow stage_row(const SolverState& state, const std::string& stage, double mip_gap,
                   double limit, const std::string& status) {
  TraceRow row;
  row.iter = state.iteration;
  row.stage = stage;
  row.wall_time_s = state.elapsed();
  row.lb = state.lb;
  row.ub = state.ub;
  row.gap = gap(state.ub, state.lb);
  row.soc_cuts = state.pool.count(CutKind::kSoc);
  row.cap_cuts = state.pool.count(CutKind::kCap);
  row.benders_cuts = state.pool.count(CutKind::kBenders);
  row.n_binary = state.binary_ids.size();
  row.mip_gap = mip_gap;
  row.solver_limit = limit;
  row.status = status;
  return row;
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::kM1: return "m1";
    case Method::kM2: return "m2";
    case Method::kM3: return "m3";
    case Method::kM4: return "m4";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  std::string s = text;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "m1") return Method::kM1;
  if (s == "m2") return Method::kM2;
  if (s == "m3") return Method::kM3;
  if (s == "m4") return Method::kM4;
  throw std::invalid_argument("unknown method '" + text + "' (expected m1, m2, m3 or m4)");
}

RunOptions run_options(Method m) {
  const bool b = m == Method::kM4;
  return {b, b};
}

StageResult run_lp_stage(SolverState& state, const UcInstance& inst, FormulationVariant variant,
                         const AlgoParams& params, SolverBackend& backend, const RunOptions& options) {
  params.validate();
  const VariableIndex ix(inst, options.epigraph);
  const ModelSpec base = build_outer_base(inst, variant, options.epigraph);
  const std::set<LineKey> keys = every_line_key(inst);
  state.binary_ids.clear();
  StageResult res;
  double lb_old = 0.0;
  while (true) {
    if (res.iterations >= params.max_iter) {
      res.stop_reason = "max_iter";
      break;
    }
    const double remaining = params.time_budget - state.elapsed();
    if (remaining <= 0) {
      res.stop_reason = "time_budget";
      break;
    }
    const SolveOutcome out = backend.solve_continuous(assemble_outer(base, state.pool, {}, ix));
    ++state.iteration;
    ++res.iterations;
    if (out.status == SolveStatus::kInfeasible || out.status == SolveStatus::kUnbounded) {
      throw std::runtime_error(std::string("LP relaxation ") + to_string(out.status) +
                               (variant == FormulationVariant::kF1
                                    ? " (variant f1 has no load slacks; try f2)"
                                    : ""));
    }
    if (!out.has_solution()) {
      state.events.push_back("iteration " + std::to_string(state.iteration) + ": LP stage solve " +
                             to_string(out.status));
      state.trace.add(stage_row(state, "lp", 0.0, 0.0, to_string(out.status)));
      res.stop_reason = "no_cuts";
      break;
    }
    if (out.status == SolveStatus::kOptimal) state.lb = std::max(state.lb, out.objective);
    std::size_t added = add_soc_cuts(inst, ix, out.primal, params, &state.pool, state.iteration, "lp");
    added += add_cap_cuts(inst, ix, out.primal, keys, params, &state.pool, state.iteration, "lp");
    res.last_point = out.primal;
    state.trace.add(stage_row(state, "lp", 0.0, 0.0, to_string(out.status)));
    if (added == 0) {
      res.stop_reason = "no_cuts";
      break;
    }
    const double lb_now = out.status == SolveStatus::kOptimal ? out.objective : state.lb;
    if (small_gain(lb_now, lb_old, params.eps_lp)) {
      res.stop_reason = "small_gain";
      break;
    }
    lb_old = lb_now;
  }
  return res;
}

std::vector<double> generator_scores(const VariableIndex& ix, const std::vector<double>& x) {
  std::vector<double> s(ix.num_gens(), 0.0);
  for (int g = 0; g < ix.num_gens(); ++g) {
    for (int t = 0; t < ix.horizon(); ++t) {
      const double u = x[ix.u(g, t)];
      s[g] += std::min(u, 1.0 - u);
    }
  }
  return s;
}

std::vector<int> pick_generators(const std::vector<double>& scores, const std::vector<bool>& integral,
                                 int k) {
  std::vector<int> order;
  for (int g = 0; g < static_cast<int>(scores.size()); ++g) {
    if (!integral[g]) order.push_back(g);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });
  if (static_cast<int>(order.size()) > k) order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

StageResult run_ig_stage(SolverState& state, const UcInstance& inst, FormulationVariant variant,
                         const AlgoParams& params, SolverBackend& backend, const RunOptions& options,
                         std::vector<double> start) {
  params.validate();
  const VariableIndex ix(inst, options.epigraph);
  const ModelSpec base = build_outer_base(inst, variant, options.epigraph);
  const std::set<LineKey> keys = every_line_key(inst);
  const int G = ix.num_gens();
  const int k = params.k_ig > 0 ? params.k_ig : (G + 3) / 4;
  std::vector<bool> integral(G, false);
  for (int g = 0; g < G; ++g) {
    const auto ids = ix.generator_commitment_ids(g);
    integral[g] = !ids.empty() && std::find(state.binary_ids.begin(), state.binary_ids.end(), ids[0]) !=
                                      state.binary_ids.end();
  }
  StageResult res;
  if (start.empty()) start.assign(ix.num_vars(), 0.0);
  double lb_old = 0.0;
  while (true) {
    if (std::all_of(integral.begin(), integral.end(), [](bool b) { return b; })) {
      res.stop_reason = "all_integer";
      break;
    }
    if (res.iterations >= params.max_iter) {
      res.stop_reason = "max_iter";
      break;
    }
    const double remaining = params.time_budget - state.elapsed();
    if (remaining <= 0) {
      res.stop_reason = "time_budget";
      break;
    }
    for (int g : pick_generators(generator_scores(ix, start), integral, k)) {
      integral[g] = true;
      for (int id : ix.generator_commitment_ids(g)) state.binary_ids.push_back(id);
    }
    std::sort(state.binary_ids.begin(), state.binary_ids.end());

    SolveControls controls;
    controls.mip_gap = params.mip_gap_init;
    controls.time_limit = std::min(params.solver_time_init, remaining);
    controls.warm_start = start;
    const SolveOutcome out =
        backend.solve_mixed(assemble_outer(base, state.pool, state.binary_ids, ix), controls);
    ++state.iteration;
    ++res.iterations;
    if (out.status == SolveStatus::kInfeasible || out.status == SolveStatus::kUnbounded) {
      throw std::runtime_error(std::string("partially integer outer model ") + to_string(out.status));
    }
    if (std::isfinite(out.dual_bound)) state.lb = std::max(state.lb, out.dual_bound);
    std::size_t added = 0;
    if (out.has_solution()) {
      added += add_soc_cuts(inst, ix, out.primal, params, &state.pool, state.iteration, "ig");
      added += add_cap_cuts(inst, ix, out.primal, keys, params, &state.pool, state.iteration, "ig");
      start = out.primal;
      res.last_point = out.primal;
    }
    state.trace.add(stage_row(state, "ig", controls.mip_gap, params.solver_time_init, to_string(out.status)));
    if (added == 0) {
      res.stop_reason = "no_cuts";
      break;
    }
    const double lb_now = std::isfinite(out.dual_bound) ? out.dual_bound : state.lb;
    if (small_gain(lb_now, lb_old, params.eps_ig)) {
      res.stop_reason = "small_gain";
      break;
    }
    lb_old = lb_now;
  }
  return res;
}

SolverState run_pioia(const UcInstance& inst, FormulationVariant variant, Method method,
                      const AlgoParams& params, SolverBackend& backend) {
  params.validate();
  const RunOptions options = run_options(method);
  if (options.benders && variant == FormulationVariant::kF1) {
    throw std::invalid_argument("method m4 (Benders cuts) is not available with variant f1: "
                                "time-block subproblems need load slacks");
  }
  SolverState state(params.eps_par);
  if (method != Method::kM1) {
    StageResult lp = run_lp_stage(state, inst, variant, params, backend, options);
    state.events.push_back("lp stage: " + std::to_string(lp.iterations) + " rounds, " + lp.stop_reason);
    if (method == Method::kM3 || method == Method::kM4) {
      StageResult ig = run_ig_stage(state, inst, variant, params, backend, options, lp.last_point);
      state.events.push_back("ig stage: " + std::to_string(ig.iterations) + " rounds, " + ig.stop_reason);
    }
  }
  if (params.time_budget - state.elapsed() <= 0) {
    state.termination = Termination::kTimeBudget;
    return state;
  }
  run_oia(state, inst, variant, params, backend, options);
  return state;
}

}  // namespace pioia
