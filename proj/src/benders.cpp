#include "pioia/benders.hpp"

#include <stdexcept>

namespace pioia {

namespace {

UcInstance single_period(const UcInstance& inst, int t) {
  UcInstance one = inst;
  one.horizon = 1;
  one.loads.clear();
  for (const auto& l : inst.loads) {
    if (l.t == t) one.loads.push_back({l.bus, 0, l.p, l.q});
  }
  one.reserves.clear();
  one.penalty = inst.penalty_cost();
  return one;
}

}  // namespace

ModelSpec build_time_block(const UcInstance& inst, FormulationVariant variant, int t,
                           const std::vector<double>& p_anchor, std::vector<int>* p_ids) {
  if (t < 0 || t >= inst.horizon) throw std::invalid_argument("time block: period out of range");
  if (p_anchor.size() != inst.generators.size()) {
    throw std::invalid_argument("time block: anchor needs one value per generator");
  }
  const UcInstance one = single_period(inst, t);
  const VariableIndex ix(one, false);
  ModelSpec base = build_outer_base(one, variant, false);

  // Keep network rows only; commitment-side variables become inert.
  ModelSpec spec;
  spec.lower = base.lower;
  spec.upper = base.upper;
  spec.objective = base.objective;
  spec.integer.assign(base.num_vars(), false);
  for (auto& row : base.rows) {
    if (row.kind == RowKind::kFlow || row.kind == RowKind::kBalance) spec.add_row(std::move(row));
  }
  if (p_ids) p_ids->clear();
  for (int g = 0; g < ix.num_gens(); ++g) {
    const Generator& gen = one.generators[g];
    for (int id : {ix.u(g, 0), ix.y(g, 0), ix.z(g, 0), ix.pbar(g, 0)}) {
      spec.lower[id] = spec.upper[id] = 0.0;
      spec.objective[id] = 0.0;
    }
    spec.lower[ix.q(g, 0)] = gen.q_min;
    spec.upper[ix.q(g, 0)] = gen.q_max;
    const int p = ix.p(g, 0);
    spec.lower[p] = -kInf;
    spec.upper[p] = kInf;
    spec.add_row(Row{{{p, 1.0}}, Sense::kEqual, p_anchor[g], RowKind::kCoupling});
    if (p_ids) p_ids->push_back(p);
  }
  add_network_cones(one, ix, &spec);
  return spec;
}

TimeBlockDual solve_time_block(const UcInstance& inst, FormulationVariant variant, int t,
                               const std::vector<double>& p_anchor, SolverBackend& backend) {
  if (variant == FormulationVariant::kF1) {
    throw std::invalid_argument(
        "time-block Benders cuts need load slacks; use variant f2 or f3 (f1 subproblems can be infeasible)");
  }
  const ModelSpec spec = build_time_block(inst, variant, t, p_anchor);
  TimeBlockDual out;
  out.t = t;
  out.p_anchor = p_anchor;
  const SolveOutcome res = backend.solve_continuous(spec);
  if (res.status != SolveStatus::kOptimal || res.duals.size() != spec.num_rows()) {
    out.message = std::string("subproblem ") + to_string(res.status) + ": " + res.message;
    return out;
  }
  out.ok = true;
  // dual value, not primal: with it the cut stays a minorant even when the
  // primal point carries residuals
  out.psi_star = res.dual_bound;
  // Coupling rows are the last |G| rows.
  const std::size_t first = spec.num_rows() - inst.generators.size();
  for (std::size_t g = 0; g < inst.generators.size(); ++g) {
    out.pi_star.push_back(res.duals[first + g]);
  }
  return out;
}

Cut benders_cut(const TimeBlockDual& dual, const VariableIndex& ix, int iteration,
                const std::string& stage) {
  if (!dual.ok) throw std::invalid_argument("benders cut: subproblem did not solve");
  if (!ix.epigraph()) throw std::invalid_argument("benders cut: outer model has no epigraph variables");
  // -psi_t + pi^T p <= pi^T p* - psi*
  std::vector<LinearTerm> terms{{ix.psi(dual.t), -1.0}};
  double rhs = -dual.psi_star;
  for (std::size_t g = 0; g < dual.pi_star.size(); ++g) {
    terms.push_back({ix.p(static_cast<int>(g), dual.t), dual.pi_star[g]});
    rhs += dual.pi_star[g] * dual.p_anchor[g];
  }
  return make_cut(CutKind::kBenders, std::move(terms), rhs, {{-1, 0, dual.t}, iteration, stage});
}

double benders_cut_value(const TimeBlockDual& dual, const std::vector<double>& p) {
  double v = dual.psi_star;
  for (std::size_t g = 0; g < dual.pi_star.size(); ++g) {
    v += dual.pi_star[g] * (p[g] - dual.p_anchor[g]);
  }
  return v;
}

}  // namespace pioia
