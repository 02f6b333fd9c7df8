#include <cmath>

#include "doctest.h"
#include "pioia/metrics.hpp"
#include "pioia/oia.hpp"
#include "pioia/oracle.hpp"

using namespace pioia;

namespace {

const std::string kRing = std::string(PIOIA_TEST_DATA) + "/three_bus_ring.json";

}  // namespace

TEST_CASE("update_controls") {
  AlgoParams p;
  SUBCASE("shrinks towards a quarter of the gap") {
    const auto [d, t] = update_controls(0.01, 200.0, 100.0, 99.0, p);
    CHECK(d == 0.0025);
    CHECK(t == 220.0);
  }
  SUBCASE("0.9 delta wins when the gap is wide") {
    const auto [d, t] = update_controls(0.01, 220.0, 100.0, 50.0, p);
    CHECK(d == 0.009);
    CHECK(t == 242.0);
  }
  SUBCASE("no finite UB leaves delta alone") {
    const auto [d, t] = update_controls(0.01, 200.0, kInf, 3.0, p);
    CHECK(d == 0.01);
    CHECK(t == 220.0);
  }
  SUBCASE("floor at eps / 10") {
    const auto [d, t] = update_controls(0.01, 200.0, 100.0, 100.0, p);
    CHECK(d == doctest::Approx(1e-5).epsilon(1e-15));
    (void)t;
  }
}

TEST_CASE("parameter validation") {
  AlgoParams p;
  CHECK_NOTHROW(p.validate());
  p.p_cut = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = AlgoParams{};
  p.eps = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("lift_to_outer prices each period") {
  const UcInstance inst = load_instance(kRing);
  const VariableIndex inner(inst, false), outer(inst, true);
  std::vector<double> x(inner.num_vars(), 0.0);
  x[inner.p(0, 1)] = 0.5;
  x[inner.pu(2, 1)] = 0.1;
  const auto lifted = lift_to_outer(inst, outer, x);
  REQUIRE(static_cast<int>(lifted.size()) == outer.num_vars());
  CHECK(lifted[outer.psi(0)] == 0.0);
  CHECK(lifted[outer.psi(1)] ==
        doctest::Approx(inst.generators[0].cost_variable * 0.5 + inst.penalty_cost() * 0.1));
  // the epigraph rows hold with equality at the lifted point
  const ModelSpec spec = build_outer_base(inst, FormulationVariant::kF2, true);
  int epi = 0;
  for (const auto& r : spec.rows) {
    if (r.kind != RowKind::kEpigraph) continue;
    ++epi;
    CHECK(spec.evaluate_row(r, lifted) == doctest::Approx(r.rhs).epsilon(1e-12));
  }
  CHECK(epi == inst.horizon);
}

TEST_CASE("active capacity keys") {
  const UcInstance inst = load_instance(kRing);
  const VariableIndex ix(inst, false);
  std::vector<double> x(ix.num_vars(), 0.0);
  const double s = inst.lines[0].s_max;
  x[ix.pf(0, 0, 2)] = s;  // on the limit
  x[ix.pf(1, 1, 0)] = s * 0.999;
  const auto keys = active_capacity_keys(inst, ix, x, 1e-5);
  CHECK(keys.size() == 1);
  CHECK(keys.count(LineKey{0, 0, 2}) == 1);
}

TEST_CASE("zero load converges on the first round") {
  UcInstance inst = load_instance(kRing);
  for (auto& l : inst.loads) l.p = l.q = 0.0;
  inst.reserves.clear();
  // F2 has no over-generation slack, so nothing may be forced on
  inst.generators[0].u0 = 0;
  inst.generators[0].p0 = 0.0;
  inst.generators[0].init_up_time = 0;
  for (auto& l : inst.lines) l.b_shunt = 0.0;  // charging would need reactive absorption
  auto backend = make_backend("ipm");
  SolverState state;
  run_oia(state, inst, FormulationVariant::kF2, AlgoParams{}, *backend);
  CHECK(state.termination == Termination::kConverged);
  CHECK(state.oia_iterations == 1);
  CHECK(state.trace.rows().size() == 1);
}

TEST_CASE("ring reaches the enumerated optimum") {
  const UcInstance inst = load_instance(kRing);
  auto backend = make_backend("ipm");
  const double obj_star = brute_force_optimum(inst, FormulationVariant::kF2, *backend).obj_star;
  for (bool benders : {false, true}) {
    CAPTURE(benders);
    SolverState state;
    run_oia(state, inst, FormulationVariant::kF2, AlgoParams{}, *backend, {benders, benders});
    CHECK(state.termination == Termination::kConverged);
    REQUIRE(state.incumbent);
    CHECK(optg(state.ub, obj_star) <= 1e-4);
    double prev_lb = -kInf, prev_ub = kInf;
    for (const auto& row : state.trace.rows()) {
      CHECK(row.lb <= obj_star + 1e-6);
      CHECK(row.lb >= prev_lb);
      CHECK(row.ub <= prev_ub);
      prev_lb = row.lb;
      prev_ub = row.ub;
    }
    CHECK(state.max_warm_start_cut_violation <= 1e-6);
    CHECK(violation(inst, FormulationVariant::kF2, state.incumbent->primal) <= 1e-6);
    if (benders) CHECK(state.pool.count(CutKind::kBenders) > 0);
  }
}

TEST_CASE("m4 with f1 is rejected") {
  const UcInstance inst = load_instance(kRing);
  auto backend = make_backend("ipm");
  SolverState state;
  CHECK_THROWS_AS(run_oia(state, inst, FormulationVariant::kF1, AlgoParams{}, *backend, {true, true}),
                  std::invalid_argument);
}
