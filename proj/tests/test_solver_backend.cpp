#include <cmath>
#include <random>

#include "doctest.h"
#include "pioia/conic_ipm.hpp"
#include "pioia/solver.hpp"

using namespace pioia;

namespace {

ModelSpec one_row_lp() {
  ModelSpec s;
  const int x = s.add_variable(-kInf, kInf, 1.0);
  s.add_row({{{x, 1.0}}, Sense::kGreaterEqual, 3.0, RowKind::kOther});
  return s;
}

ModelSpec disk_model() {
  ModelSpec s;
  const int x = s.add_variable(-kInf, kInf, -1.0);
  const int y = s.add_variable(-kInf, kInf, 0.0);
  ConeRow c;
  c.members.push_back({{}, 1.0});
  c.members.push_back({{{x, 1.0}}, 0.0});
  c.members.push_back({{{y, 1.0}}, 0.0});
  s.cones.push_back(c);
  return s;
}

}  // namespace

TEST_CASE("continuous lp: objective and row dual") {
  for (const char* name : {"ipm", "reference"}) {
    auto backend = make_backend(name);
    const SolveOutcome out = backend->solve_continuous(one_row_lp());
    REQUIRE(out.status == SolveStatus::kOptimal);
    CHECK(out.objective == doctest::Approx(3.0));
    CHECK(out.duals.at(0) == doctest::Approx(1.0));
  }
}

TEST_CASE("cone row on the unit disk") {
  for (const char* name : {"ipm", "reference"}) {
    auto backend = make_backend(name);
    const SolveOutcome out = backend->solve_continuous(disk_model());
    REQUIRE(out.status == SolveStatus::kOptimal);
    CHECK(out.primal[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(out.objective == doctest::Approx(-1.0).epsilon(1e-8));
  }
}

TEST_CASE("duals follow d(obj)/d(rhs) in the conic path") {
  // min x + 2y  s.t. x + y = 4, x <= 1, y >= 0.5, ||(x, y)|| <= 10
  ModelSpec s;
  const int x = s.add_variable(-kInf, kInf, 1.0);
  const int y = s.add_variable(-kInf, kInf, 2.0);
  s.add_row({{{x, 1.0}, {y, 1.0}}, Sense::kEqual, 4.0, RowKind::kOther});
  s.add_row({{{x, 1.0}}, Sense::kLessEqual, 1.0, RowKind::kOther});
  s.add_row({{{y, 1.0}}, Sense::kGreaterEqual, 0.5, RowKind::kOther});
  ConeRow c;
  c.members = {{{}, 10.0}, {{{x, 1.0}}, 0.0}, {{{y, 1.0}}, 0.0}};
  s.cones.push_back(c);
  auto ipm = make_backend("ipm");
  const SolveOutcome out = ipm->solve_continuous(s);
  REQUIRE(out.status == SolveStatus::kOptimal);
  CHECK(out.objective == doctest::Approx(7.0));
  // Finite differences of the optimal value.
  for (std::size_t i = 0; i < 3; ++i) {
    ModelSpec t = s;
    t.rows[i].rhs += 1e-4;
    const double moved = ipm->solve_continuous(t).objective;
    CHECK(out.duals[i] == doctest::Approx((moved - out.objective) / 1e-4).epsilon(1e-4));
  }
}

TEST_CASE("fixed variables are presolved and restored") {
  ModelSpec s = disk_model();
  const int z = s.add_variable(0.5, 0.5, 3.0);
  s.cones[0].members[0].terms.push_back({z, 1.0});  // radius 1.5
  auto ipm = make_backend("ipm");
  const SolveOutcome out = ipm->solve_continuous(s);
  REQUIRE(out.status == SolveStatus::kOptimal);
  CHECK(out.primal[z] == 0.5);
  CHECK(out.objective == doctest::Approx(-1.5 + 1.5).epsilon(1e-8));
}

TEST_CASE("infeasible and unbounded conic models") {
  ModelSpec s = disk_model();
  s.add_row({{{0, 1.0}}, Sense::kGreaterEqual, 2.0, RowKind::kOther});
  CHECK(make_backend("ipm")->solve_continuous(s).status == SolveStatus::kInfeasible);

  ModelSpec u;
  const int a = u.add_variable(-kInf, kInf, -1.0);
  const int b = u.add_variable(-kInf, kInf, 0.0);
  ConeRow c;
  c.members = {{{{b, 1.0}}, 0.0}, {{{a, 1.0}}, 0.0}};
  u.cones.push_back(c);
  CHECK(make_backend("ipm")->solve_continuous(u).status == SolveStatus::kUnbounded);
}

TEST_CASE("ipm and cutting-plane backends agree on random socps") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 15; ++trial) {
    ModelSpec s;
    const int n = 5;
    for (int j = 0; j < n; ++j) s.add_variable(-3.0, 3.0, unif(rng));
    for (int r = 0; r < 3; ++r) {
      Row row;
      for (int j = 0; j < n; ++j) row.terms.push_back({j, unif(rng)});
      row.sense = Sense::kLessEqual;
      row.rhs = 1.0 + std::abs(unif(rng));
      s.add_row(row);
    }
    for (int k = 0; k < 2; ++k) {
      ConeRow c;
      c.members.push_back({{{k, 0.3}}, 2.0});
      c.members.push_back({{{k + 1, 1.0}, {k + 2, 0.5}}, 0.1});
      c.members.push_back({{{k + 3, 1.0}}, -0.2});
      s.cones.push_back(c);
    }
    const SolveOutcome a = make_backend("ipm")->solve_continuous(s);
    const SolveOutcome b = make_backend("reference")->solve_continuous(s);
    INFO("trial " << trial << " " << a.message);
    REQUIRE(a.status == SolveStatus::kOptimal);
    INFO(b.message);
    REQUIRE(b.status == SolveStatus::kOptimal);
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-7));
    CHECK(s.max_violation(a.primal, false) < 1e-7);
  }
}

TEST_CASE("binary program and warm start contract") {
  ModelSpec s;
  const int x = s.add_variable(0.0, 1.0, 1.0, true);
  s.add_row({{{x, 1.0}}, Sense::kGreaterEqual, 0.5, RowKind::kOther});
  auto backend = make_backend("ipm");
  SolveOutcome out = backend->solve_mixed(s, {});
  REQUIRE(out.status == SolveStatus::kOptimal);
  CHECK(out.primal[0] == 1.0);
  CHECK(out.dual_bound <= out.objective);

  SolveControls loose;
  loose.mip_gap = 0.5;
  out = backend->solve_mixed(s, loose);
  CHECK(out.objective == doctest::Approx(1.0));
  CHECK(out.dual_bound >= 0.5 - 1e-9);
  CHECK(out.dual_bound <= 1.0 + 1e-9);

  SolveControls warm;
  warm.warm_start = std::vector<double>{1.0};
  out = backend->solve_mixed(s, warm);
  CHECK(out.objective <= 1.0 + 1e-12);
  CHECK(out.warnings.empty());

  warm.warm_start = std::vector<double>{0.0};
  out = backend->solve_mixed(s, warm);
  CHECK(out.status == SolveStatus::kOptimal);
  CHECK(out.warnings.size() == 1);
}

TEST_CASE("knapsack against enumeration") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(1.0, 10.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 10;
    ModelSpec s;
    std::vector<double> w(n), v(n);
    Row cap;
    for (int j = 0; j < n; ++j) {
      w[j] = unif(rng);
      v[j] = unif(rng);
      s.add_variable(0.0, 1.0, -v[j], true);
      cap.terms.push_back({j, w[j]});
    }
    cap.rhs = 20.0;
    s.add_row(cap);
    double best = 0.0;
    for (int mask = 0; mask < (1 << n); ++mask) {
      double ww = 0.0, vv = 0.0;
      for (int j = 0; j < n; ++j) {
        if (mask >> j & 1) { ww += w[j]; vv += v[j]; }
      }
      if (ww <= 20.0) best = std::max(best, vv);
    }
    const SolveOutcome out = make_backend("ipm")->solve_mixed(s, {});
    REQUIRE(out.status == SolveStatus::kOptimal);
    CHECK(out.objective == doctest::Approx(-best).epsilon(1e-9));
  }
}

TEST_CASE("restrict_integrality") {
  ModelSpec s;
  for (int j = 0; j < 4; ++j) s.add_variable(0.0, 1.0, 1.0, j < 3);
  CHECK_FALSE(restrict_integrality(s, {}, {0, 1, 2}).has_integers());
  CHECK(restrict_integrality(s, {0, 1, 2}, {0, 1, 2}).integer_ids() == s.integer_ids());
  CHECK_THROWS_AS(restrict_integrality(s, {3}, {0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(make_backend("gurobi"), std::invalid_argument);
}
