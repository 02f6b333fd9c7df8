#include <chrono>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "pioia/oracle.hpp"

using namespace pioia;

namespace {

const std::string kData = PIOIA_TEST_DATA;
const std::string kRing = kData + "/three_bus_ring.json";

UcInstance one_unit(int T, int min_up, int min_down, int u0, int L) {
  UcInstance inst;
  inst.horizon = T;
  inst.buses.push_back({1, 0.95, 1.05, 1});
  Generator g;
  g.id = 1;
  g.bus = 1;
  g.p_max = 1.0;
  g.q_min = -0.5;
  g.q_max = 0.5;
  g.ramp_up = g.ramp_down = g.ramp_startup = g.ramp_shutdown = 1.0;
  g.min_up = min_up;
  g.min_down = min_down;
  g.u0 = u0;
  g.p0 = u0 ? 0.5 : 0.0;
  g.init_up_time = L;
  g.cost_fixed = 1.0;
  g.cost_variable = 10.0;
  inst.generators.push_back(g);
  for (int t = 0; t < T; ++t) inst.loads.push_back({1, t, 0.0, 0.0});
  return inst;
}

std::vector<std::vector<int>> u_of(const std::vector<CommitmentSchedule>& all) {
  std::vector<std::vector<int>> out;
  for (const auto& s : all) out.push_back(s.u[0]);
  return out;
}

}  // namespace

TEST_CASE("hand enumerations") {
  CHECK(u_of(enumerate_feasible_commitments(one_unit(1, 1, 1, 0, 0))) ==
        std::vector<std::vector<int>>{{0}, {1}});
  // min up 2 from off: (1,0) breaks the window, (0,1) is a tail start
  CHECK(u_of(enumerate_feasible_commitments(one_unit(2, 2, 1, 0, 0))) ==
        std::vector<std::vector<int>>{{0, 0}, {0, 1}, {1, 1}});
  CHECK(u_of(enumerate_feasible_commitments(one_unit(1, 1, 1, 1, 1))) ==
        std::vector<std::vector<int>>{{1}});
  auto big = one_unit(1, 1, 1, 0, 0);
  big.horizon = 25;
  CHECK_THROWS_AS(enumerate_feasible_commitments(big), std::invalid_argument);
}

TEST_CASE("enumeration agrees with the row model and the checker") {
  std::vector<UcInstance> fixtures{load_instance(kRing)};
  for (std::uint64_t s = 0; s < 6; ++s) fixtures.push_back(generate_synthetic(2, 2, 5, s));
  for (const auto& inst : fixtures) {
    const auto all = enumerate_feasible_commitments(inst);
    // the same set from brute force over all 2^(G T) statuses, judged by the
    // outer rows with everything else free
    const int G = static_cast<int>(inst.generators.size()), T = inst.horizon;
    const VariableIndex ix(inst, false);
    ModelSpec rows = build_outer_base(inst, FormulationVariant::kF2);
    std::vector<Row> logic;
    for (const auto& r : rows.rows) {
      if (r.kind == RowKind::kLogic || r.kind == RowKind::kMinUpDown) logic.push_back(r);
    }
    std::size_t expected = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (G * T)); ++mask) {
      std::vector<std::vector<int>> u(G, std::vector<int>(T));
      for (int g = 0; g < G; ++g) {
        for (int t = 0; t < T; ++t) u[g][t] = static_cast<int>((mask >> (g * T + t)) & 1U);
      }
      const auto s = CommitmentSchedule::from_status(inst, u);
      std::vector<double> x(ix.num_vars(), 0.0);
      for (int g = 0; g < G; ++g) {
        for (int t = 0; t < T; ++t) {
          x[ix.u(g, t)] = s.u[g][t];
          x[ix.y(g, t)] = s.y[g][t];
          x[ix.z(g, t)] = s.z[g][t];
        }
      }
      bool ok = true;
      for (const auto& r : logic) {
        const double lhs = rows.evaluate_row(r, x);
        if ((r.sense == Sense::kEqual && std::abs(lhs - r.rhs) > 1e-9) ||
            (r.sense == Sense::kLessEqual && lhs > r.rhs + 1e-9) ||
            (r.sense == Sense::kGreaterEqual && lhs < r.rhs - 1e-9)) {
          ok = false;
        }
      }
      if (ok) ++expected;
      CHECK(ok == commitment_violations(inst, s).empty());
    }
    CHECK(all.size() == expected);
    for (std::size_t i = 0; i < all.size(); ++i) {
      CHECK(commitment_violations(inst, all[i]).empty());
      if (i > 0) CHECK(all[i - 1].u < all[i].u);
    }
  }
}

TEST_CASE("brute force basics") {
  auto backend = make_backend("ipm");
  SUBCASE("zero load picks all-off") {
    const auto r = brute_force_optimum(one_unit(2, 1, 1, 0, 0), FormulationVariant::kF2, *backend);
    CHECK(std::abs(r.obj_star) < 1e-7);
    CHECK(r.schedule.u[0] == std::vector<int>{0, 0});
  }
  SUBCASE("serving load beats leaving it unserved") {
    UcInstance inst = one_unit(1, 1, 1, 0, 0);
    inst.loads[0].p = 0.5;
    const auto r = brute_force_optimum(inst, FormulationVariant::kF2, *backend);
    CHECK(r.obj_star < inst.penalty_cost() * 0.5);
    CHECK(r.schedule.u[0] == std::vector<int>{1});
    CHECK(r.obj_star == doctest::Approx(1.0 + 10.0 * 0.5).epsilon(1e-7));
  }
}

TEST_CASE("variants agree on the ring fixture") {
  auto backend = make_backend("ipm");
  const UcInstance inst = load_instance(kRing);
  const auto f2 = brute_force_optimum(inst, FormulationVariant::kF2, *backend);
  const auto f3 = brute_force_optimum(inst, FormulationVariant::kF3, *backend);
  CHECK(f2.obj_star == doctest::Approx(f3.obj_star).epsilon(1e-6));
  // F1 matches when the F2 optimum uses no slack
  const VariableIndex ix(inst, false);
  double slack = 0.0;
  for (int n = 0; n < 3; ++n) {
    for (int t = 0; t < inst.horizon; ++t) {
      slack += f2.primal[ix.pu(n, t)] + f2.primal[ix.qu(n, t)];
    }
  }
  if (slack < 1e-6) {
    const auto f1 = brute_force_optimum(inst, FormulationVariant::kF1, *backend);
    CHECK(f1.obj_star == doctest::Approx(f2.obj_star).epsilon(1e-6));
  }
}

TEST_CASE("golden files reproduce with both conic backends") {
  const auto dir = std::filesystem::path(kData) / "golden";
  REQUIRE(std::filesystem::exists(dir));
  auto ipm = make_backend("ipm");
  auto ref = make_backend("reference");
  int checked = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.find(".golden.json") == std::string::npos) continue;
    const std::string stem = name.substr(0, name.find(".golden.json"));
    const UcInstance inst = load_instance((std::filesystem::path(kData) / (stem + ".json")).string());
    const GoldenRecord rec = read_golden(entry.path().string());
    CHECK(rec.instance_hash == hash_hex(instance_hash(inst)));
    const auto a = brute_force_optimum(inst, rec.variant, *ipm);
    CHECK(a.obj_star == doctest::Approx(rec.obj_star).epsilon(1e-6));
    CHECK(a.schedule == rec.schedule);
    // the reference backend prices the golden schedule independently
    const auto b = ref->solve_continuous(build_inner(inst, rec.schedule, rec.variant));
    REQUIRE(b.status == SolveStatus::kOptimal);
    CHECK(b.objective == doctest::Approx(rec.obj_star).epsilon(1e-6));
    ++checked;
  }
  CHECK(checked >= 3);
}

TEST_CASE("golden round trip") {
  GoldenRecord rec;
  rec.instance_hash = hash_hex(0xabcdefULL);
  rec.variant = FormulationVariant::kF3;
  rec.obj_star = 12.5;
  rec.schedule.u = {{1, 0}};
  rec.schedule.y = {{0, 0}};
  rec.schedule.z = {{0, 1}};
  const auto path = std::filesystem::temp_directory_path() / "pioia_golden_rt.json";
  write_golden(rec, path.string());
  const GoldenRecord back = read_golden(path.string());
  CHECK(back.instance_hash == "0000000000abcdef");
  CHECK(back.variant == FormulationVariant::kF3);
  CHECK(back.obj_star == 12.5);
  CHECK(back.schedule == rec.schedule);
  std::filesystem::remove(path);
}
