#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "pioia/model.hpp"

using namespace pioia;

namespace {

const std::string kRing = std::string(PIOIA_TEST_DATA) + "/three_bus_ring.json";

bool has_entry(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

nlohmann::json minimal_json() {
  return nlohmann::json::parse(R"({
    "base_mva": 100, "horizon": 1,
    "buses": [{"id": 1, "v_min": 0.95, "v_max": 1.05, "area": 1}],
    "lines": [],
    "generators": [{"id": 1, "bus": 1, "kind": "thermal",
      "p_min": 0.1, "p_max": 1.0, "q_min": -0.2, "q_max": 0.5,
      "ramp_up": 1, "ramp_down": 1, "ramp_startup": 1, "ramp_shutdown": 1,
      "min_up": 1, "min_down": 1, "u0": 0, "p0": 0,
      "init_up_time": 0, "init_down_time": 0,
      "cost_fixed": 1, "cost_startup": 2, "cost_shutdown": 0, "cost_variable": 10}],
    "loads": [{"bus": 1, "t": 1, "p": 0.5, "q": 0.1}],
    "reserves": []
  })");
}

void expect_same(const UcInstance& a, const UcInstance& b) {
  CHECK(a.base_mva == b.base_mva);
  CHECK(a.horizon == b.horizon);
  REQUIRE(a.buses.size() == b.buses.size());
  for (std::size_t i = 0; i < a.buses.size(); ++i) {
    CHECK(a.buses[i].id == b.buses[i].id);
    CHECK(a.buses[i].v_min == b.buses[i].v_min);
    CHECK(a.buses[i].v_max == b.buses[i].v_max);
    CHECK(a.buses[i].area == b.buses[i].area);
  }
  REQUIRE(a.lines.size() == b.lines.size());
  for (std::size_t i = 0; i < a.lines.size(); ++i) {
    CHECK(a.lines[i].from == b.lines[i].from);
    CHECK(a.lines[i].to == b.lines[i].to);
    CHECK(a.lines[i].g == b.lines[i].g);
    CHECK(a.lines[i].b == b.lines[i].b);
    CHECK(a.lines[i].b_shunt == b.lines[i].b_shunt);
    CHECK(a.lines[i].s_max == b.lines[i].s_max);
  }
  REQUIRE(a.generators.size() == b.generators.size());
  for (std::size_t i = 0; i < a.generators.size(); ++i) {
    const auto& x = a.generators[i];
    const auto& y = b.generators[i];
    CHECK(x.id == y.id);
    CHECK(x.bus == y.bus);
    CHECK(x.kind == y.kind);
    CHECK(x.p_min == y.p_min);
    CHECK(x.p_max == y.p_max);
    CHECK(x.q_min == y.q_min);
    CHECK(x.q_max == y.q_max);
    CHECK(x.ramp_up == y.ramp_up);
    CHECK(x.ramp_down == y.ramp_down);
    CHECK(x.ramp_startup == y.ramp_startup);
    CHECK(x.ramp_shutdown == y.ramp_shutdown);
    CHECK(x.min_up == y.min_up);
    CHECK(x.min_down == y.min_down);
    CHECK(x.u0 == y.u0);
    CHECK(x.p0 == y.p0);
    CHECK(x.init_up_time == y.init_up_time);
    CHECK(x.init_down_time == y.init_down_time);
    CHECK(x.cost_fixed == y.cost_fixed);
    CHECK(x.cost_startup == y.cost_startup);
    CHECK(x.cost_shutdown == y.cost_shutdown);
    CHECK(x.cost_variable == y.cost_variable);
  }
  REQUIRE(a.loads.size() == b.loads.size());
  for (std::size_t i = 0; i < a.loads.size(); ++i) {
    CHECK(a.loads[i].bus == b.loads[i].bus);
    CHECK(a.loads[i].t == b.loads[i].t);
    CHECK(a.loads[i].p == b.loads[i].p);
    CHECK(a.loads[i].q == b.loads[i].q);
  }
  REQUIRE(a.reserves.size() == b.reserves.size());
  for (std::size_t i = 0; i < a.reserves.size(); ++i) {
    CHECK(a.reserves[i].area == b.reserves[i].area);
    CHECK(a.reserves[i].t == b.reserves[i].t);
    CHECK(a.reserves[i].requirement == b.reserves[i].requirement);
  }
  CHECK(a.penalty == b.penalty);
}

}  // namespace

TEST_CASE("minimal instance parses") {
  const UcInstance inst = instance_from_json(minimal_json());
  CHECK(inst.generators.size() == 1);
  CHECK(inst.horizon == 1);
  CHECK(inst.loads[0].t == 0);
  CHECK(inst.penalty_cost() == doctest::Approx(1000.0));
  CHECK(validate_instance(inst).empty());
}

TEST_CASE("L and F both positive is rejected") {
  auto j = minimal_json();
  j["generators"][0]["u0"] = 1;
  j["generators"][0]["init_up_time"] = 2;
  j["generators"][0]["init_down_time"] = 1;
  try {
    instance_from_json(j);
    FAIL("expected rejection");
  } catch (const InstanceError& e) {
    CHECK(std::string(e.what()).find("L·F = 0 violated") != std::string::npos);
  }
}

TEST_CASE("schema problems are reported") {
  auto j = minimal_json();
  j["generators"][0].erase("p_max");
  CHECK_THROWS_AS(instance_from_json(j), InstanceError);
  auto k = minimal_json();
  k["generators"][0]["kind"] = "nuclear-fusion";
  CHECK_THROWS_AS(instance_from_json(k), InstanceError);
  CHECK_THROWS_AS(load_instance("/nonexistent/file.json"), InstanceError);
}

TEST_CASE("validation names the entity and rule") {
  UcInstance inst = load_instance(kRing);
  CHECK(validate_instance(inst).empty());

  UcInstance bad = inst;
  bad.generators[1].p_min = 2.0;
  auto v = validate_instance(bad);
  REQUIRE(v.size() == 1);
  CHECK(has_entry(v, "generator 2"));
  CHECK(has_entry(v, "p_min > p_max"));

  UcInstance bad_load = inst;
  bad_load.loads.push_back({99, 0, 0.1, 0.0});
  v = validate_instance(bad_load);
  REQUIRE(v.size() == 1);
  CHECK(has_entry(v, "unknown bus"));

  UcInstance dup = inst;
  dup.lines.push_back(dup.lines[0]);
  std::swap(dup.lines.back().from, dup.lines.back().to);
  CHECK(has_entry(validate_instance(dup), "more than one line"));
}

TEST_CASE("ring fixture shape and round trip") {
  const UcInstance inst = load_instance(kRing);
  CHECK(inst.buses.size() == 3);
  CHECK(inst.lines.size() == 3);
  CHECK(inst.generators.size() == 2);
  CHECK(inst.horizon == 4);
  // hand-checked fields
  CHECK(inst.lines[2].from == 1);
  CHECK(inst.lines[2].to == 3);
  CHECK(inst.lines[2].s_max == 0.7);
  CHECK(inst.generators[0].init_up_time == 1);
  CHECK(inst.generators[1].cost_variable == 25.0);
  CHECK(inst.loads[8].p == 1.1);  // bus 3 at t = 3
  CHECK(inst.p_demand()[2][2] == 1.1);
  CHECK(inst.penalty_cost() == 2500.0);
  CHECK(inst.area_members(1) == std::vector<int>{0, 1});

  const auto path = std::filesystem::temp_directory_path() / "pioia_ring_roundtrip.json";
  write_instance(inst, path.string());
  const UcInstance back = load_instance(path.string());
  expect_same(inst, back);
  CHECK(instance_hash(inst) == instance_hash(back));
  std::filesystem::remove(path);
}

TEST_CASE("perturbation") {
  const UcInstance inst = load_instance(kRing);
  SUBCASE("sigma zero is identity") {
    expect_same(perturb_loads(inst, 0.0, 5), inst);
  }
  SUBCASE("same seed same output, topology untouched") {
    const UcInstance a = perturb_loads(inst, 0.05, 11);
    const UcInstance b = perturb_loads(inst, 0.05, 11);
    expect_same(a, b);
    CHECK(instance_hash(a) != instance_hash(inst));
    CHECK(a.lines.size() == inst.lines.size());
    CHECK(a.horizon == inst.horizon);
    CHECK(a.generators[0].p_max == inst.generators[0].p_max);
  }
  SUBCASE("reactive load shares the factor unless disabled") {
    std::vector<double> f;
    const UcInstance a = perturb_loads(inst, 0.05, 3, true, &f);
    CHECK(a.loads[2].p == doctest::Approx(inst.loads[2].p * f[2]));
    CHECK(a.loads[2].q == doctest::Approx(inst.loads[2].q * f[2]));
    const UcInstance b = perturb_loads(inst, 0.05, 3, false);
    CHECK(b.loads[2].q == inst.loads[2].q);
  }
  SUBCASE("factor statistics over 10^4 draws") {
    UcInstance big;
    big.horizon = 1;
    big.buses.push_back({1, 0.9, 1.1, 1});
    for (int i = 0; i < 10000; ++i) big.loads.push_back({1, 0, 1.0, 0.0});
    std::vector<double> f;
    perturb_loads(big, 0.05, 2024, true, &f);
    double mean = 0.0;
    for (double x : f) mean += x;
    mean /= f.size();
    double var = 0.0;
    for (double x : f) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / (f.size() - 1));
    CHECK(std::abs(mean - 1.0) <= 0.01);
    CHECK(std::abs(sd - 0.05) <= 0.01);
  }
  CHECK_THROWS(perturb_loads(inst, -0.1, 1));
}

TEST_CASE("synthetic instances") {
  const UcInstance one = generate_synthetic(1, 1, 1, 3);
  CHECK(one.buses.size() == 1);
  CHECK(one.lines.empty());
  CHECK(validate_instance(one).empty());

  const UcInstance a = generate_synthetic(3, 2, 4, 7);
  const UcInstance b = generate_synthetic(3, 2, 4, 7);
  expect_same(a, b);
  CHECK(a.lines.size() == 3);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const UcInstance s = generate_synthetic(1 + seed % 4, 1 + seed % 3, 1 + seed % 6, seed);
    CHECK(validate_instance(s).empty());
    double cap = 0.0;
    for (const auto& g : s.generators) cap += g.p_max;
    const auto pd = s.p_demand();
    for (int t = 0; t < s.horizon; ++t) {
      double tot = 0.0;
      for (const auto& row : pd) tot += row[t];
      CHECK(tot <= 0.8 * cap);
      CHECK(s.reserve_table().at(1)[t] == doctest::Approx(1.1 * tot));
    }
  }
  CHECK_THROWS(generate_synthetic(0, 1, 1, 1));
}

TEST_CASE("schedule from status derives transitions") {
  const UcInstance inst = load_instance(kRing);
  const auto s = CommitmentSchedule::from_status(inst, {{1, 0, 0, 1}, {0, 1, 1, 0}});
  CHECK(s.y[0] == std::vector<int>{0, 0, 0, 1});
  CHECK(s.z[0] == std::vector<int>{0, 1, 0, 0});
  CHECK(s.y[1] == std::vector<int>{0, 1, 0, 0});
  CHECK(s.z[1] == std::vector<int>{0, 0, 0, 1});
}
