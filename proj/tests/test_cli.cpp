#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pioia/cli.hpp"
#include "pioia/oracle.hpp"

using namespace pioia;
namespace fs = std::filesystem;

namespace {

const std::string kData = PIOIA_TEST_DATA;
const std::string kRing = kData + "/three_bus_ring.json";

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pioia");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pioia_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream f(p);
  return nlohmann::json::parse(f);
}

std::string read_text(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// CSV with the wall_time_s column blanked.
std::string without_times(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    // third field sits between the second and third commas
    const auto second = line.find(',', line.find(',') + 1);
    const auto third = line.find(',', second + 1);
    out += line.substr(0, second + 1) + line.substr(third) + "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("seed lists") {
  CHECK(parse_seed_list("3") == std::vector<std::uint64_t>{3});
  CHECK(parse_seed_list("1..4") == std::vector<std::uint64_t>{1, 2, 3, 4});
  CHECK(parse_seed_list("7,2") == std::vector<std::uint64_t>{7, 2});
  CHECK_THROWS_AS(parse_seed_list("4..1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_seed_list("x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_seed_list("-1"), std::invalid_argument);
}

TEST_CASE("solve on a zero-load instance") {
  const fs::path dir = scratch("zero");
  UcInstance inst = load_instance(kRing);
  for (auto& l : inst.loads) l.p = l.q = 0.0;
  inst.reserves.clear();
  inst.generators[0].u0 = 0;
  inst.generators[0].p0 = 0.0;
  inst.generators[0].init_up_time = 0;
  for (auto& l : inst.lines) l.b_shunt = 0.0;
  write_instance(inst, (dir / "zero.json").string());
  const Run r = cli({"solve", "--instance", (dir / "zero.json").string(), "--method", "m1", "--summary",
                     (dir / "s.json").string(), "--trace", (dir / "t.csv").string()});
  CHECK(r.code == 0);
  const auto s = read_json(dir / "s.json");
  CHECK(std::abs(s["ub"].get<double>()) < 1e-6);  // zero up to interior-point residue
  CHECK(s["method"] == "m1");
  CHECK(s["variant"] == "f2");
  CHECK_FALSE(s.contains("optg"));
  for (const char* key : {"lb", "gap", "vio", "runtime_s", "milestones", "cut_counts"}) CHECK(s.contains(key));
  CHECK(read_text(dir / "t.csv").rfind(std::string(kTraceHeader) + "\n", 0) == 0);
}

TEST_CASE("m4 with f1 exits 1 and says why") {
  const Run r = cli({"solve", "--instance", kRing, "--method", "m4", "--variant", "f1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("f1") != std::string::npos);
  CHECK(r.err.find("m4") != std::string::npos);
}

TEST_CASE("flag and input errors exit 1") {
  CHECK(cli({"solve", "--instance", kRing, "--method", "m9"}).code == 1);
  CHECK(cli({"solve", "--instance", kRing, "--eps", "abc"}).code == 1);
  CHECK(cli({"solve", "--instance", kRing, "--p-cut", "0"}).code == 1);
  CHECK(cli({"solve", "--instance", "/nonexistent/x.json"}).code == 1);
  CHECK(cli({"solve"}).code == 1);
  CHECK(cli({}).code == 1);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("budget exhaustion with an incumbent exits 2") {
  const fs::path dir = scratch("budget");
  const Run r = cli({"solve", "--instance", kRing, "--method", "m1", "--max-iter", "1", "--summary",
                     (dir / "s.json").string()});
  CHECK(r.code == 2);
  CHECK(read_json(dir / "s.json")["termination"] == "max_iter");
}

TEST_CASE("m3 reaches the golden optimum") {
  const fs::path dir = scratch("m3");
  const GoldenRecord g = read_golden(kData + "/golden/three_bus_ring.golden.json");
  std::ostringstream star;
  star.precision(17);
  star << g.obj_star;
  const Run r = cli({"solve", "--instance", kRing, "--method", "m3", "--obj-star", star.str(), "--summary",
                     (dir / "s.json").string()});
  CHECK(r.code == 0);
  const auto s = read_json(dir / "s.json");
  CHECK(s["optg"].get<double>() <= 1e-4);
  CHECK(s["vio"].get<double>() <= 1e-6);
  CHECK_FALSE(s["milestones"]["OptG-0"].is_null());
}

TEST_CASE("traces repeat apart from timing") {
  const fs::path dir = scratch("det");
  for (const char* name : {"a.csv", "b.csv"}) {
    CHECK(cli({"solve", "--instance", kRing, "--method", "m4", "--seed", "5", "--trace", (dir / name).string()})
              .code == 0);
  }
  const std::string a = read_text(dir / "a.csv"), b = read_text(dir / "b.csv");
  CHECK(a.size() > std::string(kTraceHeader).size());
  CHECK(without_times(a) == without_times(b));
}

TEST_CASE("perturb") {
  const fs::path dir = scratch("perturb");
  SUBCASE("sigma 0 keeps the payload") {
    const Run r = cli({"perturb", "--instance", kRing, "--sigma", "0", "--seeds", "4", "--out", dir.string()});
    REQUIRE(r.code == 0);
    auto j = read_json(dir / "three_bus_ring_s4.json");
    REQUIRE(j.contains("perturbation"));
    CHECK(j["perturbation"]["seed"] == 4);
    j.erase("perturbation");
    CHECK(j == instance_to_json(load_instance(kRing)));
  }
  SUBCASE("ten seeds, ten distinct files, reproducible") {
    REQUIRE(cli({"perturb", "--instance", kRing, "--sigma", "0.05", "--seeds", "1..10", "--out", dir.string()})
                .code == 0);
    std::set<std::string> bodies;
    for (int s = 1; s <= 10; ++s) bodies.insert(read_text(dir / ("three_bus_ring_s" + std::to_string(s) + ".json")));
    CHECK(bodies.size() == 10);
    const std::string first = read_text(dir / "three_bus_ring_s3.json");
    REQUIRE(cli({"perturb", "--instance", kRing, "--sigma", "0.05", "--seeds", "3", "--out", dir.string()}).code == 0);
    CHECK(read_text(dir / "three_bus_ring_s3.json") == first);
    // the written file is a loadable instance
    CHECK_NOTHROW(load_instance((dir / "three_bus_ring_s3.json").string()));
  }
  SUBCASE("reactive scaling can be switched off") {
    REQUIRE(cli({"perturb", "--instance", kRing, "--sigma", "0.05", "--seeds", "2", "--perturb-q", "off", "--out",
                 dir.string()})
                .code == 0);
    const UcInstance base = load_instance(kRing);
    const UcInstance p = load_instance((dir / "three_bus_ring_s2.json").string());
    for (std::size_t i = 0; i < base.loads.size(); ++i) CHECK(p.loads[i].q == base.loads[i].q);
  }
  CHECK(cli({"perturb", "--instance", kRing, "--sigma", "0.05"}).code == 1);
}

TEST_CASE("oracle writes a golden record") {
  const fs::path dir = scratch("oracle");
  const Run r = cli({"oracle", "--instance", kRing, "--cross-check", "--golden", (dir / "g.json").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("obj* ") == 0);
  CHECK(r.out.find("cross-check optimal") != std::string::npos);
  const GoldenRecord g = read_golden((dir / "g.json").string());
  auto backend = make_backend("ipm");
  const auto o = brute_force_optimum(load_instance(kRing), FormulationVariant::kF2, *backend);
  CHECK(g.obj_star == o.obj_star);
  CHECK(g.schedule == o.schedule);
}
