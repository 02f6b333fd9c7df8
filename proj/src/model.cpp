#include "pioia/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace pioia {

using nlohmann::json;

double UcInstance::penalty_cost() const {
  if (penalty) return *penalty;
  double worst = 0.0;
  for (const auto& g : generators) worst = std::max(worst, g.cost_variable);
  return worst > 0.0 ? 100.0 * worst : 100.0;
}

int UcInstance::bus_index(int bus_id) const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].id == bus_id) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::vector<std::vector<double>> demand_table(const UcInstance& inst,
                                              bool active) {
  std::vector<std::vector<double>> d(inst.buses.size(),
                                     std::vector<double>(inst.horizon, 0.0));
  for (const auto& l : inst.loads) {
    const int n = inst.bus_index(l.bus);
    if (n < 0 || l.t < 0 || l.t >= inst.horizon) continue;
    d[n][l.t] += active ? l.p : l.q;
  }
  return d;
}

}  // namespace

std::vector<std::vector<double>> UcInstance::p_demand() const {
  return demand_table(*this, true);
}

std::vector<std::vector<double>> UcInstance::q_demand() const {
  return demand_table(*this, false);
}

std::vector<int> UcInstance::areas() const {
  std::set<int> s;
  for (const auto& b : buses) s.insert(b.area);
  return {s.begin(), s.end()};
}

std::vector<int> UcInstance::area_members(int area) const {
  std::vector<int> out;
  for (std::size_t g = 0; g < generators.size(); ++g) {
    const int n = bus_index(generators[g].bus);
    if (n >= 0 && buses[n].area == area && generators[g].thermal()) {
      out.push_back(static_cast<int>(g));
    }
  }
  return out;
}

std::map<int, std::vector<double>> UcInstance::reserve_table() const {
  std::map<int, std::vector<double>> out;
  for (const auto& r : reserves) {
    auto& row = out[r.area];
    row.resize(horizon, 0.0);
    if (r.t >= 0 && r.t < horizon) row[r.t] += r.requirement;
  }
  return out;
}

std::vector<std::string> validate_instance(const UcInstance& inst) {
  std::vector<std::string> v;
  auto add = [&v](const std::string& s) { v.push_back(s); };
  if (inst.horizon < 1) add("instance: horizon must be at least 1");
  if (!(inst.base_mva > 0.0)) add("instance: base_mva must be positive");
  if (inst.penalty && !(*inst.penalty >= 0.0)) add("instance: penalty must be nonnegative");

  std::set<int> bus_ids;
  for (const auto& b : inst.buses) {
    const std::string who = "bus " + std::to_string(b.id);
    if (!bus_ids.insert(b.id).second) add(who + ": duplicate id");
    if (!(b.v_min > 0.0)) add(who + ": v_min must be positive");
    if (!(b.v_min <= b.v_max)) add(who + ": v_min > v_max");
  }
  if (inst.buses.empty()) add("instance: no buses");

  std::set<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < inst.lines.size(); ++i) {
    const Line& l = inst.lines[i];
    const std::string who = "line " + std::to_string(l.from) + "-" + std::to_string(l.to);
    if (l.from == l.to) add(who + ": from == to");
    if (!bus_ids.count(l.from) || !bus_ids.count(l.to)) add(who + ": unknown bus");
    if (!(l.s_max > 0.0)) add(who + ": s_max must be positive");
    const auto key = std::minmax(l.from, l.to);
    if (!pairs.insert({key.first, key.second}).second) {
      add(who + ": more than one line on this bus pair");
    }
  }

  std::set<int> gen_ids;
  for (const auto& g : inst.generators) {
    const std::string who = "generator " + std::to_string(g.id);
    if (!gen_ids.insert(g.id).second) add(who + ": duplicate id");
    if (!bus_ids.count(g.bus)) add(who + ": unknown bus " + std::to_string(g.bus));
    if (!(g.p_min <= g.p_max)) add(who + ": p_min > p_max");
    if (!(g.q_min <= g.q_max)) add(who + ": q_min > q_max");
    if (g.ramp_up < 0 || g.ramp_down < 0 || g.ramp_startup < 0 || g.ramp_shutdown < 0) {
      add(who + ": negative ramp limit");
    }
    if (g.min_up < 0 || g.min_down < 0) add(who + ": negative minimum up/down time");
    if (g.init_up_time < 0 || g.init_down_time < 0) add(who + ": negative initial up/down time");
    if (g.u0 != 0 && g.u0 != 1) add(who + ": u0 must be 0 or 1");
    if (g.init_up_time * g.init_down_time != 0) add(who + ": L·F = 0 violated");
    if (g.init_up_time > 0 && g.u0 != 1) add(who + ": L > 0 requires u0 = 1");
    if (g.init_down_time > 0 && g.u0 != 0) add(who + ": F > 0 requires u0 = 0");
  }

  std::set<std::pair<int, int>> load_keys;
  for (const auto& l : inst.loads) {
    const std::string who = "load at bus " + std::to_string(l.bus) + " t=" + std::to_string(l.t + 1);
    if (!bus_ids.count(l.bus)) add(who + ": unknown bus");
    if (l.t < 0 || l.t >= inst.horizon) add(who + ": period out of range");
    if (!load_keys.insert({l.bus, l.t}).second) add(who + ": duplicate record");
    if (l.p < 0.0 || l.q < 0.0) add(who + ": negative demand");
  }
  for (const auto& b : inst.buses) {
    for (int t = 0; t < inst.horizon; ++t) {
      if (!load_keys.count({b.id, t})) {
        add("load at bus " + std::to_string(b.id) + " t=" + std::to_string(t + 1) + ": missing");
      }
    }
  }

  std::set<int> areas;
  for (const auto& b : inst.buses) areas.insert(b.area);
  std::set<std::pair<int, int>> res_keys;
  for (const auto& r : inst.reserves) {
    const std::string who = "reserve area " + std::to_string(r.area) + " t=" + std::to_string(r.t + 1);
    if (!areas.count(r.area)) add(who + ": unknown area");
    if (r.t < 0 || r.t >= inst.horizon) add(who + ": period out of range");
    if (!(r.requirement >= 0.0)) add(who + ": negative requirement");
    if (!res_keys.insert({r.area, r.t}).second) add(who + ": duplicate record");
  }
  return v;
}

json instance_to_json(const UcInstance& inst) {
  json j;
  j["base_mva"] = inst.base_mva;
  j["horizon"] = inst.horizon;
  j["buses"] = json::array();
  for (const auto& b : inst.buses) {
    j["buses"].push_back({{"id", b.id}, {"v_min", b.v_min}, {"v_max", b.v_max}, {"area", b.area}});
  }
  j["lines"] = json::array();
  for (const auto& l : inst.lines) {
    j["lines"].push_back({{"from", l.from}, {"to", l.to}, {"g", l.g}, {"b", l.b},
                          {"b_shunt", l.b_shunt}, {"s_max", l.s_max}});
  }
  j["generators"] = json::array();
  for (const auto& g : inst.generators) {
    j["generators"].push_back({
        {"id", g.id}, {"bus", g.bus},
        {"kind", g.thermal() ? "thermal" : "renewable"},
        {"p_min", g.p_min}, {"p_max", g.p_max}, {"q_min", g.q_min}, {"q_max", g.q_max},
        {"ramp_up", g.ramp_up}, {"ramp_down", g.ramp_down},
        {"ramp_startup", g.ramp_startup}, {"ramp_shutdown", g.ramp_shutdown},
        {"min_up", g.min_up}, {"min_down", g.min_down},
        {"u0", g.u0}, {"p0", g.p0},
        {"init_up_time", g.init_up_time}, {"init_down_time", g.init_down_time},
        {"cost_fixed", g.cost_fixed}, {"cost_startup", g.cost_startup},
        {"cost_shutdown", g.cost_shutdown}, {"cost_variable", g.cost_variable}});
  }
  j["loads"] = json::array();
  for (const auto& l : inst.loads) {
    j["loads"].push_back({{"bus", l.bus}, {"t", l.t + 1}, {"p", l.p}, {"q", l.q}});
  }
  j["reserves"] = json::array();
  for (const auto& r : inst.reserves) {
    j["reserves"].push_back({{"area", r.area}, {"t", r.t + 1}, {"requirement", r.requirement}});
  }
  if (inst.penalty) j["penalty"] = *inst.penalty;
  return j;
}

namespace {

template <typename T>
T field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw InstanceError(where + ": missing key '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw InstanceError(where + ": key '" + key + "' has the wrong type");
  }
}

int int_field(const json& obj, const char* key, const std::string& where) {
  const double v = field<double>(obj, key, where);
  if (v != std::floor(v)) {
    throw InstanceError(where + ": key '" + key + "' must be an integer");
  }
  return static_cast<int>(v);
}

const json& array_field(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_array()) {
    throw InstanceError(std::string("instance: '") + key + "' must be an array");
  }
  return obj.at(key);
}

}  // namespace

UcInstance instance_from_json(const json& j) {
  if (!j.is_object()) throw InstanceError("instance: top level must be an object");
  UcInstance inst;
  inst.base_mva = field<double>(j, "base_mva", "instance");
  inst.horizon = int_field(j, "horizon", "instance");
  for (const auto& b : array_field(j, "buses")) {
    Bus bus;
    bus.id = int_field(b, "id", "bus");
    const std::string w = "bus " + std::to_string(bus.id);
    bus.v_min = field<double>(b, "v_min", w);
    bus.v_max = field<double>(b, "v_max", w);
    bus.area = int_field(b, "area", w);
    inst.buses.push_back(bus);
  }
  for (const auto& l : array_field(j, "lines")) {
    Line line;
    line.from = int_field(l, "from", "line");
    line.to = int_field(l, "to", "line");
    const std::string w = "line " + std::to_string(line.from) + "-" + std::to_string(line.to);
    line.g = field<double>(l, "g", w);
    line.b = field<double>(l, "b", w);
    line.b_shunt = field<double>(l, "b_shunt", w);
    line.s_max = field<double>(l, "s_max", w);
    inst.lines.push_back(line);
  }
  for (const auto& gj : array_field(j, "generators")) {
    Generator g;
    g.id = int_field(gj, "id", "generator");
    const std::string w = "generator " + std::to_string(g.id);
    g.bus = int_field(gj, "bus", w);
    const std::string kind = field<std::string>(gj, "kind", w);
    if (kind == "thermal") {
      g.kind = GeneratorKind::kThermal;
    } else if (kind == "renewable") {
      g.kind = GeneratorKind::kRenewable;
    } else {
      throw InstanceError(w + ": kind must be thermal or renewable");
    }
    g.p_min = field<double>(gj, "p_min", w);
    g.p_max = field<double>(gj, "p_max", w);
    g.q_min = field<double>(gj, "q_min", w);
    g.q_max = field<double>(gj, "q_max", w);
    g.ramp_up = field<double>(gj, "ramp_up", w);
    g.ramp_down = field<double>(gj, "ramp_down", w);
    g.ramp_startup = field<double>(gj, "ramp_startup", w);
    g.ramp_shutdown = field<double>(gj, "ramp_shutdown", w);
    g.min_up = int_field(gj, "min_up", w);
    g.min_down = int_field(gj, "min_down", w);
    g.u0 = int_field(gj, "u0", w);
    g.p0 = field<double>(gj, "p0", w);
    g.init_up_time = int_field(gj, "init_up_time", w);
    g.init_down_time = int_field(gj, "init_down_time", w);
    g.cost_fixed = field<double>(gj, "cost_fixed", w);
    g.cost_startup = field<double>(gj, "cost_startup", w);
    g.cost_shutdown = field<double>(gj, "cost_shutdown", w);
    g.cost_variable = field<double>(gj, "cost_variable", w);
    inst.generators.push_back(g);
  }
  for (const auto& lj : array_field(j, "loads")) {
    Load l;
    l.bus = int_field(lj, "bus", "load");
    l.t = int_field(lj, "t", "load") - 1;
    const std::string w = "load at bus " + std::to_string(l.bus);
    l.p = field<double>(lj, "p", w);
    l.q = field<double>(lj, "q", w);
    inst.loads.push_back(l);
  }
  if (j.contains("reserves")) {
    for (const auto& rj : array_field(j, "reserves")) {
      Reserve r;
      r.area = int_field(rj, "area", "reserve");
      r.t = int_field(rj, "t", "reserve") - 1;
      r.requirement = field<double>(rj, "requirement", "reserve area " + std::to_string(r.area));
      inst.reserves.push_back(r);
    }
  }
  if (j.contains("penalty") && !j.at("penalty").is_null()) {
    inst.penalty = field<double>(j, "penalty", "instance");
  }
  const auto violations = validate_instance(inst);
  if (!violations.empty()) {
    std::string msg = "invalid instance:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw InstanceError(msg);
  }
  return inst;
}

UcInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError("cannot open instance file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InstanceError(path + ": " + e.what());
  }
  return instance_from_json(j);
}

void write_instance(const UcInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InstanceError("cannot write " + path);
  out << instance_to_json(inst).dump(1) << "\n";
  if (!out) throw InstanceError("write failed for " + path);
}

std::uint64_t instance_hash(const UcInstance& inst) {
  const std::string text = instance_to_json(inst).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

UcInstance perturb_loads(const UcInstance& inst, double sigma,
                         std::uint64_t seed, bool scale_q,
                         std::vector<double>* factors) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("perturb_loads: sigma must be >= 0");
  UcInstance out = inst;
  if (factors) factors->clear();
  if (sigma == 0.0) {
    if (factors) factors->assign(out.loads.size(), 1.0);
    return out;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> xi(0.0, sigma);
  for (auto& l : out.loads) {
    const double f = 1.0 + xi(rng);
    l.p *= f;
    if (scale_q) l.q *= f;
    if (factors) factors->push_back(f);
  }
  return out;
}

UcInstance generate_synthetic(int n_buses, int n_gens, int horizon,
                              std::uint64_t seed) {
  if (n_buses < 1 || n_gens < 1 || horizon < 1) {
    throw std::invalid_argument("generate_synthetic: sizes must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unif(rng); };

  UcInstance inst;
  inst.base_mva = 100.0;
  inst.horizon = horizon;
  for (int i = 0; i < n_buses; ++i) {
    inst.buses.push_back({i + 1, 0.9, 1.1, 1});
  }

  double cap = 0.0;
  for (int i = 0; i < n_gens; ++i) {
    Generator g;
    g.id = i + 1;
    g.bus = i % n_buses + 1;
    g.p_max = std::round(between(0.8, 1.5) * 1000.0) / 1000.0;
    g.p_min = 0.1 * g.p_max;
    g.q_max = 0.6 * g.p_max;
    g.q_min = -0.3 * g.p_max;
    g.ramp_up = g.ramp_down = g.ramp_startup = g.ramp_shutdown = g.p_max;
    g.min_up = 1 + static_cast<int>(unif(rng) * 3.0);
    g.min_down = 1 + static_cast<int>(unif(rng) * 3.0);
    g.u0 = unif(rng) < 0.5 ? 1 : 0;
    // Units never start inside a forced-off window, so the all-on schedule
    // stays feasible.
    g.init_up_time = g.u0 == 1 && unif(rng) < 0.5 ? 1 : 0;
    g.init_down_time = 0;
    g.p0 = g.u0 == 1 ? g.p_min + unif(rng) * (g.p_max - g.p_min) : 0.0;
    g.cost_fixed = std::round(between(2.0, 10.0) * 100.0) / 100.0;
    g.cost_startup = std::round(between(5.0, 30.0) * 100.0) / 100.0;
    g.cost_shutdown = std::round(between(0.0, 5.0) * 100.0) / 100.0;
    g.cost_variable = std::round(between(10.0, 40.0) * 100.0) / 100.0;
    cap += g.p_max;
    inst.generators.push_back(g);
  }

  auto add_line = [&](int a, int b) {
    const double x = between(0.05, 0.2);
    const double r = x * between(0.1, 0.3);
    const double d = r * r + x * x;
    Line l;
    l.from = a;
    l.to = b;
    l.g = -r / d;
    l.b = x / d;
    l.b_shunt = 0.0;
    l.s_max = std::round(between(0.25, 0.8) * cap * 1000.0) / 1000.0;
    inst.lines.push_back(l);
  };
  if (n_buses == 2) add_line(1, 2);
  if (n_buses >= 3) {
    for (int i = 0; i < n_buses; ++i) add_line(i + 1, (i + 1) % n_buses + 1);
  }

  // Total demand in [0.12, 0.45] of capacity: above the sum of minimum
  // outputs, and low enough that capacity covers demand plus the reserve of
  // 110% of demand.
  std::vector<double> weight(n_buses);
  double wsum = 0.0;
  for (auto& w : weight) {
    w = between(0.2, 1.0);
    wsum += w;
  }
  for (int t = 0; t < horizon; ++t) {
    const double total = cap * between(0.12, 0.45);
    double area_load = 0.0;
    for (int n = 0; n < n_buses; ++n) {
      Load l;
      l.bus = n + 1;
      l.t = t;
      l.p = std::round(total * weight[n] / wsum * 1e4) / 1e4;
      l.q = std::round(0.3 * l.p * 1e4) / 1e4;
      area_load += l.p;
      inst.loads.push_back(l);
    }
    inst.reserves.push_back({1, t, 1.1 * area_load});
  }
  return inst;
}

CommitmentSchedule CommitmentSchedule::from_status(
    const UcInstance& inst, const std::vector<std::vector<int>>& u) {
  CommitmentSchedule s;
  s.u = u;
  s.y.assign(u.size(), std::vector<int>(inst.horizon, 0));
  s.z.assign(u.size(), std::vector<int>(inst.horizon, 0));
  for (std::size_t g = 0; g < u.size(); ++g) {
    int prev = inst.generators[g].u0;
    for (int t = 0; t < inst.horizon; ++t) {
      s.y[g][t] = u[g][t] > prev ? 1 : 0;
      s.z[g][t] = u[g][t] < prev ? 1 : 0;
      prev = u[g][t];
    }
  }
  return s;
}

}  // namespace pioia
