#include "pioia/oracle.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace pioia {

namespace {

// Rules applied directly to an on/off sequence; kept apart from the
// formulation's checker so the two can vouch for each other.
bool admissible(const Generator& gen, const std::vector<int>& u, int T) {
  if (!gen.thermal()) return true;
  for (int t = 0; t < std::min(gen.init_up_time, T); ++t) {
    if (u[t] != 1) return false;
  }
  for (int t = 0; t < std::min(gen.init_down_time, T); ++t) {
    if (u[t] != 0) return false;
  }
  int prev = gen.u0;
  for (int s = 0; s < T; ++s) {
    if (u[s] == 1 && prev == 0 && s >= gen.init_up_time) {
      for (int t = s; t < std::min(T, s + gen.min_up); ++t) {
        if (u[t] != 1) return false;
      }
    }
    if (u[s] == 0 && prev == 1 && s >= gen.init_down_time) {
      for (int t = s; t < std::min(T, s + gen.min_down); ++t) {
        if (u[t] != 0) return false;
      }
    }
    prev = u[s];
  }
  return true;
}

double commitment_cost(const UcInstance& inst, const CommitmentSchedule& s) {
  double c = 0.0;
  for (std::size_t g = 0; g < inst.generators.size(); ++g) {
    const Generator& gen = inst.generators[g];
    for (int t = 0; t < inst.horizon; ++t) {
      c += gen.cost_fixed * s.u[g][t] + gen.cost_startup * s.y[g][t] +
           gen.cost_shutdown * s.z[g][t];
    }
  }
  return c;
}

bool operating_cost_nonnegative(const UcInstance& inst) {
  if (inst.penalty_cost() < 0.0) return false;
  for (const auto& g : inst.generators) {
    if (g.cost_variable < 0.0 || g.p_min < 0.0) return false;
  }
  return true;
}

}  // namespace

std::vector<std::vector<int>> feasible_status_sequences(const UcInstance& inst, int g) {
  const int T = inst.horizon;
  std::vector<std::vector<int>> out;
  std::vector<int> u(T, 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << T); ++mask) {
    // most significant bit = first period, so counting order is lexicographic
    for (int t = 0; t < T; ++t) u[t] = static_cast<int>((mask >> (T - 1 - t)) & 1U);
    if (admissible(inst.generators[g], u, T)) out.push_back(u);
  }
  return out;
}

std::size_t enumerate_feasible_commitments(
    const UcInstance& inst, const std::function<void(const CommitmentSchedule&)>& visit) {
  const int G = static_cast<int>(inst.generators.size());
  if (G * inst.horizon > kOracleMaxBinaries) {
    throw std::invalid_argument("oracle: |G| * T = " + std::to_string(G * inst.horizon) +
                                " exceeds the enumeration guard of " +
                                std::to_string(kOracleMaxBinaries));
  }
  std::vector<std::vector<std::vector<int>>> options;
  for (int g = 0; g < G; ++g) {
    options.push_back(feasible_status_sequences(inst, g));
    if (options.back().empty()) return 0;
  }
  std::vector<std::size_t> pick(G, 0);
  std::size_t count = 0;
  std::vector<std::vector<int>> u(G);
  while (true) {
    for (int g = 0; g < G; ++g) u[g] = options[g][pick[g]];
    visit(CommitmentSchedule::from_status(inst, u));
    ++count;
    int g = G - 1;
    while (g >= 0 && ++pick[g] == options[g].size()) {
      pick[g] = 0;
      --g;
    }
    if (g < 0) break;
  }
  return count;
}

std::vector<CommitmentSchedule> enumerate_feasible_commitments(const UcInstance& inst) {
  std::vector<CommitmentSchedule> all;
  enumerate_feasible_commitments(inst, [&all](const CommitmentSchedule& s) { all.push_back(s); });
  return all;
}

OracleResult brute_force_optimum(const UcInstance& inst, FormulationVariant variant,
                                 SolverBackend& backend) {
  OracleResult best;
  const bool can_prune = operating_cost_nonnegative(inst);
  best.enumerated = enumerate_feasible_commitments(inst, [&](const CommitmentSchedule& s) {
    if (can_prune && commitment_cost(inst, s) > best.obj_star) return;
    const SolveOutcome out = backend.solve_continuous(build_inner(inst, s, variant));
    ++best.solved;
    if (out.status == SolveStatus::kInfeasible) {
      ++best.infeasible;
      return;
    }
    if (out.status != SolveStatus::kOptimal) {
      throw std::runtime_error(std::string("oracle: inner solve failed (") +
                               to_string(out.status) + "): " + out.message);
    }
    if (out.objective < best.obj_star) {
      best.obj_star = out.objective;
      best.schedule = s;
      best.primal = out.primal;
    }
  });
  return best;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_golden(const GoldenRecord& rec, const std::string& path) {
  nlohmann::json j;
  j["instance_hash"] = rec.instance_hash;
  j["variant"] = to_string(rec.variant);
  j["obj_star"] = rec.obj_star;
  j["schedule"] = {{"u", rec.schedule.u}, {"y", rec.schedule.y}, {"z", rec.schedule.z}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(1) << "\n";
}

GoldenRecord read_golden(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  try {
    const auto j = nlohmann::json::parse(in);
    GoldenRecord rec;
    rec.instance_hash = j.at("instance_hash").get<std::string>();
    rec.variant = parse_variant(j.at("variant").get<std::string>());
    rec.obj_star = j.at("obj_star").get<double>();
    const auto& s = j.at("schedule");
    rec.schedule.u = s.at("u").get<std::vector<std::vector<int>>>();
    rec.schedule.y = s.at("y").get<std::vector<std::vector<int>>>();
    rec.schedule.z = s.at("z").get<std::vector<std::vector<int>>>();
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("golden file " + path + ": " + e.what());
  }
}

}  // namespace pioia
