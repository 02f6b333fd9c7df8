// Unit commitment instance data.
//
// Everything electrical is per-unit on `base_mva`; costs are per per-unit
// hour. Periods are 1-based in files and 0-based in memory (t = 0 is the
// first scheduled period; the initial state belongs to the generator).

#ifndef PIOIA_MODEL_HPP_
#define PIOIA_MODEL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace pioia {

struct Bus {
  int id = 0;
  double v_min = 0.9;
  double v_max = 1.1;
  int area = 1;
};

// g and b are the off-diagonal admittance entries G_nm, B_nm of the bus
// admittance matrix (so g <= 0 and b >= 0 for an ordinary inductive line).
struct Line {
  int from = 0;
  int to = 0;
  double g = 0.0;
  double b = 0.0;
  double b_shunt = 0.0;
  double s_max = 0.0;
};

enum class GeneratorKind { kThermal, kRenewable };

struct Generator {
  int id = 0;
  int bus = 0;
  GeneratorKind kind = GeneratorKind::kThermal;
  double p_min = 0.0, p_max = 0.0;
  double q_min = 0.0, q_max = 0.0;
  double ramp_up = 0.0, ramp_down = 0.0;
  double ramp_startup = 0.0, ramp_shutdown = 0.0;
  int min_up = 1, min_down = 1;
  int u0 = 0;
  double p0 = 0.0;
  int init_up_time = 0;    // L: periods the unit must stay on
  int init_down_time = 0;  // F: periods the unit must stay off
  double cost_fixed = 0.0, cost_startup = 0.0, cost_shutdown = 0.0;
  double cost_variable = 0.0;

  bool thermal() const { return kind == GeneratorKind::kThermal; }
};

struct Load {
  int bus = 0;
  int t = 0;  // 0-based
  double p = 0.0;
  double q = 0.0;
};

struct Reserve {
  int area = 0;
  int t = 0;  // 0-based
  double requirement = 0.0;
};

struct UcInstance {
  double base_mva = 100.0;
  int horizon = 1;
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  std::vector<Load> loads;
  std::vector<Reserve> reserves;
  std::optional<double> penalty;  // C^P; see penalty_cost()

  // Explicit penalty, else 100 * max C^V (100 when every C^V is zero).
  double penalty_cost() const;
  int bus_index(int bus_id) const;  // -1 when unknown
  // Dense demand tables indexed [bus index][t]; missing records read as 0.
  std::vector<std::vector<double>> p_demand() const;
  std::vector<std::vector<double>> q_demand() const;
  // Sorted distinct areas of the buses.
  std::vector<int> areas() const;
  // Thermal generators located in `area` (indices into generators).
  std::vector<int> area_members(int area) const;
  // Requirement per area and period (0 when no record exists).
  std::map<int, std::vector<double>> reserve_table() const;
};

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Empty iff every data invariant holds. Each entry names the entity and the
// rule.
std::vector<std::string> validate_instance(const UcInstance& inst);

nlohmann::json instance_to_json(const UcInstance& inst);
// Throws InstanceError on schema problems or invariant violations.
UcInstance instance_from_json(const nlohmann::json& j);
UcInstance load_instance(const std::string& path);
void write_instance(const UcInstance& inst, const std::string& path);
// FNV-1a over the canonical JSON dump.
std::uint64_t instance_hash(const UcInstance& inst);

// Scales each load record by an independent draw of (1 + xi),
// xi ~ N(0, sigma^2), in record order. The reactive part shares the factor
// when `scale_q` is set. Factors are reported through `factors` if given.
UcInstance perturb_loads(const UcInstance& inst, double sigma,
                         std::uint64_t seed, bool scale_q = true,
                         std::vector<double>* factors = nullptr);

// Random connected instance that is feasible for every formulation variant
// with slacks; deterministic in `seed`.
UcInstance generate_synthetic(int n_buses, int n_gens, int horizon,
                              std::uint64_t seed);

// Commitment decisions indexed [generator][t].
struct CommitmentSchedule {
  std::vector<std::vector<int>> u, y, z;

  // y and z follow from the on/off transitions starting at each u0.
  static CommitmentSchedule from_status(const UcInstance& inst,
                                        const std::vector<std::vector<int>>& u);
  bool operator==(const CommitmentSchedule& other) const = default;
};

}  // namespace pioia

#endif  // PIOIA_MODEL_HPP_
