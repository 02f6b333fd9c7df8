// Exhaustive ground truth for tiny instances: every admissible commitment,
// each priced by its inner SOCP.

#ifndef PIOIA_ORACLE_HPP_
#define PIOIA_ORACLE_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pioia/formulation.hpp"
#include "pioia/solver.hpp"

namespace pioia {

constexpr int kOracleMaxBinaries = 24;  // |G| * T

// Admissible on/off sequences of one generator, lexicographic (0 < 1,
// earliest period most significant).
std::vector<std::vector<int>> feasible_status_sequences(const UcInstance& inst, int g);

// Calls `visit` for every admissible schedule in lexicographic order over
// (g, t). Returns the count. Throws std::invalid_argument past the guard.
std::size_t enumerate_feasible_commitments(
    const UcInstance& inst, const std::function<void(const CommitmentSchedule&)>& visit);
std::vector<CommitmentSchedule> enumerate_feasible_commitments(const UcInstance& inst);

struct OracleResult {
  double obj_star = kInf;         // +inf when no schedule has a feasible inner model
  CommitmentSchedule schedule;
  std::size_t enumerated = 0;
  std::size_t solved = 0;         // inner models actually solved
  std::size_t infeasible = 0;
  std::vector<double> primal;     // inner solution of the best schedule
};

// Minimum inner value over all admissible schedules; ties keep the earlier
// schedule. Schedules whose commitment cost alone exceeds the incumbent are
// skipped when every dispatch and penalty cost is provably nonnegative.
OracleResult brute_force_optimum(const UcInstance& inst, FormulationVariant variant,
                                 SolverBackend& backend);

struct GoldenRecord {
  std::string instance_hash;  // 16 hex digits
  FormulationVariant variant = FormulationVariant::kF2;
  double obj_star = 0.0;
  CommitmentSchedule schedule;
};

std::string hash_hex(std::uint64_t h);
void write_golden(const GoldenRecord& rec, const std::string& path);
GoldenRecord read_golden(const std::string& path);

}  // namespace pioia

#endif  // PIOIA_ORACLE_HPP_
