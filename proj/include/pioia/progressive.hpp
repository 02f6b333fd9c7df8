// Progressive stages ahead of the outer-inner loop: cuts from the LP
// relaxation, then integrality added a few generators at a time.

#ifndef PIOIA_PROGRESSIVE_HPP_
#define PIOIA_PROGRESSIVE_HPP_

#include <string>
#include <vector>

#include "pioia/oia.hpp"

namespace pioia {

// m1: outer-inner only. m2: LP stage first. m3: LP and integer-growing
// stages. m4: m3 plus time-block Benders cuts on an epigraph outer model.
enum class Method { kM1, kM2, kM3, kM4 };

const char* to_string(Method m);
// "m1".."m4", case-insensitive. Throws std::invalid_argument.
Method parse_method(const std::string& text);
RunOptions run_options(Method m);

struct StageResult {
  int iterations = 0;
  std::string stop_reason;  // small_gain | no_cuts | all_integer | max_iter | time_budget
  std::vector<double> last_point;  // outer ids
};

// Relaxation rounds: LB from each LP, cuts at its solution, until the relative
// LB gain drops under eps_lp or no cut is added.
StageResult run_lp_stage(SolverState& state, const UcInstance& inst, FormulationVariant variant,
                         const AlgoParams& params, SolverBackend& backend, const RunOptions& options);

// Fractionality of each generator's u over the horizon: sum_t min(u, 1 - u).
std::vector<double> generator_scores(const VariableIndex& ix, const std::vector<double>& x);

// The k highest scores among generators not yet integral; ties go to the
// lower index.
std::vector<int> pick_generators(const std::vector<double>& scores, const std::vector<bool>& integral,
                                 int k);

// Rounds of: grow B by k generators picked at `start`, solve the partially
// integer outer model, cut at its solution. Stops on a gain under eps_ig, no
// cuts, or B covering every generator.
StageResult run_ig_stage(SolverState& state, const UcInstance& inst, FormulationVariant variant,
                         const AlgoParams& params, SolverBackend& backend, const RunOptions& options,
                         std::vector<double> start);

// Full run. Throws std::invalid_argument for m4 with f1.
SolverState run_pioia(const UcInstance& inst, FormulationVariant variant, Method method,
                      const AlgoParams& params, SolverBackend& backend);

}  // namespace pioia

#endif  // PIOIA_PROGRESSIVE_HPP_
