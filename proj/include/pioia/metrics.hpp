// Gap, optimality gap, independent violation check and milestone times.

#ifndef PIOIA_METRICS_HPP_
#define PIOIA_METRICS_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pioia/formulation.hpp"
#include "pioia/trace.hpp"

namespace pioia {

// (UB - LB) / UB; +inf for infinite UB; 0 when UB == LB.
double gap(double ub, double lb);
// (UB - obj*) / UB; tiny negatives in [-1e-9, 0) clamp to 0.
double optg(double ub, double obj_star);

// Largest violation of `x` (ids of VariableIndex(inst, false)) against every
// original constraint: bounds, integrality of u, y, z, all linear rows, and
// the two quadratic families as residuals.
double violation(const UcInstance& inst, FormulationVariant variant, const std::vector<double>& x);

struct MilestoneSpec {
  std::string name;
  bool use_optg;     // false: Gap threshold
  double threshold;  // inclusive
};

// Gap-1, Gap-0.1, OptG-0.1, OptG-0 (OptG-0 read as OptG <= eps).
std::vector<MilestoneSpec> default_milestones(double eps = 1e-4);

// First wall time at which each threshold holds; nullopt = not reached.
// OptG milestones are never reached without obj_star.
std::map<std::string, std::optional<double>> milestones(
    const RunTrace& trace, std::optional<double> obj_star,
    const std::vector<MilestoneSpec>& specs = default_milestones());

}  // namespace pioia

#endif  // PIOIA_METRICS_HPP_
