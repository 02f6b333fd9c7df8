#include "pioia/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pioia {

double gap(double ub, double lb) {
  if (std::isinf(ub) && ub > 0) return kInf;
  if (ub == lb) return 0.0;
  if (ub == 0.0) return kInf;
  return (ub - lb) / std::abs(ub);
}

double optg(double ub, double obj_star) {
  if (std::isinf(ub) && ub > 0) return kInf;
  if (ub == obj_star) return 0.0;
  if (ub == 0.0) return kInf;
  const double v = (ub - obj_star) / std::abs(ub);
  return (v < 0.0 && v >= -1e-9) ? 0.0 : v;
}

double violation(const UcInstance& inst, FormulationVariant variant, const std::vector<double>& x) {
  const VariableIndex ix(inst, false);
  if (static_cast<int>(x.size()) != ix.num_vars()) {
    throw std::invalid_argument("violation: expected " + std::to_string(ix.num_vars()) +
                                " values, got " + std::to_string(x.size()));
  }
  const ModelSpec spec = build_outer_base(inst, variant, false);
  double worst = spec.max_violation(x, true);
  for (const auto& r : soc_residuals(inst, ix, x)) worst = std::max(worst, r.value);
  for (const auto& r : cap_residuals(inst, ix, x)) worst = std::max(worst, r.value);
  return worst;
}

std::vector<MilestoneSpec> default_milestones(double eps) {
  return {{"Gap-1", false, 0.01}, {"Gap-0.1", false, 0.001}, {"OptG-0.1", true, 0.001}, {"OptG-0", true, eps}};
}

std::map<std::string, std::optional<double>> milestones(const RunTrace& trace,
                                                        std::optional<double> obj_star,
                                                        const std::vector<MilestoneSpec>& specs) {
  std::map<std::string, std::optional<double>> out;
  for (const auto& m : specs) {
    out[m.name] = std::nullopt;
    if (m.use_optg && !obj_star) continue;
    for (const auto& row : trace.rows()) {
      const double v = m.use_optg ? optg(row.ub, *obj_star) : row.gap;
      if (v <= m.threshold) {
        out[m.name] = row.wall_time_s;
        break;
      }
    }
  }
  return out;
}

}  // namespace pioia
