#include "pioia/model_spec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pioia {

int ModelSpec::add_variable(double lb, double ub, double cost,
                            bool is_integer) {
  lower.push_back(lb);
  upper.push_back(ub);
  integer.push_back(is_integer);
  objective.push_back(cost);
  return static_cast<int>(lower.size()) - 1;
}

std::size_t ModelSpec::add_row(Row row) {
  rows.push_back(std::move(row));
  return rows.size() - 1;
}

bool ModelSpec::has_integers() const {
  return std::any_of(integer.begin(), integer.end(), [](bool b) { return b; });
}

std::vector<int> ModelSpec::integer_ids() const {
  std::vector<int> ids;
  for (std::size_t j = 0; j < integer.size(); ++j) {
    if (integer[j]) ids.push_back(static_cast<int>(j));
  }
  return ids;
}

std::size_t ModelSpec::count_rows(RowKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      rows.begin(), rows.end(), [kind](const Row& r) { return r.kind == kind; }));
}

double evaluate(const AffineExpr& expr, const std::vector<double>& x) {
  double v = expr.constant;
  for (const auto& t : expr.terms) v += t.coef * x[t.var];
  return v;
}

double ModelSpec::evaluate_objective(const std::vector<double>& x) const {
  double v = objective_constant;
  for (std::size_t j = 0; j < objective.size(); ++j) v += objective[j] * x[j];
  return v;
}

double ModelSpec::evaluate_row(const Row& row,
                               const std::vector<double>& x) const {
  double v = 0.0;
  for (const auto& t : row.terms) v += t.coef * x[t.var];
  return v;
}

double ModelSpec::max_violation(const std::vector<double>& x,
                                bool check_integrality) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < num_vars(); ++j) {
    worst = std::max(worst, lower[j] - x[j]);
    worst = std::max(worst, x[j] - upper[j]);
    if (check_integrality && integer[j]) {
      worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
    }
  }
  for (const auto& row : rows) {
    const double lhs = evaluate_row(row, x);
    switch (row.sense) {
      case Sense::kLessEqual:
        worst = std::max(worst, lhs - row.rhs);
        break;
      case Sense::kGreaterEqual:
        worst = std::max(worst, row.rhs - lhs);
        break;
      case Sense::kEqual:
        worst = std::max(worst, std::abs(lhs - row.rhs));
        break;
    }
  }
  for (const auto& cone : cones) {
    double norm2 = 0.0;
    for (std::size_t k = 1; k < cone.members.size(); ++k) {
      const double v = evaluate(cone.members[k], x);
      norm2 += v * v;
    }
    worst = std::max(worst, std::sqrt(norm2) - evaluate(cone.members[0], x));
  }
  return worst;
}

void ModelSpec::check_well_formed() const {
  const auto n = static_cast<int>(num_vars());
  if (upper.size() != lower.size() || integer.size() != lower.size() ||
      objective.size() != lower.size()) {
    throw std::invalid_argument("model spec: inconsistent variable arrays");
  }
  auto check_terms = [n](const std::vector<LinearTerm>& terms) {
    for (const auto& t : terms) {
      if (t.var < 0 || t.var >= n) {
        throw std::invalid_argument("model spec: undefined variable id " +
                                    std::to_string(t.var));
      }
    }
  };
  for (const auto& row : rows) check_terms(row.terms);
  for (const auto& cone : cones) {
    if (cone.members.size() < 2) {
      throw std::invalid_argument("model spec: cone row needs >= 2 members");
    }
    for (const auto& m : cone.members) check_terms(m.terms);
  }
}

}  // namespace pioia
