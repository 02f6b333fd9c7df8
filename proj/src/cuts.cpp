#include "pioia/cuts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pioia {

const char* to_string(CutKind kind) {
  switch (kind) {
    case CutKind::kSoc: return "soc";
    case CutKind::kCap: return "cap";
    case CutKind::kBenders: return "benders";
  }
  return "?";
}

double Cut::violation(const std::vector<double>& x) const {
  double lhs = 0.0;
  for (const auto& term : coeffs) lhs += term.coef * x[term.var];
  return lhs - rhs;
}

Row Cut::to_row() const {
  RowKind rk = RowKind::kSocCut;
  if (kind == CutKind::kCap) rk = RowKind::kCapCut;
  if (kind == CutKind::kBenders) rk = RowKind::kBendersCut;
  return Row{coeffs, Sense::kLessEqual, rhs, rk};
}

Cut make_cut(CutKind kind, std::vector<LinearTerm> coeffs, double rhs, CutOrigin origin) {
  std::sort(coeffs.begin(), coeffs.end(),
            [](const LinearTerm& a, const LinearTerm& b) { return a.var < b.var; });
  std::vector<LinearTerm> merged;
  for (const auto& term : coeffs) {
    if (!merged.empty() && merged.back().var == term.var) {
      merged.back().coef += term.coef;
    } else {
      merged.push_back(term);
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const LinearTerm& t) { return t.coef == 0.0; }),
               merged.end());
  double norm = 0.0;
  for (const auto& term : merged) norm += term.coef * term.coef;
  norm = std::sqrt(norm);
  if (merged.empty() || !(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("cut: coefficient vector is empty or zero");
  }
  Cut cut;
  cut.kind = kind;
  cut.coeffs = std::move(merged);
  cut.rhs = rhs;
  cut.origin = std::move(origin);
  for (const auto& term : cut.coeffs) cut.unit_direction.push_back(term.coef / norm);
  return cut;
}

double cut_cosine(const Cut& a, const Cut& b) {
  double dot = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.coeffs.size() && j < b.coeffs.size()) {
    if (a.coeffs[i].var == b.coeffs[j].var) {
      dot += a.unit_direction[i++] * b.unit_direction[j++];
    } else if (a.coeffs[i].var < b.coeffs[j].var) {
      ++i;
    } else {
      ++j;
    }
  }
  return dot;
}

Cut line_capacity_cut(int p_id, int q_id, double pbar, double qbar, double s_max,
                      CutOrigin origin) {
  const double r = std::hypot(pbar, qbar);
  if (!(pbar * pbar + qbar * qbar > s_max * s_max)) {
    throw std::invalid_argument("capacity cut: point is not violated");
  }
  return make_cut(CutKind::kCap, {{p_id, pbar}, {q_id, qbar}}, s_max * r, std::move(origin));
}

Cut soc_cut(const SocIds& ids, double c, double s, double cnn, double cmm,
            SocCutNorm norm, CutOrigin origin) {
  if (!(soc_residual(c, s, cnn, cmm) > 0.0)) {
    throw std::invalid_argument("soc cut: point is not violated");
  }
  const double d = cnn - cmm;
  const double n0 = norm == SocCutNorm::kSupporting
                        ? std::sqrt(4 * c * c + 4 * s * s + d * d)
                        : std::sqrt(4 * c * c + 4 * s * s + cnn * cnn + cmm * cmm);
  return make_cut(CutKind::kSoc,
                  {{ids.c_nm, 4 * c}, {ids.s_nm, 4 * s}, {ids.c_nn, d - n0}, {ids.c_mm, -(d + n0)}},
                  0.0, std::move(origin));
}

std::vector<LineKey> select_violated(const std::vector<KeyedResidual>& residuals,
                                     double eps_tol, double p_cut) {
  if (!(p_cut > 0.0 && p_cut <= 1.0)) {
    throw std::invalid_argument("select_violated: p_cut must lie in (0, 1]");
  }
  std::vector<KeyedResidual> hit;
  for (const auto& r : residuals) {
    if (r.value > eps_tol) hit.push_back(r);
  }
  std::sort(hit.begin(), hit.end(), [](const KeyedResidual& a, const KeyedResidual& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.key < b.key;
  });
  // 0.55 * 100 is 55.000000000000007 in binary; shave the rounding noise.
  const double want = p_cut * static_cast<double>(hit.size());
  const auto keep = static_cast<std::size_t>(std::ceil(want - 1e-9 * std::max(1.0, want)));
  hit.resize(std::min(hit.size(), keep));
  std::vector<LineKey> keys;
  for (const auto& r : hit) keys.push_back(r.key);
  return keys;
}

bool CutPool::try_add(const Cut& cut) {
  auto& slot = by_key_[{static_cast<int>(cut.kind), cut.origin.key}];
  for (std::size_t id : slot) {
    if (cut_cosine(cut, cuts_[id]) > 1.0 - eps_par_) return false;
  }
  slot.push_back(cuts_.size());
  cuts_.push_back(cut);
  return true;
}

std::size_t CutPool::count(CutKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(cuts_.begin(), cuts_.end(), [kind](const Cut& c) { return c.kind == kind; }));
}

double CutPool::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (const auto& c : cuts_) worst = std::max(worst, c.violation(x));
  return worst;
}

void CutPool::append_rows(ModelSpec* spec, std::size_t from) const {
  for (std::size_t i = from; i < cuts_.size(); ++i) spec->add_row(cuts_[i].to_row());
}

}  // namespace pioia
