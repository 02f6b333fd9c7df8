// Linear cuts for the two conic families and the time-block Benders cuts,
// plus the pool that filters near-parallel duplicates.
//
// Every cut is stored as  sum(coeffs) <= rhs.

#ifndef PIOIA_CUTS_HPP_
#define PIOIA_CUTS_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pioia/formulation.hpp"
#include "pioia/model_spec.hpp"

namespace pioia {

enum class CutKind { kSoc, kCap, kBenders };
const char* to_string(CutKind kind);

struct CutOrigin {
  LineKey key;        // benders: line = -1, dir = 0, t = period
  int iteration = 0;
  std::string stage;  // "lp", "ig", "oia"
};

struct Cut {
  CutKind kind = CutKind::kSoc;
  std::vector<LinearTerm> coeffs;       // sorted by variable id
  double rhs = 0.0;
  std::vector<double> unit_direction;   // coeffs / ||coeffs||, same order
  CutOrigin origin;

  // lhs - rhs at x (positive means violated).
  double violation(const std::vector<double>& x) const;
  Row to_row() const;
};

// Sorts terms, merges duplicates, fills unit_direction. Throws
// std::invalid_argument on an empty or zero coefficient vector.
Cut make_cut(CutKind kind, std::vector<LinearTerm> coeffs, double rhs,
             CutOrigin origin = {});

// Cosine of the angle between two cuts' directions (ids matched).
double cut_cosine(const Cut& a, const Cut& b);

// pbar p + qbar q <= S ||(pbar, qbar)||. Throws std::invalid_argument unless
// pbar^2 + qbar^2 > S^2.
Cut line_capacity_cut(int p_id, int q_id, double pbar, double qbar, double s_max,
                      CutOrigin origin = {});

// Normaliser of the conic cut.
//   kSupporting  n0 = ||(2c, 2s, c_nn - c_mm)||: supporting hyperplane of the
//                rotated cone, separates every violated point.
//   kLiteral     n0 = ||(2c, 2s, c_nn, c_mm)||: also valid but weaker; may
//                fail to cut off a slightly violated point.
enum class SocCutNorm { kSupporting, kLiteral };

struct SocIds {
  int c_nm, s_nm, c_nn, c_mm;
};

// 4c c_nm + 4s s_nm + (c_nn - c_mm - n0) c_nn - (c_nn - c_mm + n0) c_mm <= 0.
// Throws std::invalid_argument unless c^2 + s^2 > c_nn c_mm.
Cut soc_cut(const SocIds& ids, double c_nm, double s_nm, double c_nn, double c_mm,
            SocCutNorm norm = SocCutNorm::kSupporting, CutOrigin origin = {});

// Keys with residual > eps_tol, largest first (ties by key order), cut to
// ceil(p_cut * count). Throws std::invalid_argument unless 0 < p_cut <= 1.
std::vector<LineKey> select_violated(const std::vector<KeyedResidual>& residuals,
                                     double eps_tol, double p_cut);

class CutPool {
 public:
  explicit CutPool(double eps_par = 5e-6) : eps_par_(eps_par) {}

  // Stores the cut unless an earlier cut of the same kind and key has
  // cosine > 1 - eps_par with it.
  bool try_add(const Cut& cut);

  const std::vector<Cut>& cuts() const { return cuts_; }
  std::size_t count(CutKind kind) const;
  std::size_t size() const { return cuts_.size(); }
  double eps_par() const { return eps_par_; }
  // Largest violation of any pooled cut at x (0 when all hold).
  double max_violation(const std::vector<double>& x) const;
  // Appends every pooled cut (from position `from` on) as a row.
  void append_rows(ModelSpec* spec, std::size_t from = 0) const;

 private:
  double eps_par_;
  std::vector<Cut> cuts_;
  std::map<std::pair<int, LineKey>, std::vector<std::size_t>> by_key_;
};

}  // namespace pioia

#endif  // PIOIA_CUTS_HPP_
