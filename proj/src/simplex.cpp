#include "pioia/simplex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pioia {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration_limit";
    case LpStatus::kTimeLimit: return "time_limit";
    case LpStatus::kNumericError: return "numeric_error";
  }
  return "unknown";
}

DenseSimplex::DenseSimplex(const LpProblem& lp)
    : n_(lp.num_cols()), m_(lp.num_rows()), cols_(n_ + m_), rows_(lp.rows) {
  if (lp.col_lower.size() != lp.cost.size() ||
      lp.col_upper.size() != lp.cost.size() ||
      lp.row_lower.size() != lp.rows.size() ||
      lp.row_upper.size() != lp.rows.size()) {
    throw std::invalid_argument("simplex: inconsistent problem dimensions");
  }
  cost_.assign(cols_, 0.0);
  lower_.assign(cols_, 0.0);
  upper_.assign(cols_, 0.0);
  value_.assign(cols_, 0.0);
  state_.assign(cols_, NonbasicState::kAtLower);
  position_.assign(cols_, -1);
  basis_.assign(m_, 0);
  double cmax = 1.0;
  for (int j = 0; j < n_; ++j) {
    cost_[j] = lp.cost[j];
    lower_[j] = lp.col_lower[j];
    upper_[j] = lp.col_upper[j];
    cmax = std::max(cmax, std::abs(cost_[j]));
  }
  dual_tolerance_ = 1e-9 * cmax;
  for (int i = 0; i < m_; ++i) {
    lower_[n_ + i] = lp.row_lower[i];
    upper_[n_ + i] = lp.row_upper[i];
  }
  tableau_.assign(static_cast<std::size_t>(m_) * cols_, 0.0);
  for (int i = 0; i < m_; ++i) {
    for (const auto& t : rows_[i]) at(i, t.var) -= t.coef;
    at(i, n_ + i) = 1.0;
    basis_[i] = n_ + i;
    position_[n_ + i] = i;
    state_[n_ + i] = NonbasicState::kBasic;
  }
  for (int j = 0; j < n_; ++j) {
    const bool lo = std::isfinite(lower_[j]);
    const bool hi = std::isfinite(upper_[j]);
    if (lo && (cost_[j] >= 0.0 || !hi)) {
      state_[j] = NonbasicState::kAtLower;
      value_[j] = lower_[j];
    } else if (hi) {
      state_[j] = NonbasicState::kAtUpper;
      value_[j] = upper_[j];
    } else {
      state_[j] = NonbasicState::kFree;
      value_[j] = 0.0;
    }
  }
  recompute_basic_values();
  dj_ = cost_;
}

double DenseSimplex::objective() const {
  double v = 0.0;
  for (int j = 0; j < n_; ++j) v += cost_[j] * value_[j];
  return v;
}

std::vector<double> DenseSimplex::primal() const {
  return std::vector<double>(value_.begin(), value_.begin() + n_);
}

std::vector<double> DenseSimplex::row_duals() const {
  std::vector<double> y(m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    if (state_[n_ + i] != NonbasicState::kBasic) y[i] = dj_[n_ + i];
  }
  return y;
}

std::vector<double> DenseSimplex::reduced_costs() const {
  return std::vector<double>(dj_.begin(), dj_.begin() + n_);
}

double DenseSimplex::infeasibility(int j) const {
  return std::max({lower_[j] - value_[j], value_[j] - upper_[j], 0.0});
}

void DenseSimplex::move_entering(int col, double step) {
  if (step == 0.0) return;
  value_[col] += step;
  for (int i = 0; i < m_; ++i) {
    const double a = at(i, col);
    if (a != 0.0) value_[basis_[i]] -= a * step;
  }
}

void DenseSimplex::place_nonbasic(int j) {
  if (state_[j] == NonbasicState::kBasic) return;
  const bool lo = std::isfinite(lower_[j]);
  const bool hi = std::isfinite(upper_[j]);
  double target = 0.0;
  NonbasicState s = NonbasicState::kFree;
  if (state_[j] == NonbasicState::kAtUpper && hi) {
    target = upper_[j];
    s = NonbasicState::kAtUpper;
  } else if (lo) {
    target = lower_[j];
    s = NonbasicState::kAtLower;
  } else if (hi) {
    target = upper_[j];
    s = NonbasicState::kAtUpper;
  }
  state_[j] = s;
  move_entering(j, target - value_[j]);
  value_[j] = target;
}

void DenseSimplex::set_col_bounds(int col, double lower, double upper) {
  lower_[col] = lower;
  upper_[col] = upper;
  place_nonbasic(col);
}

void DenseSimplex::add_rows(const std::vector<std::vector<LinearTerm>>& rows,
                            const std::vector<double>& row_lower,
                            const std::vector<double>& row_upper) {
  const int k = static_cast<int>(rows.size());
  if (k == 0) return;
  const int new_m = m_ + k;
  const int new_cols = n_ + new_m;
  std::vector<double> t(static_cast<std::size_t>(new_m) * new_cols, 0.0);
  for (int i = 0; i < m_; ++i) {
    std::copy_n(&tableau_[static_cast<std::size_t>(i) * cols_], cols_,
                &t[static_cast<std::size_t>(i) * new_cols]);
  }
  for (int r = 0; r < k; ++r) {
    double* row = &t[static_cast<std::size_t>(m_ + r) * new_cols];
    for (const auto& term : rows[r]) row[term.var] -= term.coef;
    row[n_ + m_ + r] = 1.0;
    for (const auto& term : rows[r]) {
      const int p = position_[term.var];
      const double f = row[term.var];
      if (p < 0 || f == 0.0) continue;
      const double* src = &t[static_cast<std::size_t>(p) * new_cols];
      for (int j = 0; j < new_cols; ++j) row[j] -= f * src[j];
      row[term.var] = 0.0;
    }
  }
  tableau_ = std::move(t);
  cols_ = new_cols;
  for (int r = 0; r < k; ++r) {
    rows_.push_back(rows[r]);
    double activity = 0.0;
    for (const auto& term : rows[r]) activity += term.coef * value_[term.var];
    cost_.push_back(0.0);
    dj_.push_back(0.0);
    lower_.push_back(row_lower[r]);
    upper_.push_back(row_upper[r]);
    value_.push_back(activity);
    state_.push_back(NonbasicState::kBasic);
    position_.push_back(m_ + r);
    basis_.push_back(n_ + m_ + r);
  }
  m_ = new_m;
}

void DenseSimplex::pivot(int row, int col) {
  double* pr = &tableau_[static_cast<std::size_t>(row) * cols_];
  const double inv = 1.0 / pr[col];
  std::vector<int> nz;
  nz.reserve(cols_);
  for (int j = 0; j < cols_; ++j) {
    if (pr[j] != 0.0) {
      pr[j] *= inv;
      if (std::abs(pr[j]) < 1e-14) {
        pr[j] = 0.0;
      } else {
        nz.push_back(j);
      }
    }
  }
  pr[col] = 1.0;
  for (int i = 0; i < m_; ++i) {
    if (i == row) continue;
    double* ri = &tableau_[static_cast<std::size_t>(i) * cols_];
    const double f = ri[col];
    if (f == 0.0) continue;
    for (int j : nz) ri[j] -= f * pr[j];
    ri[col] = 0.0;
  }
  const double fd = dj_[col];
  if (fd != 0.0) {
    for (int j : nz) dj_[j] -= fd * pr[j];
  }
  dj_[col] = 0.0;
  const int leaving = basis_[row];
  position_[leaving] = -1;
  basis_[row] = col;
  position_[col] = row;
  state_[col] = NonbasicState::kBasic;
  ++iterations_;
  if (++pivots_since_refactor_ > std::max(100, m_)) refactor();
}

void DenseSimplex::recompute_basic_values() {
  for (int i = 0; i < m_; ++i) {
    const double* ri = &tableau_[static_cast<std::size_t>(i) * cols_];
    double v = 0.0;
    for (int j = 0; j < cols_; ++j) {
      if (state_[j] != NonbasicState::kBasic && ri[j] != 0.0) {
        v -= ri[j] * value_[j];
      }
    }
    value_[basis_[i]] = v;
  }
}

void DenseSimplex::recompute_reduced_costs() {
  dj_ = cost_;
  for (int i = 0; i < m_; ++i) {
    const double cb = cost_[basis_[i]];
    if (cb == 0.0) continue;
    const double* ri = &tableau_[static_cast<std::size_t>(i) * cols_];
    for (int j = 0; j < cols_; ++j) dj_[j] -= cb * ri[j];
  }
  for (int i = 0; i < m_; ++i) dj_[basis_[i]] = 0.0;
}

void DenseSimplex::refactor() {
  pivots_since_refactor_ = 0;
  if (m_ == 0) return;
  Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(m_, m_);
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(m_, cols_);
  for (int i = 0; i < m_; ++i) {
    for (const auto& t : rows_[i]) full(i, t.var) += t.coef;
    full(i, n_ + i) = -1.0;
  }
  for (int i = 0; i < m_; ++i) basis_matrix.col(i) = full.col(basis_[i]);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
  Eigen::MatrixXd t = lu.solve(full);
  if (!t.allFinite()) return;
  for (int i = 0; i < m_; ++i) {
    double* ri = &tableau_[static_cast<std::size_t>(i) * cols_];
    for (int j = 0; j < cols_; ++j) {
      const double v = t(i, j);
      ri[j] = std::abs(v) < 1e-14 ? 0.0 : v;
    }
    for (int k = 0; k < m_; ++k) ri[basis_[k]] = (k == i) ? 1.0 : 0.0;
  }
  recompute_basic_values();
  recompute_reduced_costs();
}

bool DenseSimplex::dual_feasible() const {
  for (int j = 0; j < cols_; ++j) {
    if (lower_[j] == upper_[j]) continue;
    switch (state_[j]) {
      case NonbasicState::kBasic: break;
      case NonbasicState::kAtLower:
        if (dj_[j] < -dual_tolerance_) return false;
        break;
      case NonbasicState::kAtUpper:
        if (dj_[j] > dual_tolerance_) return false;
        break;
      case NonbasicState::kFree:
        if (std::abs(dj_[j]) > dual_tolerance_) return false;
        break;
    }
  }
  return true;
}

LpStatus DenseSimplex::primal_loop(Clock::time_point deadline) {
  std::vector<double> phase_cost(m_, 0.0);
  std::vector<double> d1(cols_, 0.0);
  int degenerate = 0;
  bool bland = false;
  long local = 0;
  while (true) {
    if (++local > iteration_limit) return LpStatus::kIterationLimit;
    if ((local & 63) == 0 && Clock::now() > deadline) {
      return LpStatus::kTimeLimit;
    }
    bool phase_one = false;
    for (int i = 0; i < m_; ++i) {
      const int b = basis_[i];
      phase_cost[i] = 0.0;
      if (value_[b] < lower_[b] - primal_tolerance) {
        phase_cost[i] = -1.0;
        phase_one = true;
      } else if (value_[b] > upper_[b] + primal_tolerance) {
        phase_cost[i] = 1.0;
        phase_one = true;
      }
    }
    const std::vector<double>* d = &dj_;
    double dtol = dual_tolerance_;
    if (phase_one) {
      std::fill(d1.begin(), d1.end(), 0.0);
      for (int i = 0; i < m_; ++i) {
        if (phase_cost[i] == 0.0) continue;
        const double* ri = &tableau_[static_cast<std::size_t>(i) * cols_];
        for (int j = 0; j < cols_; ++j) d1[j] -= phase_cost[i] * ri[j];
      }
      d = &d1;
      dtol = 1e-11;
    }
    // Pricing.
    int enter = -1;
    int dir = 0;
    double best = 0.0;
    for (int j = 0; j < cols_; ++j) {
      const NonbasicState s = state_[j];
      if (s == NonbasicState::kBasic || lower_[j] == upper_[j]) continue;
      const double dj = (*d)[j];
      int cand = 0;
      if (dj < -dtol && s != NonbasicState::kAtUpper) cand = 1;
      if (dj > dtol && s != NonbasicState::kAtLower) cand = -1;
      if (cand == 0) continue;
      if (bland) {
        enter = j;
        dir = cand;
        break;
      }
      if (std::abs(dj) > best) {
        best = std::abs(dj);
        enter = j;
        dir = cand;
      }
    }
    if (enter < 0) {
      return phase_one ? LpStatus::kInfeasible : LpStatus::kOptimal;
    }
    // Harris ratio test.
    double theta_max = kInf;
    for (int i = 0; i < m_; ++i) {
      const double alpha = at(i, enter);
      if (std::abs(alpha) <= pivot_tolerance) continue;
      const double delta = -alpha * dir;
      const int b = basis_[i];
      double dist = kInf;
      if (phase_one && phase_cost[i] < 0.0) {
        if (delta > 0.0) dist = lower_[b] - value_[b];
      } else if (phase_one && phase_cost[i] > 0.0) {
        if (delta < 0.0) dist = value_[b] - upper_[b];
      } else if (delta < 0.0) {
        dist = value_[b] - lower_[b];
      } else {
        dist = upper_[b] - value_[b];
      }
      if (!std::isfinite(dist)) continue;
      theta_max = std::min(theta_max, (std::max(dist, 0.0) + primal_tolerance) /
                                          std::abs(delta));
    }
    int leave_row = -1;
    double theta = kInf;
    double best_alpha = 0.0;
    bool leave_to_lower = true;
    if (std::isfinite(theta_max)) {
      for (int i = 0; i < m_; ++i) {
        const double alpha = at(i, enter);
        if (std::abs(alpha) <= pivot_tolerance) continue;
        const double delta = -alpha * dir;
        const int b = basis_[i];
        double dist = kInf;
        bool to_lower = true;
        if (phase_one && phase_cost[i] < 0.0) {
          if (delta > 0.0) dist = lower_[b] - value_[b];
        } else if (phase_one && phase_cost[i] > 0.0) {
          if (delta < 0.0) {
            dist = value_[b] - upper_[b];
            to_lower = false;
          }
        } else if (delta < 0.0) {
          dist = value_[b] - lower_[b];
        } else {
          dist = upper_[b] - value_[b];
          to_lower = false;
        }
        if (!std::isfinite(dist)) continue;
        const double ratio = std::max(dist, 0.0) / std::abs(delta);
        if (ratio > theta_max) continue;
        const bool better = bland ? (leave_row < 0 || ratio < theta - 1e-15 ||
                                     (ratio <= theta + 1e-15 && b < basis_[leave_row]))
                                  : std::abs(alpha) > best_alpha;
        if (better) {
          best_alpha = std::abs(alpha);
          leave_row = i;
          theta = ratio;
          leave_to_lower = to_lower;
        }
      }
    }
    const double flip = upper_[enter] - lower_[enter];
    if (std::isfinite(flip) && (leave_row < 0 || flip <= theta)) {
      move_entering(enter, dir * flip);
      state_[enter] = dir > 0 ? NonbasicState::kAtUpper : NonbasicState::kAtLower;
      value_[enter] = dir > 0 ? upper_[enter] : lower_[enter];
      degenerate = 0;
      bland = false;
      continue;
    }
    if (leave_row < 0) {
      return phase_one ? LpStatus::kNumericError : LpStatus::kUnbounded;
    }
    move_entering(enter, dir * theta);
    const int leaving = basis_[leave_row];
    value_[leaving] = leave_to_lower ? lower_[leaving] : upper_[leaving];
    pivot(leave_row, enter);
    state_[leaving] = leave_to_lower ? NonbasicState::kAtLower
                                     : NonbasicState::kAtUpper;
    if (theta < 1e-12) {
      if (++degenerate > 50) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
  }
}

LpStatus DenseSimplex::dual_loop(Clock::time_point deadline) {
  long local = 0;
  int degenerate = 0;
  bool bland = false;
  while (true) {
    if (++local > iteration_limit) return LpStatus::kIterationLimit;
    if ((local & 63) == 0 && Clock::now() > deadline) {
      return LpStatus::kTimeLimit;
    }
    int leave_row = -1;
    double worst = primal_tolerance;
    for (int i = 0; i < m_; ++i) {
      const double inf = infeasibility(basis_[i]);
      if (inf <= primal_tolerance) continue;
      if (bland) {
        if (leave_row < 0 || basis_[i] < basis_[leave_row]) leave_row = i;
      } else if (inf > worst) {
        worst = inf;
        leave_row = i;
      }
    }
    if (leave_row < 0) return LpStatus::kOptimal;
    const int b = basis_[leave_row];
    const bool increase = value_[b] < lower_[b];
    const double target = increase ? lower_[b] : upper_[b];
    const double* pr = &tableau_[static_cast<std::size_t>(leave_row) * cols_];
    // Two-pass Harris ratio test on the reduced costs.
    auto slack_of = [&](int j) {
      switch (state_[j]) {
        case NonbasicState::kAtLower: return std::max(dj_[j], 0.0);
        case NonbasicState::kAtUpper: return std::max(-dj_[j], 0.0);
        default: return std::abs(dj_[j]);
      }
    };
    auto eligible = [&](int j) {
      if (state_[j] == NonbasicState::kBasic || lower_[j] == upper_[j]) {
        return false;
      }
      const double alpha = pr[j];
      if (std::abs(alpha) <= pivot_tolerance) return false;
      // Moving j by theta changes value_[b] by -alpha * theta.
      const double want = increase ? 1.0 : -1.0;
      switch (state_[j]) {
        case NonbasicState::kAtLower: return -alpha * want > 0.0;
        case NonbasicState::kAtUpper: return alpha * want > 0.0;
        default: return true;
      }
    };
    double ratio_max = kInf;
    for (int j = 0; j < cols_; ++j) {
      if (!eligible(j)) continue;
      ratio_max = std::min(ratio_max,
                           (slack_of(j) + dual_tolerance_) / std::abs(pr[j]));
    }
    if (!std::isfinite(ratio_max)) return LpStatus::kInfeasible;
    int enter = -1;
    double best_alpha = 0.0;
    double ratio_enter = 0.0;
    for (int j = 0; j < cols_; ++j) {
      if (!eligible(j)) continue;
      const double ratio = slack_of(j) / std::abs(pr[j]);
      if (ratio > ratio_max) continue;
      if (bland ? enter < 0 : std::abs(pr[j]) > best_alpha) {
        best_alpha = std::abs(pr[j]);
        enter = j;
        ratio_enter = ratio;
      }
    }
    if (enter < 0) return LpStatus::kInfeasible;
    const double step = (target - value_[b]) / (-pr[enter]);
    move_entering(enter, step);
    value_[b] = target;
    pivot(leave_row, enter);
    state_[b] = increase ? NonbasicState::kAtLower : NonbasicState::kAtUpper;
    if (lower_[b] == upper_[b]) state_[b] = NonbasicState::kAtLower;
    if (ratio_enter < 1e-12) {
      if (++degenerate > 50) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
  }
}

LpStatus DenseSimplex::solve(Clock::time_point deadline) {
  for (int attempt = 0; attempt < 4; ++attempt) {
    bool primal_infeasible = false;
    for (int i = 0; i < m_; ++i) {
      if (infeasibility(basis_[i]) > primal_tolerance) {
        primal_infeasible = true;
        break;
      }
    }
    LpStatus status = LpStatus::kOptimal;
    if (primal_infeasible && dual_feasible()) {
      status = dual_loop(deadline);
      // A dual ray is confirmed by primal phase one below.
      if (status == LpStatus::kOptimal || status == LpStatus::kInfeasible) {
        status = primal_loop(deadline);
      }
    } else {
      status = primal_loop(deadline);
    }
    if (status != LpStatus::kOptimal) {
      // an infeasibility verdict from a drifted tableau is not trusted until
      // it repeats on a fresh factorisation
      if (status == LpStatus::kNumericError ||
          (status == LpStatus::kInfeasible && pivots_since_refactor_ > 0)) {
        refactor();
        continue;
      }
      return status;
    }
    recompute_basic_values();
    recompute_reduced_costs();
    bool ok = dual_feasible();
    for (int i = 0; ok && i < m_; ++i) {
      if (infeasibility(basis_[i]) > 10 * primal_tolerance) ok = false;
    }
    if (ok) return LpStatus::kOptimal;
    refactor();
  }
  return LpStatus::kNumericError;
}

}  // namespace pioia
