// Dense bounded-variable simplex.
//
// Solves  min c'x  s.t.  row_lower <= A x <= row_upper,  lower <= x <= upper
// on an explicit tableau. Each row i gets a logical column s_i with
// A_i x - s_i = 0 and row bounds moved onto s_i, so every column is a
// bounded variable and the all-logical basis is always available.
//
// The object keeps its basis between calls: bounds may be changed and rows
// appended, after which `solve()` restarts from the current basis (dual
// simplex when the basis is still dual feasible). Copies are cheap enough
// for branch-and-bound snapshots at desk-scale sizes.

#ifndef PIOIA_SIMPLEX_HPP_
#define PIOIA_SIMPLEX_HPP_

#include <chrono>
#include <cstddef>
#include <vector>

#include "pioia/model_spec.hpp"

namespace pioia {

struct LpProblem {
  std::vector<double> cost;
  std::vector<double> col_lower;
  std::vector<double> col_upper;
  std::vector<std::vector<LinearTerm>> rows;
  std::vector<double> row_lower;
  std::vector<double> row_upper;

  int num_cols() const { return static_cast<int>(cost.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit,
                      kTimeLimit, kNumericError };

const char* to_string(LpStatus status);

class DenseSimplex {
 public:
  using Clock = std::chrono::steady_clock;

  explicit DenseSimplex(const LpProblem& lp);

  LpStatus solve(Clock::time_point deadline = Clock::time_point::max());

  void set_col_bounds(int col, double lower, double upper);
  // Appends rows row_lower <= a'x <= row_upper; the new logicals enter the
  // basis, so a previously optimal basis stays dual feasible.
  void add_rows(const std::vector<std::vector<LinearTerm>>& rows,
                const std::vector<double>& row_lower,
                const std::vector<double>& row_upper);

  int num_cols() const { return n_; }
  int num_rows() const { return m_; }
  double objective() const;
  std::vector<double> primal() const;
  // d(objective)/d(row bound) for each row; zero for rows whose logical is
  // basic.
  std::vector<double> row_duals() const;
  std::vector<double> reduced_costs() const;
  double col_lower(int col) const { return lower_[col]; }
  double col_upper(int col) const { return upper_[col]; }
  long iterations() const { return iterations_; }

  double primal_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  long iteration_limit = 200000;

 private:
  enum class NonbasicState { kBasic, kAtLower, kAtUpper, kFree };

  double& at(int i, int j) { return tableau_[static_cast<std::size_t>(i) * cols_ + j]; }
  double at(int i, int j) const { return tableau_[static_cast<std::size_t>(i) * cols_ + j]; }

  void place_nonbasic(int j);
  void pivot(int row, int col);
  void refactor();
  void recompute_basic_values();
  void recompute_reduced_costs();
  double infeasibility(int j) const;
  bool dual_feasible() const;
  LpStatus primal_loop(Clock::time_point deadline);
  LpStatus dual_loop(Clock::time_point deadline);
  void move_entering(int col, double step);

  int n_ = 0;     // structural columns
  int m_ = 0;     // rows == logical columns
  int cols_ = 0;  // n_ + m_
  std::vector<std::vector<LinearTerm>> rows_;
  std::vector<double> tableau_;
  std::vector<double> cost_;
  std::vector<double> dj_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> value_;
  std::vector<int> basis_;     // column basic in each row
  std::vector<int> position_;  // row of a basic column, -1 otherwise
  std::vector<NonbasicState> state_;
  double dual_tolerance_ = 1e-9;
  long iterations_ = 0;
  long pivots_since_refactor_ = 0;
};

}  // namespace pioia

#endif  // PIOIA_SIMPLEX_HPP_
