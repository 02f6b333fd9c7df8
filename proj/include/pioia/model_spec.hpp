// Solver-agnostic description of an LP / MILP / SOCP.
//
// A ModelSpec is a flat container: variables with bounds and an integrality
// flag, linear rows `sum(coef * var) {<=,>=,=} rhs`, cone rows
// `members[0] >= || members[1..] ||_2` over affine expressions, and a linear
// objective to be minimized. Builders in formulation.hpp produce these; the
// backends in solver.hpp consume them.

#ifndef PIOIA_MODEL_SPEC_HPP_
#define PIOIA_MODEL_SPEC_HPP_

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace pioia {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LinearTerm {
  int var = 0;
  double coef = 0.0;
};

enum class Sense { kLessEqual, kGreaterEqual, kEqual };

// Row families, used for bookkeeping (row counts, duals lookup, debugging).
enum class RowKind {
  kLogic,        // y - z = u_t - u_{t-1}, y + z <= 1
  kMinUpDown,    // initial / minimum up and down time rows
  kDispatch,     // output, available-output and reactive bounds
  kRamp,
  kReserve,
  kFlow,         // flow definitions in terms of (c, s)
  kBalance,
  kEpigraph,     // psi_t >= period dispatch + penalty cost
  kCoupling,     // p = anchor (time-block subproblems)
  kSocCut,
  kCapCut,
  kBendersCut,
  kOther,
};

struct Row {
  std::vector<LinearTerm> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
  RowKind kind = RowKind::kOther;
};

struct AffineExpr {
  std::vector<LinearTerm> terms;
  double constant = 0.0;
};

// members[0] >= || (members[1], ..., members[k]) ||_2
struct ConeRow {
  std::vector<AffineExpr> members;
};

struct ModelSpec {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> integer;
  std::vector<double> objective;
  double objective_constant = 0.0;
  std::vector<Row> rows;
  std::vector<ConeRow> cones;

  std::size_t num_vars() const { return lower.size(); }
  std::size_t num_rows() const { return rows.size(); }

  int add_variable(double lb, double ub, double cost = 0.0,
                   bool is_integer = false);
  std::size_t add_row(Row row);

  bool has_integers() const;
  std::vector<int> integer_ids() const;
  std::size_t count_rows(RowKind kind) const;

  double evaluate_objective(const std::vector<double>& x) const;
  double evaluate_row(const Row& row, const std::vector<double>& x) const;
  // Largest bound, row, cone or integrality violation of `x` (0 if feasible).
  double max_violation(const std::vector<double>& x,
                       bool check_integrality = true) const;

  // Throws std::invalid_argument if a row or cone references an undefined
  // variable id or the bound vectors disagree in size.
  void check_well_formed() const;
};

double evaluate(const AffineExpr& expr, const std::vector<double>& x);

}  // namespace pioia

#endif  // PIOIA_MODEL_SPEC_HPP_
