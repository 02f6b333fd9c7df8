// Primal-dual interior-point method for linear programs over products of the
// nonnegative orthant and second-order cones:
//
//   min c'x   s.t.  A x = b,   G x + s = h,   s in K
//
// K = R^l_+ x Q^{q_1} x ... x Q^{q_k}, Q^q = { (t, v) : t >= ||v||_2 }.
// The solver runs on the homogeneous self-dual embedding with Nesterov-Todd
// scaling and a Mehrotra predictor-corrector, so infeasible and unbounded
// problems end with a certificate instead of diverging. The KKT system is
// factorized with a sparse LDL' on a statically regularized quasidefinite
// matrix followed by iterative refinement.

#ifndef PIOIA_CONIC_IPM_HPP_
#define PIOIA_CONIC_IPM_HPP_

#include <vector>

#include "pioia/model_spec.hpp"

namespace pioia {

struct ConicProblem {
  int num_vars = 0;
  std::vector<double> c;
  std::vector<std::vector<LinearTerm>> a_rows;
  std::vector<double> b;
  // First `orthant_dim` rows belong to the orthant, the remaining rows are
  // consecutive cone blocks of sizes `cone_dims`.
  std::vector<std::vector<LinearTerm>> g_rows;
  std::vector<double> h;
  int orthant_dim = 0;
  std::vector<int> cone_dims;
};

enum class ConicStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit,
                         kNumericError };

const char* to_string(ConicStatus status);

struct ConicResult {
  ConicStatus status = ConicStatus::kNumericError;
  std::vector<double> x, y, s, z;
  double primal_objective = kInf;
  double dual_objective = -kInf;
  int iterations = 0;
  bool reduced_accuracy = false;
};

struct ConicSettings {
  // tight on purpose: dual residuals are multiplied by penalty-sized costs
  // when a dual objective is used as a bound
  double feasibility_tolerance = 1e-12;
  // infeasibility and unboundedness certificates
  double certificate_tolerance = 1e-8;
  double absolute_tolerance = 1e-10;
  double relative_tolerance = 1e-10;
  // Accepted when the full tolerances cannot be reached.
  double inaccurate_tolerance = 1e-6;
  int max_iterations = 120;
  double regularization = 1e-9;
};

ConicResult solve_conic(const ConicProblem& problem,
                        const ConicSettings& settings = {});

}  // namespace pioia

#endif  // PIOIA_CONIC_IPM_HPP_
