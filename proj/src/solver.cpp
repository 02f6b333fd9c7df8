#include "pioia/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <string>

#include "pioia/branch_and_bound.hpp"
#include "pioia/conic_ipm.hpp"
#include "pioia/simplex.hpp"

namespace pioia {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kGapReached: return "gap_reached";
    case SolveStatus::kTimeLimit: return "time_limit";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kNumericError: return "numeric_error";
  }
  return "unknown";
}

namespace {

constexpr double kFeasTol = 1e-9;

LpProblem to_lp(const ModelSpec& spec) {
  LpProblem lp;
  lp.cost = spec.objective;
  lp.col_lower = spec.lower;
  lp.col_upper = spec.upper;
  lp.rows.reserve(spec.rows.size());
  for (const auto& row : spec.rows) {
    lp.rows.push_back(row.terms);
    switch (row.sense) {
      case Sense::kLessEqual:
        lp.row_lower.push_back(-kInf);
        lp.row_upper.push_back(row.rhs);
        break;
      case Sense::kGreaterEqual:
        lp.row_lower.push_back(row.rhs);
        lp.row_upper.push_back(kInf);
        break;
      case Sense::kEqual:
        lp.row_lower.push_back(row.rhs);
        lp.row_upper.push_back(row.rhs);
        break;
    }
  }
  return lp;
}

SolveStatus from_lp(LpStatus st) {
  switch (st) {
    case LpStatus::kOptimal: return SolveStatus::kOptimal;
    case LpStatus::kInfeasible: return SolveStatus::kInfeasible;
    case LpStatus::kUnbounded: return SolveStatus::kUnbounded;
    case LpStatus::kTimeLimit: return SolveStatus::kTimeLimit;
    case LpStatus::kIterationLimit:
    case LpStatus::kNumericError: return SolveStatus::kNumericError;
  }
  return SolveStatus::kNumericError;
}

SolveOutcome solve_lp(const ModelSpec& spec) {
  SolveOutcome out;
  DenseSimplex simplex(to_lp(spec));
  const LpStatus st = simplex.solve();
  out.status = from_lp(st);
  out.iterations = simplex.iterations();
  if (st != LpStatus::kOptimal) {
    out.message = std::string("simplex: ") + to_string(st);
    return out;
  }
  out.primal = simplex.primal();
  out.objective = simplex.objective() + spec.objective_constant;
  out.dual_bound = out.objective;
  out.duals = simplex.row_duals();
  return out;
}

SolveOutcome solve_mip(const ModelSpec& spec, const SolveControls& controls) {
  if (!spec.cones.empty()) {
    throw std::invalid_argument("solve_mixed: cone rows are not supported");
  }
  if (controls.mip_gap < 0.0 || !(controls.time_limit > 0.0)) {
    throw std::invalid_argument("solve_mixed: invalid controls");
  }
  SolveOutcome out;
  MipOptions opt;
  opt.relative_gap = controls.mip_gap;
  const auto limit = std::chrono::duration<double>(
      std::min(controls.time_limit, 1e7));
  opt.deadline = std::chrono::steady_clock::now() +
                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(limit);
  if (controls.warm_start) {
    const auto& ws = *controls.warm_start;
    if (ws.size() != spec.num_vars()) {
      out.warnings.push_back("warm start has wrong size; ignored");
    } else if (spec.max_violation(ws, true) > 1e-6) {
      out.warnings.push_back("warm start infeasible; solving cold");
    } else {
      std::vector<double> x = ws;
      for (int j : spec.integer_ids()) x[j] = std::round(x[j]);
      opt.incumbent = x;
      opt.incumbent_objective = spec.evaluate_objective(x) - spec.objective_constant;
    }
  }
  const MipResult r = branch_and_bound(to_lp(spec), spec.integer_ids(), opt);
  out.status = r.status;
  out.nodes = r.nodes;
  out.iterations = r.lp_iterations;
  if (!r.x.empty()) {
    out.primal = r.x;
    out.objective = r.objective + spec.objective_constant;
  }
  if (std::isfinite(r.bound)) {
    out.dual_bound = r.bound + spec.objective_constant;
  }
  if (out.has_solution() && out.dual_bound > out.objective) {
    out.dual_bound = out.objective;
  }
  return out;
}

// Fixed variables are substituted out before the conic solve; rows and cones
// left without variables are checked and dropped.
struct Presolved {
  ModelSpec reduced;
  std::vector<int> new_id;      // -1 when fixed
  std::vector<double> fixed;    // value of fixed variables
  std::vector<int> kept_rows;   // original index of each reduced row
  bool infeasible = false;
};

Presolved presolve(const ModelSpec& spec) {
  Presolved ps;
  const std::size_t n = spec.num_vars();
  ps.new_id.assign(n, -1);
  ps.fixed.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (spec.lower[j] > spec.upper[j] + kFeasTol) {
      ps.infeasible = true;
      return ps;
    }
    if (spec.lower[j] == spec.upper[j]) {
      ps.fixed[j] = spec.lower[j];
      ps.reduced.objective_constant += spec.objective[j] * spec.lower[j];
    } else {
      ps.new_id[j] = ps.reduced.add_variable(spec.lower[j], spec.upper[j],
                                             spec.objective[j]);
    }
  }
  ps.reduced.objective_constant += spec.objective_constant;
  auto substitute = [&](const std::vector<LinearTerm>& terms,
                        std::vector<LinearTerm>* out) {
    double shift = 0.0;
    for (const auto& t : terms) {
      if (ps.new_id[t.var] >= 0) {
        out->push_back({ps.new_id[t.var], t.coef});
      } else {
        shift += t.coef * ps.fixed[t.var];
      }
    }
    return shift;
  };
  for (std::size_t i = 0; i < spec.rows.size(); ++i) {
    const Row& row = spec.rows[i];
    Row r;
    r.sense = row.sense;
    r.kind = row.kind;
    const double shift = substitute(row.terms, &r.terms);
    r.rhs = row.rhs - shift;
    if (r.terms.empty()) {
      const double tol = 1e-9 * (1.0 + std::abs(row.rhs));
      const bool ok = (row.sense == Sense::kLessEqual && r.rhs >= -tol) ||
                      (row.sense == Sense::kGreaterEqual && r.rhs <= tol) ||
                      (row.sense == Sense::kEqual && std::abs(r.rhs) <= tol);
      if (!ok) {
        ps.infeasible = true;
        return ps;
      }
      continue;
    }
    ps.reduced.add_row(std::move(r));
    ps.kept_rows.push_back(static_cast<int>(i));
  }
  for (const auto& cone : spec.cones) {
    ConeRow c;
    bool constant = true;
    for (const auto& m : cone.members) {
      AffineExpr e;
      e.constant = m.constant + substitute(m.terms, &e.terms);
      constant = constant && e.terms.empty();
      c.members.push_back(std::move(e));
    }
    if (constant) {
      double norm2 = 0.0;
      for (std::size_t k = 1; k < c.members.size(); ++k) {
        norm2 += c.members[k].constant * c.members[k].constant;
      }
      if (std::sqrt(norm2) > c.members[0].constant + 1e-9) {
        ps.infeasible = true;
        return ps;
      }
      continue;
    }
    ps.reduced.cones.push_back(std::move(c));
  }
  return ps;
}

std::vector<double> postsolve_primal(const Presolved& ps,
                                     const std::vector<double>& x) {
  std::vector<double> full(ps.new_id.size());
  for (std::size_t j = 0; j < full.size(); ++j) {
    full[j] = ps.new_id[j] >= 0 ? x[ps.new_id[j]] : ps.fixed[j];
  }
  return full;
}

// Row bookkeeping for the conic translation of a ModelSpec.
struct ConicMap {
  ConicProblem problem;
  // For each spec row: true if in A, and its index in A or G.
  std::vector<bool> in_a;
  std::vector<int> index;
  std::vector<double> sign;  // +1 for <= rows, -1 for >= rows
};

ConicMap to_conic(const ModelSpec& spec) {
  ConicMap map;
  ConicProblem& p = map.problem;
  const int n = static_cast<int>(spec.num_vars());
  p.num_vars = n;
  p.c = spec.objective;
  const std::size_t m = spec.rows.size();
  map.in_a.assign(m, false);
  map.index.assign(m, -1);
  map.sign.assign(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    const Row& row = spec.rows[i];
    if (row.sense == Sense::kEqual) {
      map.in_a[i] = true;
      map.index[i] = static_cast<int>(p.a_rows.size());
      p.a_rows.push_back(row.terms);
      p.b.push_back(row.rhs);
    } else {
      const double sgn = row.sense == Sense::kLessEqual ? 1.0 : -1.0;
      map.sign[i] = sgn;
      map.index[i] = static_cast<int>(p.g_rows.size());
      std::vector<LinearTerm> terms = row.terms;
      for (auto& t : terms) t.coef *= sgn;
      p.g_rows.push_back(std::move(terms));
      p.h.push_back(sgn * row.rhs);
    }
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(spec.lower[j])) {
      p.g_rows.push_back({{j, -1.0}});
      p.h.push_back(-spec.lower[j]);
    }
    if (std::isfinite(spec.upper[j])) {
      p.g_rows.push_back({{j, 1.0}});
      p.h.push_back(spec.upper[j]);
    }
  }
  p.orthant_dim = static_cast<int>(p.g_rows.size());
  // s = h - G x must equal the member expression: G = -terms, h = constant.
  for (const auto& cone : spec.cones) {
    for (const auto& member : cone.members) {
      std::vector<LinearTerm> terms = member.terms;
      for (auto& t : terms) t.coef = -t.coef;
      p.g_rows.push_back(std::move(terms));
      p.h.push_back(member.constant);
    }
    p.cone_dims.push_back(static_cast<int>(cone.members.size()));
  }
  return map;
}

SolveOutcome solve_with_ipm(const ModelSpec& spec) {
  SolveOutcome out;
  const Presolved ps = presolve(spec);
  if (ps.infeasible) {
    out.status = SolveStatus::kInfeasible;
    out.message = "presolve: fixed variables violate a row or cone";
    return out;
  }
  const ModelSpec& red = ps.reduced;
  std::vector<double> reduced_x;
  std::vector<double> reduced_duals(red.rows.size(), 0.0);
  double reduced_dual_objective = kInf;
  if (red.num_vars() == 0) {
    out.status = SolveStatus::kOptimal;
  } else {
    const ConicMap map = to_conic(red);
    const ConicResult r = solve_conic(map.problem);
    out.iterations = r.iterations;
    switch (r.status) {
      case ConicStatus::kOptimal: out.status = SolveStatus::kOptimal; break;
      case ConicStatus::kInfeasible: out.status = SolveStatus::kInfeasible; break;
      case ConicStatus::kUnbounded: out.status = SolveStatus::kUnbounded; break;
      default:
        out.status = SolveStatus::kNumericError;
        out.message = std::string("ipm: ") + to_string(r.status);
        break;
    }
    if (out.status != SolveStatus::kOptimal) return out;
    if (r.reduced_accuracy) out.warnings.push_back("ipm: reduced accuracy");
    reduced_x = r.x;
    reduced_dual_objective = r.dual_objective;
    for (std::size_t i = 0; i < red.rows.size(); ++i) {
      if (map.in_a[i]) {
        reduced_duals[i] = -r.y[map.index[i]];
      } else {
        reduced_duals[i] = -map.sign[i] * r.z[map.index[i]];
      }
    }
  }
  out.primal = postsolve_primal(ps, reduced_x);
  // bounds reach the cone solver as plain rows and come back missed by ~1e-10;
  // snapping them keeps zero-cost slacks from pricing below zero
  for (std::size_t j = 0; j < out.primal.size(); ++j) {
    out.primal[j] = std::clamp(out.primal[j], spec.lower[j], spec.upper[j]);
  }
  out.objective = spec.evaluate_objective(out.primal);
  // the dual objective bounds the model from below independently of any
  // primal residual; fixed columns sit in the reduced constant
  out.dual_bound = std::isfinite(reduced_dual_objective)
                       ? std::min(out.objective, reduced_dual_objective + red.objective_constant)
                       : out.objective;
  out.duals.assign(spec.rows.size(), 0.0);
  for (std::size_t i = 0; i < ps.kept_rows.size(); ++i) {
    out.duals[ps.kept_rows[i]] = reduced_duals[i];
  }
  const double vio = spec.max_violation(out.primal, false);
  if (vio > 1e-6) {
    out.warnings.push_back("ipm: solution violates the model by " +
                           std::to_string(vio));
  }
  return out;
}

// Cutting-plane treatment of cones: each violated cone m0 >= ||m|| at the
// current point v gets the supporting hyperplane (v/||v||)'m <= m0.
SolveOutcome solve_with_cut_loop(const ModelSpec& spec) {
  SolveOutcome out;
  LpProblem lp = to_lp(spec);
  const std::size_t base_rows = spec.rows.size();
  auto cut_row = [](const ConeRow& cone, const std::vector<double>& dir,
                    std::vector<LinearTerm>* terms, double* rhs) {
    // sum_k dir_k m_k - m_0 <= 0
    double constant = -cone.members[0].constant;
    for (const auto& t : cone.members[0].terms) terms->push_back({t.var, -t.coef});
    for (std::size_t k = 1; k < cone.members.size(); ++k) {
      if (dir[k - 1] == 0.0) continue;
      constant += dir[k - 1] * cone.members[k].constant;
      for (const auto& t : cone.members[k].terms) {
        terms->push_back({t.var, dir[k - 1] * t.coef});
      }
    }
    *rhs = -constant;
  };
  // Seed with m0 >= |m_k| so the first LP is bounded whenever the conic
  // model is.
  for (const auto& cone : spec.cones) {
    const std::size_t k = cone.members.size() - 1;
    for (std::size_t i = 0; i < k; ++i) {
      for (double sgn : {1.0, -1.0}) {
        std::vector<double> dir(k, 0.0);
        dir[i] = sgn;
        std::vector<LinearTerm> terms;
        double rhs = 0.0;
        cut_row(cone, dir, &terms, &rhs);
        lp.rows.push_back(std::move(terms));
        lp.row_lower.push_back(-kInf);
        lp.row_upper.push_back(rhs);
      }
    }
  }
  DenseSimplex simplex(lp);
  const int max_rounds = 2000;
  int stalled = 0;
  for (int round = 0; round < max_rounds; ++round) {
    const LpStatus st = simplex.solve();
    out.iterations = simplex.iterations();
    if (st != LpStatus::kOptimal) {
      out.status = from_lp(st);
      out.message = std::string("cutting-plane lp: ") + to_string(st);
      return out;
    }
    const std::vector<double> x = simplex.primal();
    std::vector<std::vector<LinearTerm>> rows;
    std::vector<double> lo, hi;
    double worst = 0.0;
    for (const auto& cone : spec.cones) {
      std::vector<double> v;
      double norm2 = 0.0;
      for (std::size_t k = 1; k < cone.members.size(); ++k) {
        v.push_back(evaluate(cone.members[k], x));
        norm2 += v.back() * v.back();
      }
      const double norm = std::sqrt(norm2);
      const double head = evaluate(cone.members[0], x);
      const double vio = norm - head;
      worst = std::max(worst, vio / std::max(1.0, norm));
      if (vio <= 1e-11 * std::max(1.0, norm) || norm == 0.0) continue;
      for (auto& e : v) e /= norm;
      std::vector<LinearTerm> terms;
      double rhs = 0.0;
      cut_row(cone, v, &terms, &rhs);
      rows.push_back(std::move(terms));
      lo.push_back(-kInf);
      hi.push_back(rhs);
    }
    // Cut rows are only satisfied to the simplex primal tolerance, so the
    // cone residual cannot be driven much below it.
    if (worst <= 5e-9) stalled = 0;
    const bool settled = worst <= 5e-9 || (worst <= 1e-7 && ++stalled > 50);
    if (rows.empty() || settled) {
      out.status = SolveStatus::kOptimal;
      out.primal = x;
      out.objective = spec.evaluate_objective(x);
      out.dual_bound = out.objective;
      std::vector<double> duals = simplex.row_duals();
      duals.resize(base_rows);
      out.duals = std::move(duals);
      if (worst > 1e-8) {
        out.warnings.push_back("cutting plane: cone residual " +
                               std::to_string(worst));
      }
      return out;
    }
    simplex.add_rows(rows, lo, hi);
  }
  out.status = SolveStatus::kNumericError;
  out.message = "cutting plane: round limit reached";
  return out;
}

class IpmBackend : public SolverBackend {
 public:
  std::string name() const override { return "ipm"; }
  SolveOutcome solve_continuous(const ModelSpec& spec) override {
    spec.check_well_formed();
    if (spec.cones.empty()) return solve_lp(spec);
    return solve_with_ipm(spec);
  }
  SolveOutcome solve_mixed(const ModelSpec& spec,
                           const SolveControls& controls) override {
    spec.check_well_formed();
    return solve_mip(spec, controls);
  }
};

class ReferenceBackend : public SolverBackend {
 public:
  std::string name() const override { return "reference"; }
  SolveOutcome solve_continuous(const ModelSpec& spec) override {
    spec.check_well_formed();
    if (spec.cones.empty()) return solve_lp(spec);
    return solve_with_cut_loop(spec);
  }
  SolveOutcome solve_mixed(const ModelSpec& spec,
                           const SolveControls& controls) override {
    spec.check_well_formed();
    return solve_mip(spec, controls);
  }
};

}  // namespace

std::unique_ptr<SolverBackend> make_backend(std::string_view name) {
  if (name == "ipm") return std::make_unique<IpmBackend>();
  if (name == "reference") return std::make_unique<ReferenceBackend>();
  throw std::invalid_argument("unknown backend '" + std::string(name) +
                              "' (expected ipm or reference)");
}

std::string default_backend_name() {
  const char* env = std::getenv("PIOIA_BACKEND");
  if (env != nullptr && *env != '\0') return env;
  return "ipm";
}

ModelSpec restrict_integrality(const ModelSpec& spec,
                               const std::vector<int>& binary_ids,
                               const std::vector<int>& allowed_ids) {
  const std::set<int> allowed(allowed_ids.begin(), allowed_ids.end());
  ModelSpec out = spec;
  out.integer.assign(spec.num_vars(), false);
  for (int id : binary_ids) {
    if (allowed.count(id) == 0) {
      throw std::invalid_argument("restrict_integrality: id " +
                                  std::to_string(id) +
                                  " is not a commitment variable");
    }
    out.integer[id] = true;
  }
  return out;
}

}  // namespace pioia
