#include "pioia/conic_ipm.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace pioia {

const char* to_string(ConicStatus status) {
  switch (status) {
    case ConicStatus::kOptimal: return "optimal";
    case ConicStatus::kInfeasible: return "infeasible";
    case ConicStatus::kUnbounded: return "unbounded";
    case ConicStatus::kIterationLimit: return "iteration_limit";
    case ConicStatus::kNumericError: return "numeric_error";
  }
  return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

struct ConeLayout {
  int orthant = 0;
  std::vector<int> dims;
  std::vector<int> offsets;
  int total = 0;
  int degree() const { return orthant + static_cast<int>(dims.size()); }
};

// Nesterov-Todd scaling for the product cone.
struct Scaling {
  VectorXd orth;  // W = diag(orth) on the orthant
  std::vector<MatrixXd> w;
  std::vector<MatrixXd> w_inv;
};

double soc_residual(const VectorXd& v, int off, int dim) {
  return v[off] * v[off] - v.segment(off + 1, dim - 1).squaredNorm();
}

bool compute_scaling(const ConeLayout& k, const VectorXd& s, const VectorXd& z,
                     Scaling* sc) {
  sc->orth.resize(k.orthant);
  for (int i = 0; i < k.orthant; ++i) {
    if (s[i] <= 0.0 || z[i] <= 0.0) return false;
    sc->orth[i] = std::sqrt(s[i] / z[i]);
  }
  sc->w.resize(k.dims.size());
  sc->w_inv.resize(k.dims.size());
  for (std::size_t c = 0; c < k.dims.size(); ++c) {
    const int off = k.offsets[c];
    const int d = k.dims[c];
    const double js = soc_residual(s, off, d);
    const double jz = soc_residual(z, off, d);
    if (js <= 0.0 || jz <= 0.0 || s[off] <= 0.0 || z[off] <= 0.0) return false;
    const VectorXd sn = s.segment(off, d) / std::sqrt(js);
    const VectorXd zn = z.segment(off, d) / std::sqrt(jz);
    const double gamma = std::sqrt((1.0 + sn.dot(zn)) / 2.0);
    VectorXd wb(d);
    wb[0] = (sn[0] + zn[0]) / (2.0 * gamma);
    wb.tail(d - 1) = (sn.tail(d - 1) - zn.tail(d - 1)) / (2.0 * gamma);
    const double eta = std::pow(js / jz, 0.25);
    const VectorXd w1 = wb.tail(d - 1);
    MatrixXd inner = MatrixXd::Identity(d - 1, d - 1) +
                     w1 * w1.transpose() / (1.0 + wb[0]);
    MatrixXd w(d, d);
    w(0, 0) = wb[0];
    w.block(0, 1, 1, d - 1) = w1.transpose();
    w.block(1, 0, d - 1, 1) = w1;
    w.block(1, 1, d - 1, d - 1) = inner;
    MatrixXd wi = w;
    wi.block(0, 1, 1, d - 1) *= -1.0;
    wi.block(1, 0, d - 1, 1) *= -1.0;
    sc->w[c] = eta * w;
    sc->w_inv[c] = wi / eta;
  }
  return true;
}

VectorXd apply_w(const ConeLayout& k, const Scaling& sc, const VectorXd& v) {
  VectorXd out(v.size());
  out.head(k.orthant) = sc.orth.cwiseProduct(v.head(k.orthant));
  for (std::size_t c = 0; c < k.dims.size(); ++c) {
    out.segment(k.offsets[c], k.dims[c]) =
        sc.w[c] * v.segment(k.offsets[c], k.dims[c]);
  }
  return out;
}

VectorXd apply_w_inv(const ConeLayout& k, const Scaling& sc,
                     const VectorXd& v) {
  VectorXd out(v.size());
  out.head(k.orthant) = v.head(k.orthant).cwiseQuotient(sc.orth);
  for (std::size_t c = 0; c < k.dims.size(); ++c) {
    out.segment(k.offsets[c], k.dims[c]) =
        sc.w_inv[c] * v.segment(k.offsets[c], k.dims[c]);
  }
  return out;
}

VectorXd jordan_product(const ConeLayout& k, const VectorXd& u,
                        const VectorXd& v) {
  VectorXd out(u.size());
  out.head(k.orthant) = u.head(k.orthant).cwiseProduct(v.head(k.orthant));
  for (std::size_t c = 0; c < k.dims.size(); ++c) {
    const int off = k.offsets[c];
    const int d = k.dims[c];
    out[off] = u.segment(off, d).dot(v.segment(off, d));
    out.segment(off + 1, d - 1) =
        u[off] * v.segment(off + 1, d - 1) + v[off] * u.segment(off + 1, d - 1);
  }
  return out;
}

// Solves lambda o u = v for u.
VectorXd jordan_divide(const ConeLayout& k, const VectorXd& lambda,
                       const VectorXd& v) {
  VectorXd out(v.size());
  out.head(k.orthant) = v.head(k.orthant).cwiseQuotient(lambda.head(k.orthant));
  for (std::size_t c = 0; c < k.dims.size(); ++c) {
    const int off = k.offsets[c];
    const int d = k.dims[c];
    const double l0 = lambda[off];
    const auto l1 = lambda.segment(off + 1, d - 1);
    const double det = l0 * l0 - l1.squaredNorm();
    const double u0 = (l0 * v[off] - l1.dot(v.segment(off + 1, d - 1))) / det;
    out[off] = u0;
    out.segment(off + 1, d - 1) = (v.segment(off + 1, d - 1) - u0 * l1) / l0;
  }
  return out;
}

VectorXd identity_element(const ConeLayout& k) {
  VectorXd e = VectorXd::Zero(k.total);
  e.head(k.orthant).setOnes();
  for (int off : k.offsets) e[off] = 1.0;
  return e;
}

// Largest alpha with x + alpha * d in the cone (may be +inf).
double max_step(const ConeLayout& k, const VectorXd& x, const VectorXd& d) {
  double alpha = kInf;
  for (int i = 0; i < k.orthant; ++i) {
    if (d[i] < 0.0) alpha = std::min(alpha, -x[i] / d[i]);
  }
  for (std::size_t c = 0; c < k.dims.size(); ++c) {
    const int off = k.offsets[c];
    const int dim = k.dims[c];
    const double a = soc_residual(d, off, dim);
    const double b = 2.0 * (x[off] * d[off] -
                            x.segment(off + 1, dim - 1).dot(d.segment(off + 1, dim - 1)));
    const double cc = soc_residual(x, off, dim);
    double root = kInf;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(cc), 1e-300});
    if (std::abs(a) <= 1e-14 * scale) {
      if (b < 0.0) root = -cc / b;
    } else {
      const double disc = b * b - 4.0 * a * cc;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
        double r1 = q / a;
        double r2 = q != 0.0 ? cc / q : kInf;
        if (r1 > 0.0) root = std::min(root, r1);
        if (r2 > 0.0) root = std::min(root, r2);
      }
    }
    if (d[off] < 0.0) root = std::min(root, -x[off] / d[off]);
    alpha = std::min(alpha, root);
  }
  return alpha;
}

// Moves v into the interior: v + (1 + alpha) e when v is not strictly inside.
void shift_into_cone(const ConeLayout& k, VectorXd* v) {
  double alpha = -kInf;
  for (int i = 0; i < k.orthant; ++i) alpha = std::max(alpha, -(*v)[i]);
  for (std::size_t c = 0; c < k.dims.size(); ++c) {
    const int off = k.offsets[c];
    const double nrm = v->segment(off + 1, k.dims[c] - 1).norm();
    alpha = std::max(alpha, nrm - (*v)[off]);
  }
  if (alpha >= -1e-8) {
    const VectorXd e = identity_element(k);
    *v += (1.0 + std::max(alpha, 0.0)) * e;
  }
}

SpMat sparse_from_rows(const std::vector<std::vector<LinearTerm>>& rows, int n) {
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& t : rows[i]) {
      trips.emplace_back(static_cast<int>(i), t.var, t.coef);
    }
  }
  SpMat m(static_cast<int>(rows.size()), n);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

class KktSystem {
 public:
  KktSystem(const SpMat& a, const SpMat& g, const ConeLayout& k, double reg)
      : a_(a), g_(g), k_(k), reg_(reg), n_(static_cast<int>(a.cols())),
        p_(static_cast<int>(a.rows())), m_(static_cast<int>(g.rows())) {}

  bool factor(const Scaling& sc) {
    scaling_ = &sc;
    std::vector<Eigen::Triplet<double>> trips;
    const int dim = n_ + p_ + m_;
    trips.reserve(dim + a_.nonZeros() + g_.nonZeros() + 16 * k_.dims.size());
    for (int i = 0; i < n_; ++i) trips.emplace_back(i, i, reg_);
    for (int j = 0; j < a_.outerSize(); ++j) {
      for (SpMat::InnerIterator it(a_, j); it; ++it) {
        trips.emplace_back(n_ + static_cast<int>(it.row()), j, it.value());
      }
    }
    for (int j = 0; j < g_.outerSize(); ++j) {
      for (SpMat::InnerIterator it(g_, j); it; ++it) {
        trips.emplace_back(n_ + p_ + static_cast<int>(it.row()), j, it.value());
      }
    }
    for (int i = 0; i < p_; ++i) trips.emplace_back(n_ + i, n_ + i, -reg_);
    const int zo = n_ + p_;
    for (int i = 0; i < k_.orthant; ++i) {
      trips.emplace_back(zo + i, zo + i, -sc.orth[i] * sc.orth[i] - reg_);
    }
    for (std::size_t c = 0; c < k_.dims.size(); ++c) {
      const MatrixXd w2 = sc.w[c] * sc.w[c];
      const int off = zo + k_.offsets[c];
      for (int r = 0; r < k_.dims[c]; ++r) {
        for (int col = 0; col <= r; ++col) {
          trips.emplace_back(off + r, off + col,
                             -w2(r, col) - (r == col ? reg_ : 0.0));
        }
      }
    }
    SpMat kkt(dim, dim);
    kkt.setFromTriplets(trips.begin(), trips.end());
    if (!analyzed_) {
      ldlt_.analyzePattern(kkt);
      analyzed_ = true;
    }
    ldlt_.factorize(kkt);
    return ldlt_.info() == Eigen::Success;
  }

  // Solves the unregularized system with iterative refinement.
  VectorXd solve(const VectorXd& rhs) const {
    VectorXd v = ldlt_.solve(rhs);
    const double tol = 1e-14 * (1.0 + rhs.lpNorm<Eigen::Infinity>());
    for (int it = 0; it < 30; ++it) {
      const VectorXd res = rhs - apply(v);
      if (res.lpNorm<Eigen::Infinity>() <= tol) break;
      v += ldlt_.solve(res);
    }
    return v;
  }

 private:
  VectorXd apply(const VectorXd& v) const {
    const VectorXd vx = v.head(n_);
    const VectorXd vy = v.segment(n_, p_);
    const VectorXd vz = v.tail(m_);
    VectorXd out(v.size());
    out.head(n_) = a_.transpose() * vy + g_.transpose() * vz;
    out.segment(n_, p_) = a_ * vx;
    out.tail(m_) = g_ * vx - apply_w(k_, *scaling_, apply_w(k_, *scaling_, vz));
    return out;
  }

  const SpMat& a_;
  const SpMat& g_;
  const ConeLayout& k_;
  double reg_;
  int n_, p_, m_;
  const Scaling* scaling_ = nullptr;
  bool analyzed_ = false;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
};

}  // namespace

ConicResult solve_conic(const ConicProblem& problem,
                        const ConicSettings& settings) {
  const int n = problem.num_vars;
  ConeLayout k;
  k.orthant = problem.orthant_dim;
  k.dims = problem.cone_dims;
  int off = k.orthant;
  for (int d : k.dims) {
    if (d < 2) throw std::invalid_argument("conic: cone dimension below 2");
    k.offsets.push_back(off);
    off += d;
  }
  k.total = off;
  if (static_cast<int>(problem.g_rows.size()) != k.total ||
      problem.h.size() != problem.g_rows.size() ||
      problem.b.size() != problem.a_rows.size() ||
      static_cast<int>(problem.c.size()) != n) {
    throw std::invalid_argument("conic: inconsistent problem dimensions");
  }
  const SpMat a = sparse_from_rows(problem.a_rows, n);
  const SpMat g = sparse_from_rows(problem.g_rows, n);
  const int p = static_cast<int>(a.rows());
  const int m = static_cast<int>(g.rows());
  const VectorXd c = Eigen::Map<const VectorXd>(problem.c.data(), n);
  const VectorXd b = Eigen::Map<const VectorXd>(problem.b.data(), p);
  const VectorXd h = Eigen::Map<const VectorXd>(problem.h.data(), m);
  const double bh_norm = std::max(b.size() ? b.lpNorm<Eigen::Infinity>() : 0.0,
                                  h.size() ? h.lpNorm<Eigen::Infinity>() : 0.0);
  const double c_norm = c.size() ? c.lpNorm<Eigen::Infinity>() : 0.0;

  KktSystem kkt(a, g, k, settings.regularization);
  ConicResult result;

  // Initial point from two least-squares problems with W = I.
  Scaling unit;
  unit.orth = VectorXd::Ones(k.orthant);
  for (int d : k.dims) {
    unit.w.push_back(MatrixXd::Identity(d, d));
    unit.w_inv.push_back(MatrixXd::Identity(d, d));
  }
  if (!kkt.factor(unit)) {
    result.status = ConicStatus::kNumericError;
    return result;
  }
  VectorXd rhs(n + p + m);
  rhs << VectorXd::Zero(n), b, h;
  VectorXd sol = kkt.solve(rhs);
  VectorXd x = sol.head(n);
  VectorXd s = -sol.tail(m);
  rhs << -c, VectorXd::Zero(p), VectorXd::Zero(m);
  sol = kkt.solve(rhs);
  VectorXd y = sol.segment(n, p);
  VectorXd z = sol.tail(m);
  shift_into_cone(k, &s);
  shift_into_cone(k, &z);
  double tau = 1.0;
  double kappa = 1.0;
  const VectorXd e = identity_element(k);
  const double degree = k.degree();

  // Best iterate by its worst normalized residual, returned on a stall.
  double best_score = kInf;
  VectorXd bx, by, bs, bz;
  double btau = 1.0, best_pcost = 0.0, best_dcost = 0.0;
  for (int iter = 0; iter <= settings.max_iterations; ++iter) {
    result.iterations = iter;
    const VectorXd r1 = a.transpose() * y + g.transpose() * z + c * tau;
    const VectorXd r2 = a * x - b * tau;
    const VectorXd r3 = g * x + s - h * tau;
    const double r4 = kappa + c.dot(x) + b.dot(y) + h.dot(z);

    const double pres =
        std::max(r2.size() ? r2.lpNorm<Eigen::Infinity>() : 0.0,
                 r3.size() ? r3.lpNorm<Eigen::Infinity>() : 0.0) /
        tau / (1.0 + bh_norm);
    const double dres = (n ? r1.lpNorm<Eigen::Infinity>() : 0.0) / tau /
                        (1.0 + c_norm);
    const double pcost = c.dot(x) / tau;
    const double dcost = -(b.dot(y) + h.dot(z)) / tau;
    const double gap = s.dot(z) / (tau * tau);
    const double rel_gap =
        std::min(gap, std::abs(pcost - dcost)) /
        std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));
    auto finish = [&](ConicStatus status) {
      result.status = status;
      const double scale = status == ConicStatus::kOptimal ? tau : 1.0;
      result.x.assign(x.data(), x.data() + n);
      result.y.assign(y.data(), y.data() + p);
      result.s.assign(s.data(), s.data() + m);
      result.z.assign(z.data(), z.data() + m);
      for (auto& v : result.x) v /= scale;
      for (auto& v : result.y) v /= scale;
      for (auto& v : result.s) v /= scale;
      for (auto& v : result.z) v /= scale;
      result.primal_objective = pcost;
      result.dual_objective = dcost;
      return result;
    };
    if (pres <= settings.feasibility_tolerance &&
        dres <= settings.feasibility_tolerance &&
        (gap <= settings.absolute_tolerance ||
         rel_gap <= settings.relative_tolerance)) {
      return finish(ConicStatus::kOptimal);
    }
    if (std::getenv("PIOIA_IPM_TRACE") != nullptr) {
      std::fprintf(stderr, "%3d pcost %.10e dcost %.10e pres %.2e dres %.2e gap %.2e tau %.2e kap %.2e\n",
                   iter, pcost, dcost, pres, dres, rel_gap, tau, kappa);
    }
    const double score = std::max({pres, dres, rel_gap});
    if (score < best_score) {
      best_score = score;
      bx = x; by = y; bs = s; bz = z;
      btau = tau;
      best_pcost = pcost;
      best_dcost = dcost;
    } else if (best_score <= settings.inaccurate_tolerance &&
               score > 1e3 * best_score) {
      break;  // iterates are degrading near the boundary
    }
    // Infeasibility certificates.
    const double by_hz = b.dot(y) + h.dot(z);
    if (by_hz < 0.0 && tau < kappa) {
      const double res = (n ? (a.transpose() * y + g.transpose() * z)
                                   .lpNorm<Eigen::Infinity>()
                            : 0.0) / -by_hz;
      if (res <= settings.certificate_tolerance) {
        ConicResult r = finish(ConicStatus::kInfeasible);
        r.x.clear();
        return r;
      }
    }
    const double cx = c.dot(x);
    if (cx < 0.0 && tau < kappa) {
      const double res =
          std::max(r2.size() ? (a * x).lpNorm<Eigen::Infinity>() : 0.0,
                   m ? (g * x + s).lpNorm<Eigen::Infinity>() : 0.0) / -cx;
      if (res <= settings.certificate_tolerance) {
        return finish(ConicStatus::kUnbounded);
      }
    }
    if (iter == settings.max_iterations) break;

    Scaling sc;
    if (!compute_scaling(k, s, z, &sc)) break;
    const VectorXd lambda = apply_w(k, sc, z);
    if (!kkt.factor(sc)) break;

    rhs << -c, b, h;
    const VectorXd v1 = kkt.solve(rhs);
    const double q1 = c.dot(v1.head(n)) + b.dot(v1.segment(n, p)) +
                      h.dot(v1.tail(m));

    auto direction = [&](double eta_r, const VectorXd& ds_scaled, double dk,
                         VectorXd* dx, VectorXd* dy, VectorXd* dz,
                         VectorXd* ds, double* dtau, double* dkappa) {
      VectorXd r(n + p + m);
      r << -eta_r * r1, -eta_r * r2, -eta_r * r3 - apply_w(k, sc, ds_scaled);
      const VectorXd v2 = kkt.solve(r);
      const double q2 = c.dot(v2.head(n)) + b.dot(v2.segment(n, p)) +
                        h.dot(v2.tail(m));
      *dtau = (-eta_r * r4 - q2 - dk / tau) / (q1 - kappa / tau);
      *dx = v2.head(n) + *dtau * v1.head(n);
      *dy = v2.segment(n, p) + *dtau * v1.segment(n, p);
      *dz = v2.tail(m) + *dtau * v1.tail(m);
      *ds = apply_w(k, sc, ds_scaled - apply_w(k, sc, *dz));
      *dkappa = (dk - kappa * *dtau) / tau;
    };
    auto step_length = [&](const VectorXd& ds, const VectorXd& dz, double dtau,
                           double dkappa) {
      double alpha = std::min(max_step(k, s, ds), max_step(k, z, dz));
      if (dtau < 0.0) alpha = std::min(alpha, -tau / dtau);
      if (dkappa < 0.0) alpha = std::min(alpha, -kappa / dkappa);
      return alpha;
    };

    VectorXd dxa, dya, dza, dsa;
    double dtaua = 0.0, dkappaa = 0.0;
    direction(1.0, -lambda, -tau * kappa, &dxa, &dya, &dza, &dsa, &dtaua,
              &dkappaa);
    const double alpha_aff = std::min(1.0, step_length(dsa, dza, dtaua, dkappaa));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);
    const double mu = (s.dot(z) + tau * kappa) / (degree + 1.0);

    const VectorXd corr =
        jordan_product(k, apply_w_inv(k, sc, dsa), apply_w(k, sc, dza));
    const VectorXd target = -jordan_product(k, lambda, lambda) +
                            sigma * mu * e - corr;
    const VectorXd ds_scaled = jordan_divide(k, lambda, target);
    const double dk = -tau * kappa + sigma * mu - dtaua * dkappaa;
    VectorXd dx, dy, dz, ds;
    double dtau = 0.0, dkappa = 0.0;
    direction(1.0 - sigma, ds_scaled, dk, &dx, &dy, &dz, &ds, &dtau, &dkappa);
    double alpha = step_length(ds, dz, dtau, dkappa);
    alpha = std::min(1.0, 0.99 * alpha);
    if (!(alpha > 1e-14) || !dx.allFinite()) break;
    x += alpha * dx;
    y += alpha * dy;
    z += alpha * dz;
    s += alpha * ds;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
  }

  // Stalled: fall back to the best iterate when it is close enough.
  if (best_score <= settings.inaccurate_tolerance) {
    result.x.assign(bx.data(), bx.data() + n);
    result.y.assign(by.data(), by.data() + p);
    result.s.assign(bs.data(), bs.data() + m);
    result.z.assign(bz.data(), bz.data() + m);
    for (auto* v : {&result.x, &result.y, &result.s, &result.z}) {
      for (auto& e : *v) e /= btau;
    }
    result.primal_objective = best_pcost;
    result.dual_objective = best_dcost;
    result.status = ConicStatus::kOptimal;
    result.reduced_accuracy = best_score > 1e-8;
  } else {
    result.status = result.iterations >= settings.max_iterations
                        ? ConicStatus::kIterationLimit
                        : ConicStatus::kNumericError;
  }
  return result;
}

}  // namespace pioia
