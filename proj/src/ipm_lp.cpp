#include "uavfair/ipm_lp.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace uavfair {

Eigen::VectorXd SparseColumns::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(rows);
  for (int j = 0; j < num_cols(); ++j)
    for (const auto& [r, v] : cols[j]) out[r] += v * x[j];
  return out;
}

Eigen::VectorXd SparseColumns::multiply_transpose(const Eigen::VectorXd& y) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(num_cols());
  for (int j = 0; j < num_cols(); ++j)
    for (const auto& [r, v] : cols[j]) out[j] += v * y[r];
  return out;
}

namespace {

// A diag(d) A' accumulated densely; columns are short so this is cheap.
void normal_matrix(const SparseColumns& A, const Eigen::VectorXd& d,
                   Eigen::MatrixXd& M) {
  M.setZero();
  for (int j = 0; j < A.num_cols(); ++j) {
    const auto& col = A.cols[j];
    const double dj = d[j];
    for (std::size_t a = 0; a < col.size(); ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        const double v = dj * col[a].second * col[b].second;
        M(col[a].first, col[b].first) += v;
      }
  }
  M = M.selfadjointView<Eigen::Lower>();
}

}  // namespace

LpResult solve_standard_lp(const SparseColumns& A, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& c,
                           const Eigen::VectorXd& upper, double tol_gap,
                           int max_iters) {
  using Eigen::VectorXd;
  const int n = A.num_cols();
  const int m = A.rows;

  std::vector<int> bounded;
  for (int j = 0; j < n; ++j)
    if (std::isfinite(upper[j])) bounded.push_back(j);

  VectorXd x(n), z(n), w(n), s(n);
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(upper[j])) {
      x[j] = 0.5 * upper[j];
      w[j] = upper[j] - x[j];
      s[j] = 1.0;
    } else {
      x[j] = 1.0;
      w[j] = 0.0;
      s[j] = 0.0;
    }
    z[j] = 1.0;
  }
  VectorXd y = VectorXd::Zero(m);

  const double comp_count = double(n + bounded.size());
  const double bscale = 1.0 + b.lpNorm<Eigen::Infinity>();
  const double cscale = 1.0 + c.lpNorm<Eigen::Infinity>();

  Eigen::MatrixXd Mmat(m, m);
  Eigen::LLT<Eigen::MatrixXd> llt;

  LpResult res;
  res.x = x;
  res.y = y;

  auto mu_of = [&](const VectorXd& xx, const VectorXd& zz, const VectorXd& ww,
                   const VectorXd& ss) {
    double acc = xx.dot(zz);
    for (int j : bounded) acc += ww[j] * ss[j];
    return acc / comp_count;
  };

  // the endgame can destroy the factorization (tiny x against huge z), so the
  // best iterate seen so far is kept and returned if the iteration breaks
  // down after reaching acceptable accuracy
  double best_score = std::numeric_limits<double>::infinity();
  int iter = 0;
  bool broke_down = false;

  for (; iter < max_iters; ++iter) {
    VectorXd rb = b - A.multiply(x);
    VectorXd rc = c - A.multiply_transpose(y) - z;
    for (int j : bounded) rc[j] += s[j];
    VectorXd ru = VectorXd::Zero(n);
    for (int j : bounded) ru[j] = upper[j] - x[j] - w[j];

    const double mu = mu_of(x, z, w, s);
    const double rbn = rb.lpNorm<Eigen::Infinity>();
    const double rcn = rc.lpNorm<Eigen::Infinity>();
    const double obj = c.dot(x);
    if (!std::isfinite(mu) || !std::isfinite(rbn) || !std::isfinite(rcn) ||
        !std::isfinite(obj)) {
      broke_down = true;
      break;
    }

    const double gap_ref = tol_gap * (1.0 + std::abs(obj));
    const double score = std::max({mu / gap_ref, rbn / (1e-9 * bscale),
                                   rcn / (1e-9 * cscale)});
    if (score < best_score) {
      best_score = score;
      res.x = x;
      res.y = y;
      res.objective = obj;
      res.gap = mu;
      res.iterations = iter;
    }
    if (mu <= gap_ref && rbn <= 1e-9 * bscale && rcn <= 1e-9 * cscale) {
      res.status = LpStatus::optimal;
      return res;
    }

    // scaling Theta = Z/X + S/W on bounded columns
    VectorXd theta(n);
    for (int j = 0; j < n; ++j) {
      theta[j] = z[j] / x[j];
      if (std::isfinite(upper[j])) theta[j] += s[j] / w[j];
    }
    VectorXd d = theta.cwiseInverse();

    normal_matrix(A, d, Mmat);
    double ridge = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
      llt.compute(Mmat + ridge * Eigen::MatrixXd::Identity(m, m));
      if (llt.info() == Eigen::Success) break;
      ridge = ridge == 0.0 ? 1e-12 * Mmat.diagonal().maxCoeff() : ridge * 1e3;
    }
    if (llt.info() != Eigen::Success) {
      res.status = LpStatus::numerical_failure;
      res.message = "normal equations not positive definite";
      return res;
    }

    auto solve_direction = [&](const VectorXd& rxz, const VectorXd& rws,
                               VectorXd& dx, VectorXd& dy, VectorXd& dz,
                               VectorXd& dw, VectorXd& ds) {
      VectorXd r2 = rc - rxz.cwiseQuotient(x);
      for (int j : bounded) r2[j] += (rws[j] - s[j] * ru[j]) / w[j];
      const VectorXd rhs = rb + A.multiply(d.cwiseProduct(r2));
      dy = llt.solve(rhs);
      // one step of iterative refinement: the normal matrix turns severely
      // ill-conditioned near the optimum and the raw solve loses digits
      dy += llt.solve(rhs - A.multiply(d.cwiseProduct(A.multiply_transpose(dy))) -
                      ridge * dy);
      dx = d.cwiseProduct(A.multiply_transpose(dy) - r2);
      dz = (rxz - z.cwiseProduct(dx)).cwiseQuotient(x);
      dw = VectorXd::Zero(n);
      ds = VectorXd::Zero(n);
      for (int j : bounded) {
        dw[j] = ru[j] - dx[j];
        ds[j] = (rws[j] - s[j] * dw[j]) / w[j];
      }
    };

    auto max_step = [&](const VectorXd& v, const VectorXd& dv,
                        const std::vector<int>* subset) {
      double a = 1.0;
      if (subset) {
        for (int j : *subset)
          if (dv[j] < 0.0) a = std::min(a, -v[j] / dv[j]);
      } else {
        for (int j = 0; j < v.size(); ++j)
          if (dv[j] < 0.0) a = std::min(a, -v[j] / dv[j]);
      }
      return a;
    };

    // predictor
    VectorXd rxz = -x.cwiseProduct(z);
    VectorXd rws = VectorXd::Zero(n);
    for (int j : bounded) rws[j] = -w[j] * s[j];
    VectorXd dx, dy, dz, dw, ds;
    solve_direction(rxz, rws, dx, dy, dz, dw, ds);

    double ap = std::min(max_step(x, dx, nullptr), max_step(w, dw, &bounded));
    double ad = std::min(max_step(z, dz, nullptr), max_step(s, ds, &bounded));
    const double mu_aff =
        mu_of(x + ap * dx, z + ad * dz, w + ap * dw, s + ad * ds);
    const double sigma = std::pow(mu_aff / mu, 3.0);

    // corrector
    for (int j = 0; j < n; ++j) rxz[j] += sigma * mu - dx[j] * dz[j];
    for (int j : bounded) rws[j] += sigma * mu - dw[j] * ds[j];
    solve_direction(rxz, rws, dx, dy, dz, dw, ds);

    ap = std::min(max_step(x, dx, nullptr), max_step(w, dw, &bounded));
    ad = std::min(max_step(z, dz, nullptr), max_step(s, ds, &bounded));
    const double tau = 1.0 - std::min(0.1, 0.1 * mu);
    ap = std::min(1.0, tau * ap);
    ad = std::min(1.0, tau * ad);
    if (ap < 1e-10 && ad < 1e-10) {
      broke_down = true;
      break;
    }

    x += ap * dx;
    y += ad * dy;
    z += ad * dz;
    for (int j : bounded) {
      w[j] += ap * dw[j];
      s[j] += ad * ds[j];
    }
    if (std::getenv("UAVFAIR_LP_DEBUG"))
      std::fprintf(stderr,
                   "lp: it=%d mu=%.3e rbn=%.3e rcn=%.3e ap=%.3e ad=%.3e "
                   "sigma=%.3e obj=%.12f\n",
                   iter, mu, rbn, rcn, ap, ad, sigma, c.dot(x));
  }
  // breakdown or iteration limit: fall back to the best stored iterate if it
  // is accurate enough to certify (an order looser than the clean exit)
  if (best_score <= 10.0) {
    res.status = LpStatus::optimal;
    res.message = broke_down ? "endgame breakdown; best iterate returned"
                             : "iteration limit; best iterate returned";
    return res;
  }
  res.status = broke_down ? LpStatus::numerical_failure
                          : LpStatus::max_iterations;
  res.message = broke_down ? "search direction broke down"
                           : "iteration limit reached";
  return res;
}

}  // namespace uavfair
