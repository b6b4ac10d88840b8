#include "uavfair/sca.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace uavfair {

// Feasible-start primal-dual interior-point method. The iterate (x, z, y)
// keeps x strictly primal feasible (slacks positive, kinematic equalities
// enforced exactly by re-integration), z > 0 dual to the inequality rows and
// y dual to the equalities. Each step solves the reduced KKT system
//   [ H + G^T (Z/S) G   J^T ] [dx ]   [ -grad f0 + G^T (sigma mu / s) ]
//   [ J                  0  ] [y+ ] = [ 0                             ]
// with H = sum_i z_i * (-hess s_i), PSD because every constraint row is
// convex; dz follows from linearized complementarity and both steps are
// damped by a fraction-to-boundary rule. All quantities are scaled:
// variables by variable_scaling(), inequality rows by row_scales().
ScaSolution solve_sca(const ScaProgram& prog, const ScaOptions& opts) {
  const int n = prog.num_vars();
  const int me = prog.num_eq();
  const int m = prog.num_ineq();
  const int dim = n + me;

  Eigen::VectorXd x = prog.starting_point();
  prog.project_kinematics(x);
  Eigen::VectorXd s_raw;
  if (!prog.slacks(x, s_raw))
    throw ScaSolveError("sca: starting point is not strictly feasible",
                       prog.unpack_mu(x),
                       std::numeric_limits<double>::infinity());

  const Eigen::VectorXd vscale = prog.variable_scaling();
  const Eigen::VectorXd rscale = prog.row_scales();
  Eigen::VectorXd st = s_raw.array() / rscale.array();  // scaled slacks

  // duals start centered against the scaled slacks, clamped so a handful of
  // pinned rows cannot blow up the first few systems
  const double mu0 = 0.1;
  Eigen::VectorXd z(m);
  for (int i = 0; i < m; ++i) z[i] = std::clamp(mu0 / st[i], 1e-8, 1e6);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(me);

  // scaled equality system (rows normalized); x stays on the kinematic
  // manifold by construction, so the equality rhs only corrects drift
  std::vector<Eigen::Triplet<double>> jac_trip;
  Eigen::VectorXd beq;
  prog.equality_system(jac_trip, beq);
  Eigen::SparseMatrix<double> j_raw(me, n);
  j_raw.setFromTriplets(jac_trip.begin(), jac_trip.end());
  Eigen::VectorXd row_norm = Eigen::VectorXd::Zero(me);
  for (const auto& t : jac_trip)
    row_norm[t.row()] =
        std::max(row_norm[t.row()], std::abs(t.value() * vscale[t.col()]));
  for (int i = 0; i < me; ++i)
    if (row_norm[i] <= 0.0) row_norm[i] = 1.0;
  std::vector<Eigen::Triplet<double>> j_scaled;
  j_scaled.reserve(jac_trip.size());
  for (const auto& t : jac_trip)
    j_scaled.emplace_back(t.row(), t.col(),
                          t.value() * vscale[t.col()] / row_norm[t.row()]);
  Eigen::SparseMatrix<double> jmat(me, n);
  jmat.setFromTriplets(j_scaled.begin(), j_scaled.end());

  Eigen::VectorXd gf0 = Eigen::VectorXd::Zero(n);  // scaled grad of -mu
  gf0[prog.imu()] = -vscale[prog.imu()];

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt;
  bool analyzed = false;
  double reg = 1e-8;

  std::vector<Eigen::Triplet<double>> g_trip, h_trip, kkt_trip;
  Eigen::SparseMatrix<double> gmat(m, n), hmat(n, n), kkt(dim, dim);
  Eigen::VectorXd s_try, st_try;

  auto fail = [&](const std::string& why) {
    throw ScaSolveError("sca: " + why, prog.unpack_mu(x), st.dot(z));
  };

  const double tau = 0.995;  // fraction-to-boundary factor
  double sigma = 0.2;        // centering weight

  // best iterate with an acceptable dual residual; near the complementarity
  // floor the factorization degrades, so the solve keeps the best certified
  // point and returns it once progress stalls. Every iterate is strictly
  // primal feasible, so the highest-objective iterate is also kept: a stalled
  // solve that already beat the reference objective is still a valid step.
  Eigen::VectorXd x_best, x_hi;
  double gap_best = std::numeric_limits<double>::infinity();
  double mu_hi = -std::numeric_limits<double>::infinity();
  const double mu_ref = prog.unpack_mu(prog.reference_point());
  double gap_prev = std::numeric_limits<double>::infinity();
  int stall = 0;
  auto finish_or_fail = [&](const std::string& why) {
    if (!(gap_best <= 1e-2) && !(mu_hi >= mu_ref)) fail(why);
  };

  int iter = 0;
  for (;; ++iter) {

    // linearize at x; the unscaled dual of row i is z_i / rscale_i, which is
    // the curvature weight the unscaled row Hessians expect
    prog.linearize(x, Eigen::VectorXd(z.array() / rscale.array()), g_trip,
                   h_trip);
    for (auto& t : g_trip)
      t = {t.row(), t.col(), t.value() * vscale[t.col()] / rscale[t.row()]};
    for (auto& t : h_trip)
      t = {t.row(), t.col(), t.value() * vscale[t.row()] * vscale[t.col()]};
    gmat.setFromTriplets(g_trip.begin(), g_trip.end());
    hmat.setFromTriplets(h_trip.begin(), h_trip.end());

    const double gap = st.dot(z);
    const double mu = gap / m;
    const Eigen::VectorXd r_dual = gf0 - gmat.transpose() * z +
                                   Eigen::VectorXd(jmat.transpose() * y);
    if (opts.verbose)
      std::fprintf(stderr,
                   "sca: iter=%d gap=%.3e rdual=%.3e mu_var=%.9e "
                   "min_slack=%.3e\n",
                   iter, gap, r_dual.lpNorm<Eigen::Infinity>(),
                   x[prog.imu()], st.minCoeff());
    if (r_dual.lpNorm<Eigen::Infinity>() <= opts.dual_tol && gap < gap_best) {
      gap_best = gap;
      x_best = x;
    }
    if (prog.unpack_mu(x) > mu_hi) {
      mu_hi = prog.unpack_mu(x);
      x_hi = x;
    }
    if (gap_best <= opts.gap_abs) break;
    if (gap > 0.98 * gap_prev) ++stall; else stall = 0;
    gap_prev = gap;
    if (stall >= 12) {
      finish_or_fail("progress stalled at gap " + std::to_string(gap));
      break;
    }
    if (iter + 1 >= opts.max_iterations) {
      finish_or_fail("iteration budget exhausted");
      break;
    }

    // reduced KKT matrix (lower triangle)
    const Eigen::VectorXd d = z.array() / st.array();
    const Eigen::SparseMatrix<double> a =
        hmat + Eigen::SparseMatrix<double>(gmat.transpose() *
                                           d.asDiagonal() * gmat);
    kkt_trip.clear();
    kkt_trip.reserve(a.nonZeros() + j_scaled.size() + dim);
    for (int c = 0; c < a.outerSize(); ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(a, c); it; ++it)
        if (it.row() >= it.col())
          kkt_trip.emplace_back(int(it.row()), int(it.col()), it.value());
    for (int i = 0; i < n; ++i) kkt_trip.emplace_back(i, i, reg);
    for (const auto& t : j_scaled)
      kkt_trip.emplace_back(n + t.row(), t.col(), t.value());
    for (int i = 0; i < me; ++i) kkt_trip.emplace_back(n + i, n + i, -reg);
    kkt.setFromTriplets(kkt_trip.begin(), kkt_trip.end());

    if (!analyzed) {
      ldlt.analyzePattern(kkt);
      analyzed = true;
    }
    ldlt.factorize(kkt);
    for (int esc = 0; ldlt.info() != Eigen::Success; ++esc) {
      if (esc >= 4) fail("kkt factorization failed");
      reg *= 100.0;
      for (int i = 0; i < n; ++i) kkt.coeffRef(i, i) += reg;
      for (int i = 0; i < me; ++i) kkt.coeffRef(n + i, n + i) -= reg;
      ldlt.factorize(kkt);
    }

    Eigen::VectorXd rhs(dim);
    rhs.head(n) = -gf0 + gmat.transpose() *
                             Eigen::VectorXd((sigma * mu) / st.array());
    rhs.tail(me) = (beq - j_raw * x).array() / row_norm.array();
    Eigen::VectorXd sol = ldlt.solve(rhs);
    {
      const Eigen::VectorXd resid =
          rhs - kkt.selfadjointView<Eigen::Lower>() * sol;
      sol += ldlt.solve(resid);
    }

    Eigen::VectorXd dx = vscale.array() * sol.head(n).array();
    prog.project_kinematics_direction(dx);
    const Eigen::VectorXd dxs = dx.array() / vscale.array();
    const Eigen::VectorXd ds = gmat * dxs;  // linearized scaled slack change
    const Eigen::VectorXd dz = Eigen::VectorXd((sigma * mu) / st.array()) -
                               z - d.cwiseProduct(ds);
    const Eigen::VectorXd dy = sol.tail(me) - y;

    double alpha = 1.0;
    for (int i = 0; i < m; ++i) {
      if (dz[i] < 0.0) alpha = std::min(alpha, -tau * z[i] / dz[i]);
      if (ds[i] < 0.0) alpha = std::min(alpha, -tau * st[i] / ds[i]);
    }
    // the slacks are concave along the step (every row is convex), so the
    // true slack can undershoot the linear prediction: backtrack on the
    // exact slacks until the step stays safely interior
    bool accepted = false;
    Eigen::VectorXd x_try;
    for (; alpha > 1e-12; alpha *= 0.5) {
      x_try = x + alpha * dx;
      prog.project_kinematics(x_try);
      if (!prog.slacks(x_try, s_try)) continue;
      st_try = s_try.array() / rscale.array();
      if ((st_try.array() >= 5e-4 * st.array()).all()) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      finish_or_fail("step damping failed at gap " + std::to_string(gap));
      break;
    }

    x = std::move(x_try);
    st = st_try;
    z += alpha * dz;
    y += alpha * dy;
    if (opts.verbose)
      std::fprintf(stderr, "sca:   step alpha=%.3e sigma=%.2f\n", alpha, sigma);
    sigma = alpha > 0.9 ? 0.1 : (alpha > 0.5 ? 0.3 : 0.7);
  }

  // prefer the highest-objective feasible iterate; the certified iterate
  // still bounds the distance to the subproblem optimum
  double out_gap = std::isfinite(gap_best) ? gap_best : st.dot(z);
  const bool had_best = x_best.size() > 0;
  if (had_best) x = std::move(x_best);
  if (x_hi.size() > 0 && mu_hi > prog.unpack_mu(x)) {
    if (had_best)
      out_gap = std::max(0.0, prog.unpack_mu(x) + out_gap - mu_hi);
    x = std::move(x_hi);
  }
  ScaSolution out;
  out.plan = prog.unpack_plan(x);
  out.aux = prog.unpack_aux(x, out.plan);
  out.mu_lb = prog.unpack_mu(x);
  out.gap = out_gap;
  out.iterations = iter;
  return out;
}

}  // namespace uavfair
