#include "uavfair/sca.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

namespace uavfair {

namespace {

constexpr double kAlphaPrune = 1e-9;
const double kLog2e = std::log2(std::exp(1.0));

}  // namespace

ScaProgram::ScaProgram(const Schedule& schedule, const FlightPlan& ref_plan,
                     const AuxGains& ref_b, const ScenarioConfig& cfg)
    : cfg_(cfg) {
  cfg_.validate();
  M_ = cfg_.num_uavs;
  K_ = cfg_.num_gts;
  N_ = cfg_.num_steps;
  const int N1 = N_ + 1;
  if (ref_plan.num_uavs() != M_ || ref_plan.num_steps() != N_)
    throw std::invalid_argument("sca: reference plan dimensions mismatch");
  if (schedule.alpha.dim_k() != K_ || schedule.alpha.dim_m() != M_ ||
      schedule.alpha.dim_n() != N1)
    throw std::invalid_argument("sca: schedule dimensions mismatch");
  if (ref_b.b.dim_k() != K_ || ref_b.b.dim_m() != M_ || ref_b.b.dim_n() != N1)
    throw std::invalid_argument("sca: aux tensor dimensions mismatch");

  off_q_ = 0;
  off_v_ = off_q_ + 2 * M_ * N1;
  off_a_ = off_v_ + 2 * M_ * N_;
  off_l_ = off_a_ + 2 * M_ * N_;
  off_b_ = off_l_ + M_ * N_;
  off_mu_ = off_b_ + K_ * M_ * N1;

  counts_.variables = off_mu_ + 1;
  counts_.eq_rows = 4 * M_ * N_;
  counts_.speed_rows = M_ * N_;
  counts_.acc_rows = M_ * N_;
  counts_.lambda_min_rows = M_ * N_;
  counts_.lambda_quad_rows = M_ * N_;
  counts_.b_lower_rows = K_ * M_ * N1;
  counts_.b_upper_rows = K_ * M_ * N1;
  counts_.rate_rows = K_;
  counts_.energy_rows = M_;
  counts_.collision_rows = (M_ >= 2 && cfg_.d_min > 0.0)
                               ? M_ * (M_ - 1) / 2 * N1
                               : 0;

  // prune vanishing schedule weights so rate-row supports stay sparse
  alpha_ = schedule.alpha;
  alpha_total_ = Eigen::MatrixXd::Zero(K_, N1);
  for (int k = 0; k < K_; ++k)
    for (int m = 0; m < M_; ++m)
      for (int n = 0; n < N1; ++n) {
        if (alpha_(k, m, n) < kAlphaPrune)
          alpha_(k, m, n) = 0.0;
        else
          alpha_total_(k, n) += alpha_(k, m, n);
      }

  v0_.resize(M_);
  lambda0_.resize(M_);
  for (int m = 0; m < M_; ++m) {
    v0_[m] = ref_plan.velocities[m][0];
    lambda0_[m] = v0_[m].norm();
    if (lambda0_[m] <= 0.0)
      throw std::invalid_argument("sca: zero reference speed at n=0, uav " +
                                  std::to_string(m));
  }

  rbar_slope_ = Tensor3(K_, M_, N1);
  rbar_intercept_ = Tensor3(K_, M_, N1);
  rbar_iref_ = Tensor3(K_, M_, N1);
  for (int k = 0; k < K_; ++k)
    for (int m = 0; m < M_; ++m)
      for (int n = 0; n < N1; ++n) {
        const double iref = interference_sum(ref_b, k, m, n);
        const RbarCoeffs c = rbar_coeffs(iref, cfg_.sigma0_sq);
        rbar_slope_(k, m, n) = c.slope;
        rbar_intercept_(k, m, n) = c.intercept;
        rbar_iref_(k, m, n) = iref;
      }

  bmax_.reserve(std::size_t(K_) * M_ * N1);
  for (int k = 0; k < K_; ++k)
    for (int m = 0; m < M_; ++m)
      for (int n = 0; n < N1; ++n)
        bmax_.push_back(bmax_surrogate(ref_plan.positions[m][n],
                                       cfg_.gt_positions[k], cfg_));

  speed_lin_.reserve(std::size_t(M_) * N_);
  for (int m = 0; m < M_; ++m)
    for (int n = 1; n <= N_; ++n)
      speed_lin_.push_back(taylor_sq_lower(ref_plan.velocities[m][n]));

  if (counts_.collision_rows > 0) {
    for (int m = 0; m < M_; ++m)
      for (int j = m + 1; j < M_; ++j) pairs_.emplace_back(m, j);
    coll_lin_.reserve(pairs_.size() * N1);
    for (const auto& [m, j] : pairs_)
      for (int n = 0; n < N1; ++n)
        coll_lin_.push_back(collision_linearization(ref_plan.positions[m][n],
                                                    ref_plan.positions[j][n]));
  }

  // pack the reference point; lambda sits exactly on the linearized speed
  // bound, mu strictly below the worst rate row
  x_ref_ = Eigen::VectorXd::Zero(counts_.variables);
  for (int m = 0; m < M_; ++m) {
    for (int n = 0; n < N1; ++n)
      for (int d = 0; d < 2; ++d)
        x_ref_[iq(m, n, d)] = ref_plan.positions[m][n][d];
    for (int n = 1; n <= N_; ++n)
      for (int d = 0; d < 2; ++d)
        x_ref_[iv(m, n, d)] = ref_plan.velocities[m][n][d];
    for (int n = 0; n < N_; ++n)
      for (int d = 0; d < 2; ++d)
        x_ref_[ia(m, n, d)] = ref_plan.accelerations[m][n][d];
    for (int n = 1; n <= N_; ++n)
      x_ref_[il(m, n)] = ref_plan.velocities[m][n].norm();
  }
  for (int k = 0; k < K_; ++k)
    for (int m = 0; m < M_; ++m)
      for (int n = 0; n < N1; ++n) x_ref_[ib(k, m, n)] = ref_b.b(k, m, n);

  double min_rate = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K_; ++k)
    min_rate = std::min(min_rate, rate_row_value(x_ref_, k));
  x_ref_[imu()] = min_rate - 1e-3 * (1.0 + std::abs(min_rate));

  // Tight-at-reference rows get a tiny per-row relaxation so the reference is
  // strictly interior; the shifts stay far below the audit tolerances.
  relax_ = Eigen::VectorXd::Zero(num_ineq());
  Eigen::VectorXd raw(num_ineq());
  if (!slacks(x_ref_, raw)) { /* negatives handled by the floors below */ }

  // Floors make tight rows strictly interior; caps bound how much genuine
  // reference infeasibility is absorbed. Every cap is sized so a cap-level
  // shift stays below the corresponding feasibility-audit tolerance.
  const double b_scale =
      cfg_.p_max * cfg_.beta0 / (cfg_.altitude * cfg_.altitude);
  struct Family { int count; double floor; double cap; const char* name; };
  const Family families[] = {
      {counts_.speed_rows, 1e-9 * cfg_.v_max * cfg_.v_max,
       1e-6 * cfg_.v_max, "speed"},
      {counts_.acc_rows, 1e-9 * cfg_.a_max * cfg_.a_max,
       1e-6 * cfg_.a_max, "acceleration"},
      {counts_.lambda_min_rows, 1e-9 * cfg_.v_min, 1e-7 * cfg_.v_min,
       "min-speed"},
      {counts_.lambda_quad_rows, 1e-9 * cfg_.v_min * cfg_.v_min,
       5e-7 * cfg_.v_min * cfg_.v_min, "speed-slack"},
      // the b-upper shift is harmless to the emitted solution: unpack_aux
      // clamps B back under the true cap, costing O(shift/B) ~ 1e-7 in rate
      {counts_.b_lower_rows, 1e-12 * b_scale, 1e-10 * b_scale, "b-lower"},
      {counts_.b_upper_rows, 1e-8 * b_scale, 1e-7 * b_scale, "b-upper"},
      {counts_.rate_rows, 0.0, 1e-9, "rate"},
      {counts_.energy_rows, 2e-7, 8e-7, "energy"},
      {counts_.collision_rows, 1e-7 * std::max(1.0, cfg_.d_min),
       1e-6 * std::max(1.0, cfg_.d_min), "separation"},
  };
  int row = 0;
  for (const Family& fam : families) {
    for (int i = 0; i < fam.count; ++i, ++row) {
      const double need = fam.floor - raw[row];
      if (need > fam.cap) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "sca: reference plan violates %s row %d by %.3e",
                      fam.name, i, need - fam.floor);
        throw std::invalid_argument(msg);
      }
      relax_[row] = std::max(0.0, need);
    }
  }

  // Per-row slack scales balance the dual variables across families.
  row_scale_.resize(num_ineq());
  {
    Eigen::VectorXd sref(num_ineq());
    slacks(x_ref_, sref);
    int r = 0;
    for (int i = 0; i < counts_.speed_rows; ++i)
      row_scale_[r++] = cfg_.v_max * cfg_.v_max;
    for (int i = 0; i < counts_.acc_rows; ++i)
      row_scale_[r++] = cfg_.a_max * cfg_.a_max;
    for (int i = 0; i < counts_.lambda_min_rows; ++i)
      row_scale_[r++] = cfg_.v_max;
    for (int i = 0; i < counts_.lambda_quad_rows; ++i)
      row_scale_[r++] = cfg_.v_max * cfg_.v_max;
    for (int pass = 0; pass < 2; ++pass)  // b-lower, then b-upper
      for (int i = 0; i < counts_.b_lower_rows; ++i, ++r)
        row_scale_[r] =
            std::max(1e-3 * b_scale, bmax_[i].eval(bmax_[i].q_ref));
    for (int i = 0; i < counts_.rate_rows; ++i) row_scale_[r++] = 1.0;
    for (int i = 0; i < counts_.energy_rows; ++i) row_scale_[r++] = cfg_.e_max;
    for (int i = 0; i < counts_.collision_rows; ++i, ++r)
      row_scale_[r] = std::max(cfg_.d_min * cfg_.d_min, sref[r]);
  }

  // Interiorized solver start: the reference packs B exactly on its cap, so
  // the barrier Hessian there is hopelessly ill-conditioned. Backing B into
  // the interior of [0, cap] only moves the start, not the feasible set.
  x_start_ = x_ref_;
  for (int k = 0; k < K_; ++k)
    for (int m = 0; m < M_; ++m)
      for (int n = 0; n < N1; ++n) {
        const double cap =
            bmax_[(std::size_t(k) * M_ + m) * N1 + n].eval(ref_plan.positions[m][n]);
        double& b = x_start_[ib(k, m, n)];
        b = std::clamp(b, 0.02 * cap, 0.98 * cap);
      }
  // Back lambda off its quadratic cap where the energy budget allows; the
  // start otherwise sits on that row to machine precision as well. Shrinking
  // lambda raises the propulsion surrogate, so spend at most half the
  // remaining budget on it.
  for (int m = 0; m < M_; ++m) {
    const double slack_e = cfg_.e_max - energy_value(x_start_, m);
    if (!(slack_e > 0.0)) continue;
    for (double rho = 0.05; rho > 1e-7; rho *= 0.25) {
      Eigen::VectorXd cand = x_start_;
      for (int n = 1; n <= N_; ++n) {
        double& l = cand[il(m, n)];
        if (l > cfg_.v_min) l = cfg_.v_min + (l - cfg_.v_min) * (1.0 - rho);
      }
      if (cfg_.e_max - energy_value(cand, m) >= 0.5 * slack_e) {
        x_start_ = std::move(cand);
        break;
      }
    }
  }
  double start_rate = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K_; ++k)
    start_rate = std::min(start_rate, rate_row_value(x_start_, k));
  x_start_[imu()] = start_rate - 1e-3 * (1.0 + std::abs(start_rate));
}

Vec2 ScaProgram::velocity_at(const Eigen::VectorXd& x, int m, int n) const {
  if (n == 0) return v0_[m];
  return Vec2(x[iv(m, n, 0)], x[iv(m, n, 1)]);
}

double ScaProgram::rate_row_value(const Eigen::VectorXd& x, int k) const {
  const int N1 = N_ + 1;
  double sum = 0.0;
  for (int n = 0; n < N1; ++n) {
    if (alpha_total_(k, n) <= 0.0) continue;
    double s = cfg_.sigma0_sq;
    for (int j = 0; j < M_; ++j) s += x[ib(k, j, n)];
    const double log_s = std::log2(s);
    for (int m = 0; m < M_; ++m) {
      const double a = alpha_(k, m, n);
      if (a <= 0.0) continue;
      const double interf = s - cfg_.sigma0_sq - x[ib(k, m, n)];
      const double rbar = rbar_slope_(k, m, n) * (interf - rbar_iref_(k, m, n)) +
                          rbar_intercept_(k, m, n);
      sum += a * (log_s - rbar);
    }
  }
  return sum / cfg_.time_norm();
}

double ScaProgram::min_rate_row_value(const Eigen::VectorXd& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K_; ++k) best = std::min(best, rate_row_value(x, k));
  return best;
}

double ScaProgram::energy_value(const Eigen::VectorXd& x, int m) const {
  double e = 0.0;
  for (int n = 0; n < N_; ++n) {
    const Vec2 v = velocity_at(x, m, n);
    const double lam = (n == 0) ? lambda0_[m] : x[il(m, n)];
    const Vec2 a(x[ia(m, n, 0)], x[ia(m, n, 1)]);
    e += cfg_.c1 * v.norm() * v.norm() * v.norm() +
         cfg_.c2 / lam * (1.0 + a.squaredNorm() / cfg_.gravity);
  }
  const Vec2 vN = velocity_at(x, m, N_);
  e += 0.5 * cfg_.mass * (vN.squaredNorm() - v0_[m].squaredNorm());
  return e;
}

bool ScaProgram::slacks(const Eigen::VectorXd& x, Eigen::VectorXd& s) const {
  const int N1 = N_ + 1;
  s.resize(num_ineq());
  const bool relaxed = relax_.size() == s.size();
  int row = 0;
  bool ok = true;
  auto put = [&](double slack) {
    if (relaxed) slack += relax_[row];
    if (!(slack > 0.0) || !std::isfinite(slack)) ok = false;
    s[row++] = slack;
  };

  const double vmax2 = cfg_.v_max * cfg_.v_max;
  for (int m = 0; m < M_; ++m)
    for (int n = 1; n <= N_; ++n) {
      const Vec2 v(x[iv(m, n, 0)], x[iv(m, n, 1)]);
      put(vmax2 - v.squaredNorm());
    }
  const double amax2 = cfg_.a_max * cfg_.a_max;
  for (int m = 0; m < M_; ++m)
    for (int n = 0; n < N_; ++n) {
      const Vec2 a(x[ia(m, n, 0)], x[ia(m, n, 1)]);
      put(amax2 - a.squaredNorm());
    }
  for (int m = 0; m < M_; ++m)
    for (int n = 1; n <= N_; ++n) put(x[il(m, n)] - cfg_.v_min);
  for (int m = 0; m < M_; ++m)
    for (int n = 1; n <= N_; ++n) {
      const Vec2 v(x[iv(m, n, 0)], x[iv(m, n, 1)]);
      const double lam = x[il(m, n)];
      put(speed_lin_[m * N_ + n - 1].eval(v) - lam * lam);
    }
  for (int k = 0; k < K_; ++k)
    for (int m = 0; m < M_; ++m)
      for (int n = 0; n < N1; ++n) put(x[ib(k, m, n)]);
  for (int k = 0; k < K_; ++k)
    for (int m = 0; m < M_; ++m)
      for (int n = 0; n < N1; ++n) {
        const Vec2 q(x[iq(m, n, 0)], x[iq(m, n, 1)]);
        put(bmax_[(std::size_t(k) * M_ + m) * N1 + n].eval(q) -
            x[ib(k, m, n)]);
      }
  const double mu = x[imu()];
  for (int k = 0; k < K_; ++k) put(rate_row_value(x, k) - mu);
  for (int m = 0; m < M_; ++m) put(cfg_.e_max - energy_value(x, m));
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const auto& [m, j] = pairs_[p];
    for (int n = 0; n < N1; ++n) {
      const Vec2 delta(x[iq(m, n, 0)] - x[iq(j, n, 0)],
                       x[iq(m, n, 1)] - x[iq(j, n, 1)]);
      put(coll_lin_[p * N1 + n].eval(delta) - cfg_.d_min * cfg_.d_min);
    }
  }
  return ok;
}

void ScaProgram::linearize(const Eigen::VectorXd& x,
                          const Eigen::VectorXd& w1,
                          std::vector<Eigen::Triplet<double>>& jac,
                          std::vector<Eigen::Triplet<double>>& hess) const {
  const int N1 = N_ + 1;
  jac.clear();
  hess.clear();

  auto push = [&hess](int i, int j, double v) {
    if (v == 0.0) return;
    hess.emplace_back(i, j, v);
    if (i != j) hess.emplace_back(j, i, v);
  };

  int row = 0;

  // |v|^2 <= vmax^2
  for (int m = 0; m < M_; ++m)
    for (int n = 1; n <= N_; ++n, ++row) {
      const double w = w1[row];
      const int i0 = iv(m, n, 0), i1 = iv(m, n, 1);
      jac.emplace_back(row, i0, -2.0 * x[i0]);
      jac.emplace_back(row, i1, -2.0 * x[i1]);
      push(i0, i0, w * 2.0);
      push(i1, i1, w * 2.0);
    }
  // |a|^2 <= amax^2
  for (int m = 0; m < M_; ++m)
    for (int n = 0; n < N_; ++n, ++row) {
      const double w = w1[row];
      const int i0 = ia(m, n, 0), i1 = ia(m, n, 1);
      jac.emplace_back(row, i0, -2.0 * x[i0]);
      jac.emplace_back(row, i1, -2.0 * x[i1]);
      push(i0, i0, w * 2.0);
      push(i1, i1, w * 2.0);
    }
  // lambda >= vmin
  for (int m = 0; m < M_; ++m)
    for (int n = 1; n <= N_; ++n, ++row) jac.emplace_back(row, il(m, n), 1.0);
  // lambda^2 <= linearized |v|^2
  for (int m = 0; m < M_; ++m)
    for (int n = 1; n <= N_; ++n, ++row) {
      const int il_ = il(m, n), i0 = iv(m, n, 0), i1 = iv(m, n, 1);
      const Affine2& lin = speed_lin_[m * N_ + n - 1];
      jac.emplace_back(row, il_, -2.0 * x[il_]);
      jac.emplace_back(row, i0, lin.g[0]);
      jac.emplace_back(row, i1, lin.g[1]);
      push(il_, il_, w1[row] * 2.0);
    }
  // B >= 0
  for (int k = 0; k < K_; ++k)
    for (int m = 0; m < M_; ++m)
      for (int n = 0; n < N1; ++n, ++row)
        jac.emplace_back(row, ib(k, m, n), 1.0);
  // B <= quadratic cap surrogate in q
  for (int k = 0; k < K_; ++k)
    for (int m = 0; m < M_; ++m)
      for (int n = 0; n < N1; ++n, ++row) {
        const double w = w1[row];
        const BmaxSurrogate& cap = bmax_[(std::size_t(k) * M_ + m) * N1 + n];
        const int ib_ = ib(k, m, n), i0 = iq(m, n, 0), i1 = iq(m, n, 1);
        const Vec2 gq = cap.gradient(Vec2(x[i0], x[i1]));
        const double hqq = 2.0 * cap.scale * cap.inv_h4;
        jac.emplace_back(row, ib_, -1.0);
        jac.emplace_back(row, i0, gq[0]);
        jac.emplace_back(row, i1, gq[1]);
        push(i0, i0, w * hqq);
        push(i1, i1, w * hqq);
      }
  // rate rows: mu <= surrogate average rate of user k
  {
    std::vector<int> idx;
    for (int k = 0; k < K_; ++k, ++row) {
      idx.clear();
      const double inv_norm = 1.0 / cfg_.time_norm();
      for (int n = 0; n < N1; ++n) {
        const double atot = alpha_total_(k, n);
        if (atot <= 0.0) continue;
        double stot = cfg_.sigma0_sq;
        for (int j = 0; j < M_; ++j) stot += x[ib(k, j, n)];
        double slope_sum = 0.0;
        for (int m = 0; m < M_; ++m)
          slope_sum += alpha_(k, m, n) * rbar_slope_(k, m, n);
        // slack = val - mu; d val/dB_j = inv_norm*(atot*log2e/stot
        //                                          - (slope_sum - a_j A_j))
        const int base = int(idx.size());
        for (int j = 0; j < M_; ++j) {
          const double dval =
              inv_norm * (atot * kLog2e / stot -
                          (slope_sum - alpha_(k, j, n) * rbar_slope_(k, j, n)));
          idx.push_back(ib(k, j, n));
          jac.emplace_back(row, ib(k, j, n), dval);
        }
        // curvature of -val from the shared log term: PSD block over j
        const double hblock = inv_norm * atot * kLog2e / (stot * stot);
        for (int a = 0; a < M_; ++a)
          for (int b = 0; b <= a; ++b)
            push(idx[base + a], idx[base + b], w1[row] * hblock);
      }
      jac.emplace_back(row, imu(), -1.0);
    }
  }
  // energy budgets: slack = e_max - E_m, so the jacobian carries -grad E
  for (int m = 0; m < M_; ++m, ++row) {
    const double w = w1[row];
    auto add = [&](int i, double g) { jac.emplace_back(row, i, -g); };
    for (int n = 0; n < N_; ++n) {
      const Vec2 a(x[ia(m, n, 0)], x[ia(m, n, 1)]);
      const double lam = (n == 0) ? lambda0_[m] : x[il(m, n)];
      if (n >= 1) {
        const Vec2 v(x[iv(m, n, 0)], x[iv(m, n, 1)]);
        const double vn = v.norm();
        const int i0 = iv(m, n, 0), i1 = iv(m, n, 1);
        // c1 |v|^3 : grad 3 c1 |v| v, hess 3 c1 (|v| I + v v^T/|v|)
        add(i0, 3.0 * cfg_.c1 * vn * v[0]);
        add(i1, 3.0 * cfg_.c1 * vn * v[1]);
        if (vn > 0.0) {
          push(i0, i0, w * 3.0 * cfg_.c1 * (vn + v[0] * v[0] / vn));
          push(i1, i1, w * 3.0 * cfg_.c1 * (vn + v[1] * v[1] / vn));
          push(i0, i1, w * 3.0 * cfg_.c1 * v[0] * v[1] / vn);
        }
      }
      const int ia0 = ia(m, n, 0), ia1 = ia(m, n, 1);
      const double cg = cfg_.c2 / cfg_.gravity;
      const double a2 = a.squaredNorm();
      add(ia0, 2.0 * cg * a[0] / lam);
      add(ia1, 2.0 * cg * a[1] / lam);
      push(ia0, ia0, w * 2.0 * cg / lam);
      push(ia1, ia1, w * 2.0 * cg / lam);
      if (n >= 1) {
        const int il_ = il(m, n);
        add(il_, -(cfg_.c2 + cg * a2) / (lam * lam));
        push(il_, il_, w * 2.0 * (cfg_.c2 + cg * a2) / (lam * lam * lam));
        push(il_, ia0, w * -2.0 * cg * a[0] / (lam * lam));
        push(il_, ia1, w * -2.0 * cg * a[1] / (lam * lam));
      }
    }
    // kinetic boundary term (v(0) is frozen, so only v(N) appears);
    // duplicate jacobian entries for v(N) sum on assembly
    const int i0 = iv(m, N_, 0), i1 = iv(m, N_, 1);
    add(i0, cfg_.mass * x[i0]);
    add(i1, cfg_.mass * x[i1]);
    push(i0, i0, w * cfg_.mass);
    push(i1, i1, w * cfg_.mass);
  }
  // pairwise separation, affine rows
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const auto& [m, j] = pairs_[p];
    for (int n = 0; n < N1; ++n, ++row) {
      const Affine2& lin = coll_lin_[p * N1 + n];
      jac.emplace_back(row, iq(m, n, 0), lin.g[0]);
      jac.emplace_back(row, iq(m, n, 1), lin.g[1]);
      jac.emplace_back(row, iq(j, n, 0), -lin.g[0]);
      jac.emplace_back(row, iq(j, n, 1), -lin.g[1]);
    }
  }
}

void ScaProgram::equality_system(std::vector<Eigen::Triplet<double>>& jac,
                                Eigen::VectorXd& rhs) const {
  const double dt = cfg_.delta_t;
  jac.clear();
  rhs.setZero(num_eq());
  int row = 0;
  for (int m = 0; m < M_; ++m)
    for (int n = 0; n < N_; ++n)
      for (int d = 0; d < 2; ++d) {
        // v(n+1) = v(n) + a(n) dt
        jac.emplace_back(row, iv(m, n + 1, d), 1.0);
        jac.emplace_back(row, ia(m, n, d), -dt);
        if (n >= 1)
          jac.emplace_back(row, iv(m, n, d), -1.0);
        else
          rhs[row] = v0_[m][d];
        ++row;
        // q(n+1) = q(n) + v(n) dt + a(n) dt^2 / 2
        jac.emplace_back(row, iq(m, n + 1, d), 1.0);
        jac.emplace_back(row, iq(m, n, d), -1.0);
        jac.emplace_back(row, ia(m, n, d), -0.5 * dt * dt);
        if (n >= 1)
          jac.emplace_back(row, iv(m, n, d), -dt);
        else
          rhs[row] = v0_[m][d] * dt;
        ++row;
      }
}

Eigen::VectorXd ScaProgram::variable_scaling() const {
  Eigen::VectorXd s = Eigen::VectorXd::Ones(num_vars());
  double pos_scale = cfg_.altitude;
  for (const Vec2& w : cfg_.gt_positions)
    pos_scale = std::max(pos_scale, w.cwiseAbs().maxCoeff());
  const double b_scale =
      cfg_.p_max * cfg_.beta0 / (cfg_.altitude * cfg_.altitude);
  for (int m = 0; m < M_; ++m) {
    for (int n = 0; n <= N_; ++n)
      for (int d = 0; d < 2; ++d) s[iq(m, n, d)] = pos_scale;
    for (int n = 1; n <= N_; ++n) {
      for (int d = 0; d < 2; ++d) s[iv(m, n, d)] = cfg_.v_max / 5.0;
      s[il(m, n)] = cfg_.v_max / 5.0;
    }
    for (int n = 0; n < N_; ++n)
      for (int d = 0; d < 2; ++d) s[ia(m, n, d)] = cfg_.a_max;
  }
  for (int k = 0; k < K_; ++k)
    for (int m = 0; m < M_; ++m)
      for (int n = 0; n <= N_; ++n) s[ib(k, m, n)] = b_scale;
  s[imu()] = 1.0;
  return s;
}

void ScaProgram::project_kinematics(Eigen::VectorXd& x) const {
  const double dt = cfg_.delta_t;
  for (int m = 0; m < M_; ++m) {
    Vec2 v = v0_[m];
    Vec2 q(x[iq(m, 0, 0)], x[iq(m, 0, 1)]);
    for (int n = 0; n < N_; ++n) {
      const Vec2 a(x[ia(m, n, 0)], x[ia(m, n, 1)]);
      q += v * dt + 0.5 * a * dt * dt;
      v += a * dt;
      x[iv(m, n + 1, 0)] = v[0];
      x[iv(m, n + 1, 1)] = v[1];
      x[iq(m, n + 1, 0)] = q[0];
      x[iq(m, n + 1, 1)] = q[1];
    }
  }
}

void ScaProgram::project_kinematics_direction(Eigen::VectorXd& dx) const {
  // same recursion in direction space: v(0) is frozen, so its component is 0
  const double dt = cfg_.delta_t;
  for (int m = 0; m < M_; ++m) {
    Vec2 v = Vec2::Zero();
    Vec2 q(dx[iq(m, 0, 0)], dx[iq(m, 0, 1)]);
    for (int n = 0; n < N_; ++n) {
      const Vec2 a(dx[ia(m, n, 0)], dx[ia(m, n, 1)]);
      q += v * dt + 0.5 * a * dt * dt;
      v += a * dt;
      dx[iv(m, n + 1, 0)] = v[0];
      dx[iv(m, n + 1, 1)] = v[1];
      dx[iq(m, n + 1, 0)] = q[0];
      dx[iq(m, n + 1, 1)] = q[1];
    }
  }
}

FlightPlan ScaProgram::unpack_plan(const Eigen::VectorXd& x) const {
  // re-integrate the kinematics from (q(0), v(0), a) so the recursion holds
  // to machine precision regardless of linear-solver drift
  FlightPlan plan;
  plan.positions.assign(M_, std::vector<Vec2>(N_ + 1));
  plan.velocities.assign(M_, std::vector<Vec2>(N_ + 1));
  plan.accelerations.assign(M_, std::vector<Vec2>(N_));
  const double dt = cfg_.delta_t;
  for (int m = 0; m < M_; ++m) {
    plan.positions[m][0] = Vec2(x[iq(m, 0, 0)], x[iq(m, 0, 1)]);
    plan.velocities[m][0] = v0_[m];
    for (int n = 0; n < N_; ++n) {
      const Vec2 a(x[ia(m, n, 0)], x[ia(m, n, 1)]);
      plan.accelerations[m][n] = a;
      plan.velocities[m][n + 1] = plan.velocities[m][n] + a * dt;
      plan.positions[m][n + 1] =
          plan.positions[m][n] + plan.velocities[m][n] * dt + 0.5 * a * dt * dt;
    }
  }
  return plan;
}

AuxGains ScaProgram::unpack_aux(const Eigen::VectorXd& x,
                               const FlightPlan& plan) const {
  // clamp into [0, true cap at the re-integrated positions]: the kinematic
  // re-integration of unpack_plan can move q by linear-solver drift, and B
  // must stay a realizable received power there
  AuxGains aux;
  aux.b = Tensor3(K_, M_, N_ + 1);
  for (int k = 0; k < K_; ++k)
    for (int m = 0; m < M_; ++m)
      for (int n = 0; n <= N_; ++n) {
        const double cap =
            bmax_true(plan.positions[m][n], cfg_.gt_positions[k], cfg_);
        aux.b(k, m, n) = std::clamp(x[ib(k, m, n)], 0.0, cap);
      }
  return aux;
}

void ScaProgram::dump(std::ostream& out) const {
  out << "convexified trajectory/power subproblem\n"
      << "  uavs=" << M_ << " gts=" << K_ << " steps=" << N_ << "\n"
      << "  variables=" << counts_.variables
      << " (q=" << 2 * M_ * (N_ + 1) << " v=" << 2 * M_ * N_
      << " a=" << 2 * M_ * N_ << " lambda=" << M_ * N_
      << " b=" << K_ * M_ * (N_ + 1) << " mu=1)\n"
      << "  equality rows=" << counts_.eq_rows << "\n"
      << "  inequality rows=" << counts_.inequality_rows() << ":\n"
      << "    speed=" << counts_.speed_rows << " acc=" << counts_.acc_rows
      << " lambda_min=" << counts_.lambda_min_rows
      << " lambda_quad=" << counts_.lambda_quad_rows << "\n"
      << "    b_lower=" << counts_.b_lower_rows
      << " b_upper=" << counts_.b_upper_rows << " rate=" << counts_.rate_rows
      << " energy=" << counts_.energy_rows
      << " separation=" << counts_.collision_rows << "\n";
  for (int m = 0; m < M_; ++m)
    out << "  uav " << m << ": v0=(" << v0_[m][0] << ", " << v0_[m][1]
        << ") |v0|=" << lambda0_[m] << "\n";
}

ScaProgram build_sca(const Schedule& schedule, const FlightPlan& ref_plan,
                   const AuxGains& ref_b, const ScenarioConfig& cfg) {
  return ScaProgram(schedule, ref_plan, ref_b, cfg);
}

}  // namespace uavfair
