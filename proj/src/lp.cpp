#include "uavfair/lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "uavfair/ipm_lp.hpp"

namespace uavfair {

LpInstance build_lp(const LinkMetrics& metrics, const ScenarioConfig& cfg) {
  LpInstance inst;
  inst.rate_coefficients = metrics.slot_rate;
  inst.time_norm = cfg.time_norm();
  return inst;
}

namespace {

Schedule schedule_from(const Eigen::VectorXd& x, int K, int M, int N1) {
  Schedule s;
  s.alpha = Tensor3(K, M, N1);
  int idx = 0;
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m)
      for (int n = 0; n < N1; ++n)
        s.alpha(k, m, n) = std::clamp(x[idx++], 0.0, 1.0);
  return s;
}

}  // namespace

LpSolution solve_lp(const LpInstance& instance) {
  const int K = instance.num_gts();
  const int M = instance.num_uavs();
  const int N1 = instance.num_samples();
  const int n_alpha = K * M * N1;
  const double norm = instance.time_norm;

  const auto& r = instance.rate_coefficients;
  double r_max = 0.0;
  for (double v : r.raw()) r_max = std::max(r_max, v);
  if (r_max == 0.0) {
    LpSolution sol;
    sol.schedule.alpha = Tensor3(K, M, N1);
    return sol;  // all-zero coefficients: mu = 0 is optimal
  }

  // variable layout: alpha | mu | rate slacks | uav-row slacks | gt-row slacks
  const int idx_mu = n_alpha;
  const int idx_srate = idx_mu + 1;
  const int idx_suav = idx_srate + K;
  const int idx_sgt = idx_suav + M * N1;
  const int n_total = idx_sgt + K * N1;

  const int row_rate = 0;        // K rows:  sum r a / norm - mu - s = 0
  const int row_uav = K;         // M*N1 rows: sum_k a + s = 1
  const int row_gt = K + M * N1; // K*N1 rows: sum_m a + s = 1
  const int m_rows = K + (M + K) * N1;

  SparseColumns A;
  A.rows = m_rows;
  A.cols.resize(n_total);
  auto a_idx = [&](int k, int m, int n) { return (k * M + m) * N1 + n; };
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m)
      for (int n = 0; n < N1; ++n) {
        const int j = a_idx(k, m, n);
        if (r(k, m, n) != 0.0) A.add(row_rate + k, j, r(k, m, n) / norm);
        A.add(row_uav + m * N1 + n, j, 1.0);
        A.add(row_gt + k * N1 + n, j, 1.0);
      }
  for (int k = 0; k < K; ++k) {
    A.add(row_rate + k, idx_mu, -1.0);
    A.add(row_rate + k, idx_srate + k, -1.0);
  }
  for (int i = 0; i < M * N1; ++i) A.add(row_uav + i, idx_suav + i, 1.0);
  for (int i = 0; i < K * N1; ++i) A.add(row_gt + i, idx_sgt + i, 1.0);

  Eigen::VectorXd b = Eigen::VectorXd::Zero(m_rows);
  b.segment(row_uav, (M + K) * N1).setOnes();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n_total);
  c[idx_mu] = -1.0;  // maximize mu
  Eigen::VectorXd upper = Eigen::VectorXd::Constant(n_total, kLpInfinity);
  upper.head(n_alpha).setOnes();

  const LpResult res = solve_standard_lp(A, b, c, upper);
  if (res.status != LpStatus::optimal) {
    throw LpSolveError("solve_lp: " + res.message,
                       schedule_from(res.x, K, M, N1), res.x[idx_mu]);
  }
  LpSolution sol;
  sol.schedule = schedule_from(res.x, K, M, N1);
  sol.mu = res.x[idx_mu];
  sol.gap = res.gap;
  sol.iterations = res.iterations;
  return sol;
}

void write_lp_format(const LpInstance& instance, std::ostream& out) {
  const int K = instance.num_gts();
  const int M = instance.num_uavs();
  const int N1 = instance.num_samples();
  const auto& r = instance.rate_coefficients;
  char buf[96];
  out << "\\ max-min UAV-GT scheduling subproblem\n";
  out << "Maximize\n obj: mu\nSubject To\n";
  for (int k = 0; k < K; ++k) {
    out << " rate_k" << k << ":";
    for (int m = 0; m < M; ++m)
      for (int n = 0; n < N1; ++n) {
        if (r(k, m, n) == 0.0) continue;
        std::snprintf(buf, sizeof buf, " + %.17g a_k%d_m%d_n%d",
                      r(k, m, n) / instance.time_norm, k, m, n);
        out << buf;
      }
    out << " - mu >= 0\n";
  }
  for (int m = 0; m < M; ++m)
    for (int n = 0; n < N1; ++n) {
      out << " uav_m" << m << "_n" << n << ":";
      for (int k = 0; k < K; ++k) out << " + a_k" << k << "_m" << m << "_n" << n;
      out << " <= 1\n";
    }
  for (int k = 0; k < K; ++k)
    for (int n = 0; n < N1; ++n) {
      out << " gt_k" << k << "_n" << n << ":";
      for (int m = 0; m < M; ++m) out << " + a_k" << k << "_m" << m << "_n" << n;
      out << " <= 1\n";
    }
  out << "Bounds\n";
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m)
      for (int n = 0; n < N1; ++n)
        out << " 0 <= a_k" << k << "_m" << m << "_n" << n << " <= 1\n";
  out << " mu >= 0\nEnd\n";
}

}  // namespace uavfair
