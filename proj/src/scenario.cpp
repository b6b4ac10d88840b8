#include "uavfair/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace uavfair {

namespace {
constexpr double kKinematicTol = 1e-9;
constexpr double kSpeedTol = 1e-6;
constexpr double kSeparationTol = 1e-6;
constexpr double kScheduleTol = 1e-9;
constexpr double kPowerTol = 1e-9;
constexpr double kEnergyTol = 1e-6;

bool finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }
}  // namespace

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& field) {
    throw std::invalid_argument("invalid scenario config: " + field);
  };
  if (num_uavs < 1) fail("num_uavs");
  if (num_gts < 1) fail("num_gts");
  if (num_steps < 1) fail("num_steps");
  if (!(delta_t > 0)) fail("delta_t");
  if (!(altitude > 0)) fail("altitude");
  if (!(v_min > 0) || !(v_min < v_max)) fail("v_min/v_max");
  if (!(a_max > 0)) fail("a_max");
  if (d_min < 0) fail("d_min");
  if (!(p_max > 0)) fail("p_max");
  if (!(e_max > 0)) fail("e_max");
  if (!(sigma0_sq > 0)) fail("sigma0_sq");
  if (!(beta0 > 0)) fail("beta0");
  if (!(epsilon > 0)) fail("epsilon");
  if (max_iters < 1) fail("max_iters");
  if (!(mass > 0)) fail("mass");
  if (!(gravity > 0)) fail("gravity");
  if (!(c1 > 0) || !(c2 > 0)) fail("c1/c2");
  if (int(gt_positions.size()) != num_gts) fail("gt_positions");
  for (int k = 0; k < num_gts; ++k) {
    if (!finite(gt_positions[k])) fail("gt_positions");
    for (int j = k + 1; j < num_gts; ++j)
      if ((gt_positions[k] - gt_positions[j]).norm() == 0.0)
        fail("gt_positions (duplicate)");
  }
}

double channel_gain(const Vec2& q, const Vec2& w_k, const ScenarioConfig& cfg) {
  const double d2 = (q - w_k).squaredNorm();
  return cfg.beta0 / (cfg.altitude * cfg.altitude + d2);
}

Tensor3 gain_tensor(const FlightPlan& plan, const ScenarioConfig& cfg) {
  const int K = cfg.num_gts, M = cfg.num_uavs, N1 = cfg.num_steps + 1;
  Tensor3 h(K, M, N1);
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m)
      for (int n = 0; n < N1; ++n)
        h(k, m, n) = channel_gain(plan.positions[m][n], cfg.gt_positions[k], cfg);
  return h;
}

double sinr(int k, int m, int n, const PowerPlan& powers, const Tensor3& gains,
            const ScenarioConfig& cfg) {
  double interference = 0.0;
  for (int j = 0; j < cfg.num_uavs; ++j)
    if (j != m) interference += powers.p(j, n) * gains(k, j, n);
  return powers.p(m, n) * gains(k, m, n) / (interference + cfg.sigma0_sq);
}

LinkMetrics compute_link_metrics(const FlightPlan& plan,
                                 const PowerPlan& powers,
                                 const ScenarioConfig& cfg) {
  const int K = cfg.num_gts, M = cfg.num_uavs, N1 = cfg.num_steps + 1;
  LinkMetrics out;
  out.gain = gain_tensor(plan, cfg);
  out.sinr = Tensor3(K, M, N1);
  out.slot_rate = Tensor3(K, M, N1);
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m)
      for (int n = 0; n < N1; ++n) {
        const double g = sinr(k, m, n, powers, out.gain, cfg);
        out.sinr(k, m, n) = g;
        out.slot_rate(k, m, n) = std::log2(1.0 + g);
      }
  return out;
}

LinkMetrics metrics_from_aux(const AuxGains& aux, const FlightPlan& plan,
                             const ScenarioConfig& cfg) {
  const int K = cfg.num_gts, M = cfg.num_uavs, N1 = cfg.num_steps + 1;
  LinkMetrics out;
  out.gain = gain_tensor(plan, cfg);
  out.sinr = Tensor3(K, M, N1);
  out.slot_rate = Tensor3(K, M, N1);
  for (int k = 0; k < K; ++k)
    for (int n = 0; n < N1; ++n) {
      double total = 0.0;
      for (int j = 0; j < M; ++j) total += aux.b(k, j, n);
      for (int m = 0; m < M; ++m) {
        const double interference = total - aux.b(k, m, n);
        const double g = aux.b(k, m, n) / (interference + cfg.sigma0_sq);
        out.sinr(k, m, n) = g;
        out.slot_rate(k, m, n) = std::log2(1.0 + g);
      }
    }
  return out;
}

double average_rate(int k, const Schedule& schedule, const LinkMetrics& metrics,
                    const ScenarioConfig& cfg) {
  double sum = 0.0;
  for (int m = 0; m < cfg.num_uavs; ++m)
    for (int n = 0; n <= cfg.num_steps; ++n)
      sum += schedule.alpha(k, m, n) * metrics.slot_rate(k, m, n);
  return sum / cfg.time_norm();
}

double propulsion_energy(int m, const FlightPlan& plan,
                         const ScenarioConfig& cfg) {
  const int N = plan.num_steps();
  double e = 0.0;
  for (int n = 0; n < N; ++n) {
    const double speed = plan.velocities[m][n].norm();
    if (speed == 0.0)
      throw std::domain_error("propulsion_energy: zero speed at slot " +
                              std::to_string(n));
    const double a2 = plan.accelerations[m][n].squaredNorm();
    e += cfg.c1 * speed * speed * speed +
         cfg.c2 / speed * (1.0 + a2 / cfg.gravity);
  }
  e += 0.5 * cfg.mass * (plan.velocities[m][N].squaredNorm() -
                         plan.velocities[m][0].squaredNorm());
  return e;
}

std::vector<Violation> audit_feasibility(const FlightPlan& plan,
                                         const Schedule& schedule,
                                         const PowerPlan& powers,
                                         const ScenarioConfig& cfg) {
  std::vector<Violation> v;
  const int K = cfg.num_gts, M = cfg.num_uavs, N = cfg.num_steps;
  const double dt = cfg.delta_t;

  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      const Vec2 dv = plan.velocities[m][n + 1] - plan.velocities[m][n] -
                      plan.accelerations[m][n] * dt;
      if (dv.norm() > kKinematicTol)
        v.push_back({"kinematics_velocity", m, -1, n, dv.norm()});
      const Vec2 dq = plan.positions[m][n + 1] - plan.positions[m][n] -
                      plan.velocities[m][n] * dt -
                      0.5 * plan.accelerations[m][n] * dt * dt;
      if (dq.norm() > kKinematicTol)
        v.push_back({"kinematics_position", m, -1, n, dq.norm()});
    }
    for (int n = 0; n <= N; ++n) {
      const double s = plan.velocities[m][n].norm();
      if (s > cfg.v_max + kSpeedTol)
        v.push_back({"v_max", m, -1, n, s - cfg.v_max});
      if (s < cfg.v_min - kSpeedTol)
        v.push_back({"v_min", m, -1, n, cfg.v_min - s});
    }
    for (int n = 0; n < N; ++n) {
      const double a = plan.accelerations[m][n].norm();
      if (a > cfg.a_max + kSpeedTol)
        v.push_back({"a_max", m, -1, n, a - cfg.a_max});
    }
  }

  for (int n = 0; n <= N; ++n)
    for (int m = 0; m < M; ++m)
      for (int j = m + 1; j < M; ++j) {
        const double d = (plan.positions[m][n] - plan.positions[j][n]).norm();
        if (d < cfg.d_min - kSeparationTol)
          v.push_back({"d_min", m, j, n, cfg.d_min - d});
      }

  for (int n = 0; n <= N; ++n) {
    for (int m = 0; m < M; ++m) {
      double row = 0.0;
      for (int k = 0; k < K; ++k) {
        const double a = schedule.alpha(k, m, n);
        if (a < -kScheduleTol || a > 1.0 + kScheduleTol)
          v.push_back({"alpha_box", m, k, n, std::max(-a, a - 1.0)});
        row += a;
      }
      if (row > 1.0 + kScheduleTol)
        v.push_back({"alpha_uav_sum", m, -1, n, row - 1.0});
    }
    for (int k = 0; k < K; ++k) {
      double col = 0.0;
      for (int m = 0; m < M; ++m) col += schedule.alpha(k, m, n);
      if (col > 1.0 + kScheduleTol)
        v.push_back({"alpha_gt_sum", -1, k, n, col - 1.0});
    }
  }

  for (int m = 0; m < M; ++m)
    for (int n = 0; n <= N; ++n) {
      const double p = powers.p(m, n);
      if (p < -kPowerTol || p > cfg.p_max + kPowerTol)
        v.push_back({"p_max", m, -1, n, std::max(-p, p - cfg.p_max)});
    }

  for (int m = 0; m < M; ++m) {
    const double e = propulsion_energy(m, plan, cfg);
    if (e > cfg.e_max + kEnergyTol)
      v.push_back({"e_max", m, -1, -1, e - cfg.e_max});
  }
  return v;
}

PerformanceReport evaluate_performance(const FlightPlan& plan,
                                       const Schedule& schedule,
                                       const PowerPlan& powers,
                                       const ScenarioConfig& cfg) {
  PerformanceReport rep;
  const LinkMetrics metrics = compute_link_metrics(plan, powers, cfg);
  rep.rate_per_gt.resize(cfg.num_gts);
  rep.connection_time_per_gt.assign(cfg.num_gts, 0.0);
  for (int k = 0; k < cfg.num_gts; ++k) {
    rep.rate_per_gt[k] = average_rate(k, schedule, metrics, cfg);
    for (int m = 0; m < cfg.num_uavs; ++m)
      for (int n = 0; n <= cfg.num_steps; ++n)
        rep.connection_time_per_gt[k] += cfg.delta_t * schedule.alpha(k, m, n);
  }
  rep.min_rate = *std::min_element(rep.rate_per_gt.begin(), rep.rate_per_gt.end());
  rep.energy_per_uav.resize(cfg.num_uavs);
  for (int m = 0; m < cfg.num_uavs; ++m)
    rep.energy_per_uav[m] = propulsion_energy(m, plan, cfg);
  return rep;
}

}  // namespace uavfair
