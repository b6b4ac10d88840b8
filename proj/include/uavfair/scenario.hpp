#ifndef UAVFAIR_SCENARIO_HPP
#define UAVFAIR_SCENARIO_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace uavfair {

using Vec2 = Eigen::Vector2d;

/// All physical and algorithmic constants of one problem instance.
/// Immutable after validate(); SI units throughout (watts, meters, seconds).
struct ScenarioConfig {
  int num_uavs = 0;   // M
  int num_gts = 0;    // K
  int num_steps = 0;  // N (positions sampled at n = 0..N)
  double delta_t = 1.0;
  double altitude = 100.0;  // H
  std::vector<Vec2> gt_positions;

  double beta0 = 1e-6;      // channel gain at 1 m
  double sigma0_sq = 1e-14; // noise power, watts
  double p_max = 0.1;

  double v_min = 1.5;
  double v_max = 50.0;
  double a_max = 5.0;
  double d_min = 10.0;
  double e_max = 2e5;
  double c1 = 9.26e-4;
  double c2 = 2250.0;
  double mass = 2.0;
  double gravity = 9.8;

  double epsilon = 1e-3;
  int max_iters = 50;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// Rate normalization 1/max(N,1); the rate sum runs over N+1 samples.
  double time_norm() const { return num_steps > 0 ? double(num_steps) : 1.0; }
};

/// Dense (k, m, n) tensor, n = 0..N.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int k, int m, int n1, double fill = 0.0)
      : k_(k), m_(m), n1_(n1), data_(std::size_t(k) * m * n1, fill) {}
  double& operator()(int k, int m, int n) { return data_[idx(k, m, n)]; }
  double operator()(int k, int m, int n) const { return data_[idx(k, m, n)]; }
  int dim_k() const { return k_; }
  int dim_m() const { return m_; }
  int dim_n() const { return n1_; }
  const std::vector<double>& raw() const { return data_; }
  std::vector<double>& raw() { return data_; }

 private:
  std::size_t idx(int k, int m, int n) const {
    return (std::size_t(k) * m_ + m) * n1_ + n;
  }
  int k_ = 0, m_ = 0, n1_ = 0;
  std::vector<double> data_;
};

/// Discrete trajectories: positions/velocities at n = 0..N, accelerations at
/// n = 0..N-1, linked by the first-order kinematic recursion.
struct FlightPlan {
  std::vector<std::vector<Vec2>> positions;      // [m][0..N]
  std::vector<std::vector<Vec2>> velocities;     // [m][0..N]
  std::vector<std::vector<Vec2>> accelerations;  // [m][0..N-1]

  int num_uavs() const { return int(positions.size()); }
  int num_steps() const {
    return positions.empty() ? 0 : int(positions[0].size()) - 1;
  }
};

/// Relaxed association tensor, alpha in [0,1]^{K x M x (N+1)}.
struct Schedule {
  Tensor3 alpha;
};

struct PowerPlan {
  Eigen::MatrixXd p;  // (m, n), watts
};

/// Auxiliary received-power tensor B_{k,m}(n).
struct AuxGains {
  Tensor3 b;
};

struct LinkMetrics {
  Tensor3 gain;       // h_{k,m}(n)
  Tensor3 sinr;       // gamma_{k,m}(n)
  Tensor3 slot_rate;  // log2(1 + gamma)
};

struct PerformanceReport {
  std::vector<double> rate_per_gt;
  std::vector<double> energy_per_uav;
  double min_rate = 0.0;
  std::vector<double> connection_time_per_gt;
};

struct Violation {
  std::string constraint;
  int m = -1, k = -1, n = -1;
  double magnitude = 0.0;
};

double channel_gain(const Vec2& q, const Vec2& w_k, const ScenarioConfig& cfg);

/// Gain tensor for a plan at every (k, m, n).
Tensor3 gain_tensor(const FlightPlan& plan, const ScenarioConfig& cfg);

double sinr(int k, int m, int n, const PowerPlan& powers, const Tensor3& gains,
            const ScenarioConfig& cfg);

LinkMetrics compute_link_metrics(const FlightPlan& plan,
                                 const PowerPlan& powers,
                                 const ScenarioConfig& cfg);

/// Metrics implied by the auxiliary tensor B: gamma = B / (interference + noise).
LinkMetrics metrics_from_aux(const AuxGains& aux, const FlightPlan& plan,
                             const ScenarioConfig& cfg);

double average_rate(int k, const Schedule& schedule, const LinkMetrics& metrics,
                    const ScenarioConfig& cfg);

/// Rotary-wing propulsion energy: slot sum over n = 0..N-1 plus the kinetic
/// boundary term. Throws std::domain_error on a zero-speed sample.
double propulsion_energy(int m, const FlightPlan& plan,
                         const ScenarioConfig& cfg);

std::vector<Violation> audit_feasibility(const FlightPlan& plan,
                                         const Schedule& schedule,
                                         const PowerPlan& powers,
                                         const ScenarioConfig& cfg);

PerformanceReport evaluate_performance(const FlightPlan& plan,
                                       const Schedule& schedule,
                                       const PowerPlan& powers,
                                       const ScenarioConfig& cfg);

}  // namespace uavfair

#endif
