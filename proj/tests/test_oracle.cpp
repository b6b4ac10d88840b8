#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "uavfair/lp.hpp"
#include "uavfair/oracle.hpp"

using namespace uavfair;

namespace {

ScenarioConfig tiny_cfg(int K, int M, int N) {
  ScenarioConfig cfg;
  cfg.num_gts = K;
  cfg.num_uavs = M;
  cfg.num_steps = N;
  return cfg;
}

}  // namespace

TEST_CASE("binary enumeration on a hand-solvable instance") {
  // one UAV, two users, one slot: only one user can ever be served, the
  // other stays at zero rate, so the binary max-min optimum is 0
  ScenarioConfig cfg = tiny_cfg(2, 1, 0);
  LinkMetrics metrics;
  metrics.slot_rate = Tensor3(2, 1, 1);
  metrics.slot_rate(0, 0, 0) = 2.0;
  metrics.slot_rate(1, 0, 0) = 1.0;
  CHECK(enumerate_schedules(metrics, cfg) == doctest::Approx(0.0));
}

TEST_CASE("binary enumeration alternates users over two slots") {
  // two slots: serve user 0 in one slot and user 1 in the other;
  // optimum is min(2, 1) / time_norm = 1 / 1 = 1
  ScenarioConfig cfg = tiny_cfg(2, 1, 1);
  LinkMetrics metrics;
  metrics.slot_rate = Tensor3(2, 1, 2);
  for (int n = 0; n < 2; ++n) {
    metrics.slot_rate(0, 0, n) = 2.0;
    metrics.slot_rate(1, 0, n) = 1.0;
  }
  CHECK(enumerate_schedules(metrics, cfg) == doctest::Approx(1.0));
}

TEST_CASE("binary enumeration uses both UAVs simultaneously") {
  // two UAVs, two users, one slot; a perfect matching serves both at once
  ScenarioConfig cfg = tiny_cfg(2, 2, 0);
  LinkMetrics metrics;
  metrics.slot_rate = Tensor3(2, 2, 1);
  metrics.slot_rate(0, 0, 0) = 2.0;
  metrics.slot_rate(0, 1, 0) = 0.5;
  metrics.slot_rate(1, 0, 0) = 0.3;
  metrics.slot_rate(1, 1, 0) = 3.0;
  CHECK(enumerate_schedules(metrics, cfg) == doctest::Approx(2.0));
}

TEST_CASE("enumeration matches the LP when the LP relaxation is integral") {
  // with equal coefficients per user and enough slots the LP optimum is
  // achieved by a binary round-robin, so both must agree
  ScenarioConfig cfg = tiny_cfg(2, 1, 3);  // 4 samples
  LinkMetrics metrics;
  metrics.slot_rate = Tensor3(2, 1, 4);
  for (int n = 0; n < 4; ++n) {
    metrics.slot_rate(0, 0, n) = 1.0;
    metrics.slot_rate(1, 0, n) = 1.0;
  }
  const double binary = enumerate_schedules(metrics, cfg);
  const LpSolution lp = solve_lp(build_lp(metrics, cfg));
  CHECK(binary == doctest::Approx(2.0 / 3.0));
  CHECK(lp.mu == doctest::Approx(binary).epsilon(1e-7));
}

TEST_CASE("enumeration refuses instances beyond the candidate budget") {
  // matchings(2 UAVs, 6 GTs) = 31 per slot; 31^20 >> 1e7
  ScenarioConfig cfg = tiny_cfg(6, 2, 19);
  LinkMetrics metrics;
  metrics.slot_rate = Tensor3(6, 2, 20, 1.0);
  CHECK_THROWS_AS(enumerate_schedules(metrics, cfg), std::length_error);
}

TEST_CASE("finite differences recover a known gradient") {
  // f(x) = 3 x0^2 + x0 x1 - 2 x1 has gradient (6 x0 + x1, x0 - 2)
  auto f = [](const Eigen::VectorXd& x) {
    return 3.0 * x[0] * x[0] + x[0] * x[1] - 2.0 * x[1];
  };
  Eigen::VectorXd x(2);
  x << 1.5, -2.0;
  const Eigen::VectorXd g = finite_difference_gradient(f, x, 1e-5);
  CHECK(g[0] == doctest::Approx(6.0 * 1.5 - 2.0).epsilon(1e-8));
  CHECK(g[1] == doctest::Approx(1.5 - 2.0).epsilon(1e-8));
}
