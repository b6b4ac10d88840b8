#include "uavfair/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace uavfair {

namespace {

/// All partial one-to-one matchings of M UAVs to K GTs, each encoded as a
/// per-UAV GT index (-1 = idle).
std::vector<std::vector<int>> slot_matchings(int num_uavs, int num_gts) {
  std::vector<std::vector<int>> out;
  std::vector<int> choice(num_uavs, -1);
  std::vector<bool> used(num_gts, false);
  auto recurse = [&](auto&& self, int m) -> void {
    if (m == num_uavs) {
      out.push_back(choice);
      return;
    }
    choice[m] = -1;
    self(self, m + 1);
    for (int k = 0; k < num_gts; ++k) {
      if (used[k]) continue;
      used[k] = true;
      choice[m] = k;
      self(self, m + 1);
      used[k] = false;
    }
    choice[m] = -1;
  };
  recurse(recurse, 0);
  return out;
}

}  // namespace

double enumerate_schedules(const LinkMetrics& metrics,
                           const ScenarioConfig& cfg) {
  const int K = cfg.num_gts, M = cfg.num_uavs, N1 = cfg.num_steps + 1;
  const auto matchings = slot_matchings(M, K);

  double candidates = 1.0;
  for (int n = 0; n < N1; ++n) {
    candidates *= double(matchings.size());
    if (candidates > 1e7)
      throw std::length_error(
          "enumerate_schedules: more than 1e7 binary schedules");
  }

  // per-matching per-slot rate contribution of each GT
  // contribution[n][matching][k]
  std::vector<std::vector<std::vector<double>>> contribution(
      N1, std::vector<std::vector<double>>(matchings.size(),
                                           std::vector<double>(K, 0.0)));
  for (int n = 0; n < N1; ++n)
    for (std::size_t a = 0; a < matchings.size(); ++a)
      for (int m = 0; m < M; ++m) {
        const int k = matchings[a][m];
        if (k >= 0) contribution[n][a][k] = metrics.slot_rate(k, m, n);
      }

  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> sums(K, 0.0);
  auto recurse = [&](auto&& self, int n) -> void {
    if (n == N1) {
      const double worst = *std::min_element(sums.begin(), sums.end());
      best = std::max(best, worst / cfg.time_norm());
      return;
    }
    for (std::size_t a = 0; a < matchings.size(); ++a) {
      for (int k = 0; k < K; ++k) sums[k] += contribution[n][a][k];
      self(self, n + 1);
      for (int k = 0; k < K; ++k) sums[k] -= contribution[n][a][k];
    }
  };
  recurse(recurse, 0);
  return best;
}

Eigen::VectorXd finite_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double step) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (int i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double hi = f(probe);
    probe[i] = x[i] - step;
    const double lo = f(probe);
    probe[i] = x[i];
    g[i] = (hi - lo) / (2.0 * step);
  }
  return g;
}

}  // namespace uavfair
