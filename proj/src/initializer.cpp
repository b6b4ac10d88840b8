#include "uavfair/initializer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace uavfair {

namespace {

int nearest_centroid(const Vec2& x, const std::vector<Vec2>& centroids) {
  int best = 0;
  double best_d = (x - centroids[0]).squaredNorm();
  for (int i = 1; i < int(centroids.size()); ++i) {
    const double d = (x - centroids[i]).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

double kmeans_objective(const std::vector<Vec2>& gt_positions,
                        const Clustering& clustering) {
  double obj = 0.0;
  for (int k = 0; k < int(gt_positions.size()); ++k)
    obj += (gt_positions[k] - clustering.centroids[clustering.assignment[k]])
               .squaredNorm();
  return obj;
}

namespace {

Clustering kmeans_once(const std::vector<Vec2>& gt_positions, int num_clusters,
                       std::uint64_t seed) {
  const int K = int(gt_positions.size());
  const int M = num_clusters;

  // seed centroids at M distinct GT positions (Fisher-Yates prefix)
  std::mt19937_64 rng(seed);
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < M; ++i) {
    const int j = i + int(rng() % std::uint64_t(K - i));
    std::swap(order[i], order[j]);
  }
  Clustering c;
  c.centroids.resize(M);
  for (int i = 0; i < M; ++i) c.centroids[i] = gt_positions[order[i]];
  c.assignment.assign(K, -1);

  for (int sweep = 0; sweep < 1000; ++sweep) {
    bool changed = false;
    for (int k = 0; k < K; ++k) {
      const int a = nearest_centroid(gt_positions[k], c.centroids);
      if (a != c.assignment[k]) {
        c.assignment[k] = a;
        changed = true;
      }
    }
    std::vector<Vec2> sums(M, Vec2::Zero());
    std::vector<int> counts(M, 0);
    for (int k = 0; k < K; ++k) {
      sums[c.assignment[k]] += gt_positions[k];
      ++counts[c.assignment[k]];
    }
    for (int i = 0; i < M; ++i) {
      if (counts[i] > 0) {
        c.centroids[i] = sums[i] / counts[i];
      } else {
        // reseed an empty cluster at the point farthest from its centroid
        int far_k = 0;
        double far_d = -1.0;
        for (int k = 0; k < K; ++k) {
          const double d =
              (gt_positions[k] - c.centroids[c.assignment[k]]).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far_k = k;
          }
        }
        c.centroids[i] = gt_positions[far_k];
        changed = true;
      }
    }
    if (!changed) break;
  }

  c.radii.assign(M, 0.0);
  std::vector<int> counts(M, 0);
  for (int k = 0; k < K; ++k) {
    c.radii[c.assignment[k]] += (gt_positions[k] - c.centroids[c.assignment[k]]).norm();
    ++counts[c.assignment[k]];
  }
  for (int i = 0; i < M; ++i)
    if (counts[i] > 0) c.radii[i] /= counts[i];
  return c;
}

}  // namespace

Clustering kmeans(const std::vector<Vec2>& gt_positions, int num_clusters,
                  std::uint64_t seed) {
  if (num_clusters > int(gt_positions.size()))
    throw InitializationError("kmeans: more clusters than ground stations");

  // Lloyd iterations only find a local optimum of the seeded start, and a
  // lopsided split degrades everything downstream; take the best of several
  // deterministic restarts
  constexpr int kRestarts = 16;
  Clustering best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int r = 0; r < kRestarts; ++r) {
    Clustering c = kmeans_once(gt_positions, num_clusters,
                               seed + 0x51'7c'c1'b7ull * std::uint64_t(r));
    const double obj = kmeans_objective(gt_positions, c);
    if (obj < best_obj) {
      best_obj = obj;
      best = std::move(c);
    }
  }
  return best;
}

std::vector<double> default_initial_speeds(const ScenarioConfig& cfg) {
  std::vector<double> speeds(cfg.num_uavs);
  for (int m = 0; m < cfg.num_uavs; ++m) {
    const double t = cfg.num_uavs > 1 ? double(m) / (cfg.num_uavs - 1) : 0.0;
    speeds[m] = std::clamp(3.0 + t, cfg.v_min, cfg.v_max);
  }
  return speeds;
}

FlightPlan circular_plan(const Clustering& clustering,
                         const ScenarioConfig& cfg,
                         const std::vector<double>& initial_speeds) {
  const int M = int(clustering.centroids.size());
  const int N = cfg.num_steps;
  const double dt = cfg.delta_t;
  if (int(initial_speeds.size()) != M)
    throw InitializationError("circular_plan: one speed per UAV required");

  std::vector<double> radius(M);
  for (int m = 0; m < M; ++m) {
    radius[m] = clustering.radii[m];
    if (radius[m] <= 0.0) radius[m] = std::max(cfg.d_min, 5.0);
    const double s = initial_speeds[m];
    if (s < cfg.v_min || s > cfg.v_max)
      throw InitializationError("circular_plan: speed of UAV " +
                                std::to_string(m) + " outside [v_min, v_max]");
    if (s * s / radius[m] > cfg.a_max)
      throw InitializationError(
          "circular_plan: centripetal acceleration exceeds a_max for UAV " +
          std::to_string(m));
  }

  auto build = [&](const std::vector<double>& phase) {
    FlightPlan plan;
    plan.positions.assign(M, {});
    plan.velocities.assign(M, {});
    plan.accelerations.assign(M, {});
    for (int m = 0; m < M; ++m) {
      const double r = radius[m];
      const double s = initial_speeds[m];
      // speed chosen so that the discrete recursion reproduces the circle
      // exactly with |v(n)| = s at every sample
      const double omega = 2.0 / dt * std::atan(s * dt / (2.0 * r));
      plan.positions[m].resize(N + 1);
      plan.velocities[m].resize(N + 1);
      plan.accelerations[m].resize(N);
      for (int n = 0; n <= N; ++n) {
        const double th = phase[m] + omega * n * dt;
        plan.positions[m][n] =
            clustering.centroids[m] + r * Vec2(std::cos(th), std::sin(th));
        plan.velocities[m][n] = s * Vec2(-std::sin(th), std::cos(th));
      }
      for (int n = 0; n < N; ++n)
        plan.accelerations[m][n] =
            (plan.velocities[m][n + 1] - plan.velocities[m][n]) / dt;
      // make the position recursion hold to machine precision
      for (int n = 0; n < N; ++n)
        plan.positions[m][n + 1] = plan.positions[m][n] +
                                   plan.velocities[m][n] * dt +
                                   0.5 * plan.accelerations[m][n] * dt * dt;
    }
    return plan;
  };

  auto min_separation = [&](const FlightPlan& plan) {
    double sep = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= N; ++n)
      for (int m = 0; m < M; ++m)
        for (int j = m + 1; j < M; ++j)
          sep = std::min(sep,
                         (plan.positions[m][n] - plan.positions[j][n]).norm());
    return sep;
  };

  const int attempts = 24;
  for (int t = 0; t < attempts; ++t) {
    std::vector<double> phase(M);
    for (int m = 0; m < M; ++m)
      phase[m] = 2.0 * M_PI * m / M + t * 2.0 * M_PI * m / (attempts * M);
    FlightPlan plan = build(phase);
    if (M == 1 || min_separation(plan) >= cfg.d_min) return plan;
  }
  throw InitializationError(
      "circular_plan: could not phase-offset circles to respect d_min");
}

Schedule initial_schedule(const Clustering& clustering, const FlightPlan& plan,
                          const ScenarioConfig& cfg) {
  const int K = cfg.num_gts, M = cfg.num_uavs, N = cfg.num_steps;
  Schedule s;
  s.alpha = Tensor3(K, M, N + 1);
  for (int m = 0; m < M; ++m)
    for (int n = 0; n <= N; ++n) {
      int best_k = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k) {
        if (clustering.assignment[k] != m) continue;
        const double d = (plan.positions[m][n] - cfg.gt_positions[k]).norm();
        if (d < best_d) {
          best_d = d;
          best_k = k;
        }
      }
      if (best_k >= 0) s.alpha(best_k, m, n) = 1.0;
    }
  return s;
}

AuxGains initial_aux_gains(const FlightPlan& plan, const ScenarioConfig& cfg) {
  AuxGains aux;
  aux.b = gain_tensor(plan, cfg);
  for (double& v : aux.b.raw()) v *= cfg.p_max;
  return aux;
}

}  // namespace uavfair
