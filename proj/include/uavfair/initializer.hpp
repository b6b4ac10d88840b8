#ifndef UAVFAIR_INITIALIZER_HPP
#define UAVFAIR_INITIALIZER_HPP

#include <stdexcept>

#include "uavfair/scenario.hpp"

namespace uavfair {

struct InitializationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Clustering {
  std::vector<Vec2> centroids;      // one per UAV
  std::vector<int> assignment;      // GT index -> cluster index
  std::vector<double> radii;        // mean member distance per cluster
};

/// Seeded Lloyd iteration; centroids seeded at M distinct GT positions.
/// Empty clusters are reseeded at the point farthest from its nearest
/// centroid. Throws InitializationError when M > K.
Clustering kmeans(const std::vector<Vec2>& gt_positions, int num_clusters,
                  std::uint64_t seed);

/// Sum of squared distances to assigned centroids (the Lloyd objective).
double kmeans_objective(const std::vector<Vec2>& gt_positions,
                        const Clustering& clustering);

/// Constant-speed counter-clockwise circles around the cluster centroids.
/// Discrete kinematics hold exactly; UAV m starts at phase 2*pi*m/M.
FlightPlan circular_plan(const Clustering& clustering,
                         const ScenarioConfig& cfg,
                         const std::vector<double>& initial_speeds);

/// Default starting speeds: 3 and 4 m/s for two UAVs, evenly spread in
/// [3, 4] otherwise, clamped into [v_min, v_max].
std::vector<double> default_initial_speeds(const ScenarioConfig& cfg);

/// Each UAV serves the nearest GT of its own cluster at every step
/// (ties to the lowest GT index).
Schedule initial_schedule(const Clustering& clustering, const FlightPlan& plan,
                          const ScenarioConfig& cfg);

/// B = p_max * h for every (k, m, n).
AuxGains initial_aux_gains(const FlightPlan& plan, const ScenarioConfig& cfg);

}  // namespace uavfair

#endif
