#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "uavfair/config_io.hpp"
#include "uavfair/initializer.hpp"

using namespace uavfair;

namespace {

ScenarioConfig base_config(int M, int K, int N) {
  ScenarioConfig cfg;
  cfg.num_uavs = M;
  cfg.num_gts = K;
  cfg.num_steps = N;
  cfg.gt_positions = random_gt_positions(K, 500.0, 500.0, 9);
  return cfg;
}

}  // namespace

TEST_CASE("kmeans recovers two well-separated blobs") {
  // two tight clusters 400 m apart: any sane clustering must split them
  std::vector<Vec2> pts = {Vec2(0, 0),   Vec2(5, 2),   Vec2(-3, 4),
                           Vec2(400, 0), Vec2(405, 3), Vec2(398, -4)};
  const Clustering c = kmeans(pts, 2, 1);
  REQUIRE(c.centroids.size() == 2);
  REQUIRE(c.assignment.size() == 6);
  CHECK(c.assignment[0] == c.assignment[1]);
  CHECK(c.assignment[1] == c.assignment[2]);
  CHECK(c.assignment[3] == c.assignment[4]);
  CHECK(c.assignment[4] == c.assignment[5]);
  CHECK(c.assignment[0] != c.assignment[3]);

  // centroids are the blob means
  const int a = c.assignment[0], b = c.assignment[3];
  CHECK(c.centroids[a].x() == doctest::Approx(2.0 / 3.0));
  CHECK(c.centroids[a].y() == doctest::Approx(2.0));
  CHECK(c.centroids[b].x() == doctest::Approx(401.0));
  CHECK(c.centroids[b].y() == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("kmeans objective never beats the true partition on blobs") {
  std::vector<Vec2> pts = {Vec2(0, 0),   Vec2(5, 2),   Vec2(-3, 4),
                           Vec2(400, 0), Vec2(405, 3), Vec2(398, -4)};
  const Clustering c = kmeans(pts, 2, 1);
  // hand-computed optimum: sum of within-blob squared distances
  Clustering ideal;
  ideal.centroids = {Vec2(2.0 / 3.0, 2.0), Vec2(401.0, -1.0 / 3.0)};
  ideal.assignment = {0, 0, 0, 1, 1, 1};
  CHECK(kmeans_objective(pts, c) ==
        doctest::Approx(kmeans_objective(pts, ideal)).epsilon(1e-12));
}

TEST_CASE("kmeans rejects more clusters than points") {
  std::vector<Vec2> pts = {Vec2(0, 0), Vec2(1, 1)};
  CHECK_THROWS_AS(kmeans(pts, 3, 1), InitializationError);
}

TEST_CASE("kmeans is deterministic in the seed") {
  const ScenarioConfig cfg = base_config(2, 8, 10);
  const Clustering c1 = kmeans(cfg.gt_positions, 2, 5);
  const Clustering c2 = kmeans(cfg.gt_positions, 2, 5);
  CHECK(c1.assignment == c2.assignment);
  for (int m = 0; m < 2; ++m) {
    CHECK(c1.centroids[m].x() == c2.centroids[m].x());
    CHECK(c1.centroids[m].y() == c2.centroids[m].y());
  }
}

TEST_CASE("circular plan satisfies the discrete kinematics exactly") {
  const ScenarioConfig cfg = base_config(2, 6, 40);
  const Clustering c = kmeans(cfg.gt_positions, 2, cfg.seed);
  const FlightPlan plan = circular_plan(c, cfg, default_initial_speeds(cfg));

  REQUIRE(plan.num_uavs() == 2);
  REQUIRE(plan.num_steps() == 40);
  const double dt = cfg.delta_t;
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 40; ++n) {
      const Vec2 rv = plan.velocities[m][n + 1] - plan.velocities[m][n] -
                      plan.accelerations[m][n] * dt;
      const Vec2 rq = plan.positions[m][n + 1] - plan.positions[m][n] -
                      plan.velocities[m][n] * dt -
                      0.5 * plan.accelerations[m][n] * dt * dt;
      CHECK(rv.norm() <= 1e-12);
      CHECK(rq.norm() <= 1e-12);
    }
}

TEST_CASE("circular plan holds speed, acceleration and separation limits") {
  const ScenarioConfig cfg = base_config(2, 6, 60);
  const Clustering c = kmeans(cfg.gt_positions, 2, cfg.seed);
  const auto speeds = default_initial_speeds(cfg);
  CHECK(speeds[0] == doctest::Approx(3.0));
  CHECK(speeds[1] == doctest::Approx(4.0));

  const FlightPlan plan = circular_plan(c, cfg, speeds);
  for (int m = 0; m < 2; ++m) {
    for (int n = 0; n <= 60; ++n) {
      const double s = plan.velocities[m][n].norm();
      CHECK(s == doctest::Approx(speeds[m]).epsilon(1e-9));
      CHECK(s >= cfg.v_min);
      CHECK(s <= cfg.v_max);
    }
    for (int n = 0; n < 60; ++n)
      CHECK(plan.accelerations[m][n].norm() <= cfg.a_max + 1e-9);
  }
  for (int n = 0; n <= 60; ++n)
    CHECK((plan.positions[0][n] - plan.positions[1][n]).norm() >=
          cfg.d_min - 1e-9);
}

TEST_CASE("circular plan moves counter-clockwise around the centroid") {
  Clustering c;
  c.centroids = {Vec2(100, 100)};
  c.assignment = {0};
  c.radii = {50.0};
  ScenarioConfig cfg = base_config(1, 1, 10);
  cfg.gt_positions = {Vec2(100, 100)};
  const FlightPlan plan = circular_plan(c, cfg, {3.0});
  // cross(r, v) > 0 means counter-clockwise
  for (int n = 0; n <= 10; ++n) {
    const Vec2 r = plan.positions[0][n] - c.centroids[0];
    const double cross =
        r.x() * plan.velocities[0][n].y() - r.y() * plan.velocities[0][n].x();
    CHECK(cross > 0.0);
    CHECK(r.norm() == doctest::Approx(50.0).epsilon(1e-9));
  }
  // starting phase 0: position on the +x side of the centroid
  CHECK(plan.positions[0][0].x() == doctest::Approx(150.0));
  CHECK(plan.positions[0][0].y() == doctest::Approx(100.0));
}

TEST_CASE("circular plan rejects an infeasible centripetal acceleration") {
  Clustering c;
  c.centroids = {Vec2(0, 0)};
  c.assignment = {0};
  c.radii = {0.5};  // s^2/r = 18 > a_max = 5
  ScenarioConfig cfg = base_config(1, 1, 5);
  CHECK_THROWS_AS(circular_plan(c, cfg, {3.0}), InitializationError);
}

TEST_CASE("initial schedule serves the nearest in-cluster ground station") {
  ScenarioConfig cfg = base_config(1, 3, 4);
  cfg.gt_positions = {Vec2(0, 0), Vec2(200, 0), Vec2(50, 0)};
  Clustering c;
  c.centroids = {Vec2(60, 0)};
  c.assignment = {0, 0, 0};
  c.radii = {80.0};
  const FlightPlan plan = circular_plan(c, cfg, {3.0});

  const Schedule s = initial_schedule(c, plan, cfg);
  for (int n = 0; n <= 4; ++n) {
    double row = 0.0;
    int served = -1;
    for (int k = 0; k < 3; ++k) {
      row += s.alpha(k, 0, n);
      if (s.alpha(k, 0, n) == 1.0) served = k;
    }
    CHECK(row == doctest::Approx(1.0));
    REQUIRE(served >= 0);
    // served GT is at minimum distance among cluster members
    const double ds = (plan.positions[0][n] - cfg.gt_positions[served]).norm();
    for (int k = 0; k < 3; ++k)
      CHECK(ds <= (plan.positions[0][n] - cfg.gt_positions[k]).norm() + 1e-12);
  }
}

TEST_CASE("initial aux gains equal p_max times the channel gain") {
  const ScenarioConfig cfg = base_config(2, 4, 6);
  const Clustering c = kmeans(cfg.gt_positions, 2, cfg.seed);
  const FlightPlan plan = circular_plan(c, cfg, default_initial_speeds(cfg));
  const AuxGains aux = initial_aux_gains(plan, cfg);
  const Tensor3 h = gain_tensor(plan, cfg);
  for (int k = 0; k < 4; ++k)
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n <= 6; ++n)
        CHECK(aux.b(k, m, n) ==
              doctest::Approx(cfg.p_max * h(k, m, n)).epsilon(1e-15));
}

TEST_CASE("default speeds clamp into the feasible speed band") {
  ScenarioConfig cfg = base_config(3, 6, 5);
  cfg.v_min = 3.5;
  const auto speeds = default_initial_speeds(cfg);
  REQUIRE(speeds.size() == 3);
  CHECK(speeds[0] == doctest::Approx(3.5));  // clamped up from 3.0
  CHECK(speeds[1] == doctest::Approx(3.5));
  CHECK(speeds[2] == doctest::Approx(4.0));
}
