#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "uavfair/bcd.hpp"
#include "uavfair/config_io.hpp"

using namespace uavfair;

namespace {

ScenarioConfig small_scenario(int M, int K, int N, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.num_uavs = M;
  cfg.num_gts = K;
  cfg.num_steps = N;
  cfg.seed = seed;
  cfg.gt_positions = random_gt_positions(K, 400.0, 400.0, seed);
  return cfg;
}

}  // namespace

TEST_CASE("power recovery inverts the auxiliary received power") {
  ScenarioConfig cfg = small_scenario(1, 1, 1, 2);
  cfg.gt_positions = {Vec2(30, 40)};
  FlightPlan plan;
  plan.positions.assign(1, std::vector<Vec2>(2, Vec2(0, 0)));
  plan.velocities.assign(1, std::vector<Vec2>(2, Vec2(3, 0)));
  plan.accelerations.assign(1, std::vector<Vec2>(1, Vec2::Zero()));
  plan.positions[0][1] = Vec2(3, 0);

  Schedule sched;
  sched.alpha = Tensor3(1, 1, 2);
  sched.alpha(0, 0, 0) = 1.0;
  sched.alpha(0, 0, 1) = 0.5;

  AuxGains aux;
  aux.b = Tensor3(1, 1, 2);
  aux.b(0, 0, 0) = 1e-11;  // h at (0,0) is 8e-11 -> p = 0.125... * 1
  aux.b(0, 0, 1) = 2e-11;

  const PowerPlan p = recover_powers(sched, aux, plan, cfg);
  CHECK(p.p(0, 0) == doctest::Approx(1e-11 / 8e-11).epsilon(1e-9));
  const double h1 = channel_gain(plan.positions[0][1], cfg.gt_positions[0], cfg);
  CHECK(p.p(0, 1) == doctest::Approx(0.5 * 2e-11 / h1).epsilon(1e-9));
}

TEST_CASE("schedule rounding picks the per-slot max-weight assignment") {
  Schedule s;
  s.alpha = Tensor3(3, 2, 2);
  // slot 0: UAV0 mostly serves GT1, UAV1 mostly GT2
  s.alpha(0, 0, 0) = 0.2;
  s.alpha(1, 0, 0) = 0.8;
  s.alpha(2, 1, 0) = 0.9;
  s.alpha(0, 1, 0) = 0.1;
  // slot 1: both UAVs favor GT0; only one can take it, the other falls back
  s.alpha(0, 0, 1) = 0.9;
  s.alpha(0, 1, 1) = 0.8;
  s.alpha(1, 1, 1) = 0.5;

  const Schedule r = round_schedule(s);
  CHECK(r.alpha(1, 0, 0) == 1.0);
  CHECK(r.alpha(2, 1, 0) == 1.0);
  CHECK(r.alpha(0, 0, 0) == 0.0);
  // slot 1: 0.9 + 0.5 beats 0.8 alone
  CHECK(r.alpha(0, 0, 1) == 1.0);
  CHECK(r.alpha(1, 1, 1) == 1.0);
  CHECK(r.alpha(0, 1, 1) == 0.0);

  // rounded schedule is one-to-one at every slot
  for (int n = 0; n < 2; ++n) {
    for (int m = 0; m < 2; ++m) {
      double row = 0.0;
      for (int k = 0; k < 3; ++k) row += r.alpha(k, m, n);
      CHECK(row <= 1.0);
    }
    for (int k = 0; k < 3; ++k) {
      double col = 0.0;
      for (int m = 0; m < 2; ++m) col += r.alpha(k, m, n);
      CHECK(col <= 1.0);
    }
  }
}

TEST_CASE("full pipeline: monotone objective and feasible output") {
  ScenarioConfig cfg = small_scenario(2, 4, 20, 1);
  cfg.max_iters = 6;
  const SolveReport rep = solve(cfg);

  REQUIRE(rep.iterations >= 1);
  REQUIRE(rep.mu_trace.size() == std::size_t(rep.iterations));
  CHECK(rep.status != SolveStatus::infeasible);

  // every recorded step is a non-decrease
  double prev = -1.0;
  for (double mu : rep.mu_trace) {
    CHECK(mu >= prev);
    prev = mu;
  }
  CHECK(rep.mu == doctest::Approx(rep.mu_trace.back()));

  // the final iterate beats the initial circular arrangement
  CHECK(rep.mu_trace.back() >= rep.mu_trace.front() - 1e-9);

  // the output satisfies every physical constraint
  const auto violations =
      audit_feasibility(rep.plan, rep.schedule, rep.powers, cfg);
  for (const auto& v : violations)
    FAIL_CHECK("violation " << v.constraint << " magnitude " << v.magnitude);
  CHECK(violations.empty());

  // the rounded companion is feasible too
  const auto violations2 =
      audit_feasibility(rep.plan, rep.rounded, rep.powers, cfg);
  CHECK(violations2.empty());

  // reports are consistent with the stored iterate
  CHECK(rep.relaxed.min_rate == doctest::Approx(rep.mu).epsilon(1e-9));
  CHECK(int(rep.physical.rate_per_gt.size()) == cfg.num_gts);
  CHECK(rep.lp_ms.size() == rep.sca_ms.size());
}

TEST_CASE("single UAV, single user: optimizer improves on the circle") {
  ScenarioConfig cfg = small_scenario(1, 1, 12, 4);
  cfg.max_iters = 5;
  const SolveReport rep = solve(cfg);
  CHECK(rep.status != SolveStatus::infeasible);
  const BaselineReport base = run_baselines(cfg);
  CHECK(rep.mu >= base.circular.min_rate - 1e-9);
}

TEST_CASE("pipeline is deterministic in the seed") {
  ScenarioConfig cfg = small_scenario(2, 3, 10, 7);
  cfg.max_iters = 3;
  const SolveReport a = solve(cfg);
  const SolveReport b = solve(cfg);
  CHECK(a.mu == b.mu);
  CHECK(a.mu_trace == b.mu_trace);
  CHECK(a.schedule.alpha.raw() == b.schedule.alpha.raw());
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n <= 10; ++n) {
      CHECK(a.plan.positions[m][n] == b.plan.positions[m][n]);
      CHECK(a.plan.velocities[m][n] == b.plan.velocities[m][n]);
    }
}

TEST_CASE("unreachable energy budget yields an infeasible status naming it") {
  ScenarioConfig cfg = small_scenario(2, 4, 20, 1);
  cfg.e_max = 10.0;  // far below what any 20-step flight needs
  const SolveReport rep = solve(cfg);
  CHECK(rep.status == SolveStatus::infeasible);
  CHECK(rep.message.find("e_max") != std::string::npos);
  CHECK(to_string(rep.status) == std::string("infeasible"));
}

TEST_CASE("baselines: static access point and circular initializer") {
  const ScenarioConfig cfg = small_scenario(2, 4, 20, 1);
  const BaselineReport base = run_baselines(cfg);

  REQUIRE(int(base.static_ap.rate_per_gt.size()) == 4);
  REQUIRE(int(base.circular.rate_per_gt.size()) == 4);
  CHECK(base.static_ap.min_rate > 0.0);

  // simultaneous equal-share streams: every user's SINR is p/K*h over
  // (K-1)/K*p*h + sigma^2, so with negligible noise each rate is close to
  // log2(1 + 1/(K-1)) independent of geometry
  for (int k = 0; k < 4; ++k) {
    const double h = channel_gain(base.static_position, cfg.gt_positions[k], cfg);
    const double expected = std::log2(
        1.0 + (cfg.p_max / 4.0 * h) /
                  (cfg.p_max * 3.0 / 4.0 * h + cfg.sigma0_sq));
    CHECK(base.static_ap.rate_per_gt[k] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(base.static_ap.rate_per_gt[k] ==
          doctest::Approx(std::log2(1.0 + 1.0 / 3.0)).epsilon(1e-2));
    CHECK(base.static_ap.connection_time_per_gt[k] ==
          doctest::Approx(cfg.delta_t * (cfg.num_steps + 1)));
  }

  // the time-shared full-power variant is much stronger than the
  // interference-limited one
  CHECK(base.static_tdma.min_rate > base.static_ap.min_rate);
  // a tiny circle may never come nearest to a far cluster member, so the
  // circular min rate can be zero on small instances; rates are never negative
  CHECK(base.circular.min_rate >= 0.0);
  CHECK(*std::max_element(base.circular.rate_per_gt.begin(),
                          base.circular.rate_per_gt.end()) > 0.0);

  // static position is the GT centroid
  Vec2 center = Vec2::Zero();
  for (const auto& w : cfg.gt_positions) center += w;
  center /= 4.0;
  CHECK(base.static_position.x() == doctest::Approx(center.x()));
  CHECK(base.static_position.y() == doctest::Approx(center.y()));

  // deterministic
  const BaselineReport again = run_baselines(cfg);
  CHECK(again.static_ap.min_rate == base.static_ap.min_rate);
  CHECK(again.circular.min_rate == base.circular.min_rate);
}
