#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <sstream>

#include "uavfair/bcd.hpp"
#include "uavfair/config_io.hpp"
#include "uavfair/initializer.hpp"
#include "uavfair/sca.hpp"

using namespace uavfair;

namespace {

struct Setup {
  ScenarioConfig cfg;
  FlightPlan plan;
  Schedule schedule;
  AuxGains aux;
};

Setup make_setup(int M, int K, int N, std::uint64_t seed) {
  Setup s;
  s.cfg.num_uavs = M;
  s.cfg.num_gts = K;
  s.cfg.num_steps = N;
  s.cfg.seed = seed;
  s.cfg.gt_positions = random_gt_positions(K, 300.0, 300.0, seed);
  const Clustering c = kmeans(s.cfg.gt_positions, M, seed);
  s.plan = circular_plan(c, s.cfg, default_initial_speeds(s.cfg));
  s.schedule = initial_schedule(c, s.plan, s.cfg);
  s.aux = initial_aux_gains(s.plan, s.cfg);
  return s;
}

}  // namespace

TEST_CASE("variable and row counts follow the packed layout") {
  const Setup s = make_setup(2, 4, 6, 3);
  const ScaProgram prog = build_sca(s.schedule, s.plan, s.aux, s.cfg);
  const ScaCounts counts = prog.counts();
  const int M = 2, K = 4, N = 6;

  // q: 2M(N+1), v: 2MN (v(0) frozen), a: 2MN, lambda: MN, B: KM(N+1), mu: 1
  const int expected_vars =
      2 * M * (N + 1) + 2 * M * N + 2 * M * N + M * N + K * M * (N + 1) + 1;
  CHECK(counts.variables == expected_vars);
  // the leading-order count is K*M*N + 7*M*N + 1; boundary samples add
  // K*M + 2*M more
  CHECK(counts.variables == K * M * N + 7 * M * N + 1 + K * M + 2 * M);

  CHECK(counts.eq_rows == 4 * M * N);  // two 2-d recursions per slot
  CHECK(counts.speed_rows == M * N);   // v(0) fixed -> N rows per UAV
  CHECK(counts.acc_rows == M * N);
  CHECK(counts.lambda_min_rows == M * N);
  CHECK(counts.lambda_quad_rows == M * N);
  CHECK(counts.b_lower_rows == K * M * (N + 1));
  CHECK(counts.b_upper_rows == K * M * (N + 1));
  CHECK(counts.rate_rows == K);
  CHECK(counts.energy_rows == M);
  CHECK(counts.collision_rows == (M * (M - 1) / 2) * (N + 1));

  CHECK(prog.num_vars() == counts.variables);
  CHECK(prog.num_ineq() == counts.inequality_rows());
  CHECK(prog.num_eq() == counts.eq_rows);
}

TEST_CASE("reference and starting points are strictly feasible") {
  const Setup s = make_setup(2, 4, 8, 5);
  const ScaProgram prog = build_sca(s.schedule, s.plan, s.aux, s.cfg);

  Eigen::VectorXd slack;
  REQUIRE(prog.slacks(prog.reference_point(), slack));
  CHECK(slack.minCoeff() > 0.0);

  REQUIRE(prog.slacks(prog.starting_point(), slack));
  CHECK(slack.minCoeff() > 0.0);

  // the start backs B off its cap, so its smallest slack is much larger
  // relative to the row scales
  const Eigen::VectorXd& rs = prog.row_scales();
  Eigen::VectorXd scaled = slack.cwiseQuotient(rs);
  CHECK(scaled.minCoeff() > 1e-6);
}

TEST_CASE("equality system reproduces the discrete kinematics") {
  const Setup s = make_setup(1, 3, 5, 7);
  const ScaProgram prog = build_sca(s.schedule, s.plan, s.aux, s.cfg);

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs;
  prog.equality_system(trip, rhs);
  Eigen::SparseMatrix<double> J(prog.num_eq(), prog.num_vars());
  J.setFromTriplets(trip.begin(), trip.end());

  // the packed reference satisfies J x = rhs to machine precision
  const Eigen::VectorXd r = J * prog.reference_point() - rhs;
  CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-9);

  // a random packed point generally does not, but its projection does
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd x = prog.reference_point();
  for (int i = 0; i < x.size(); ++i) x[i] += 0.1 * g(rng);
  Eigen::VectorXd xp = x;
  prog.project_kinematics(xp);
  CHECK((J * xp - rhs).lpNorm<Eigen::Infinity>() <= 1e-9);

  // direction projection maps any step into the null space of J
  Eigen::VectorXd dx = Eigen::VectorXd::Zero(prog.num_vars());
  for (int i = 0; i < dx.size(); ++i) dx[i] = g(rng);
  prog.project_kinematics_direction(dx);
  CHECK((J * dx).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("constraint linearization matches finite differences of the slacks") {
  const Setup s = make_setup(2, 2, 3, 13);
  const ScaProgram prog = build_sca(s.schedule, s.plan, s.aux, s.cfg);
  const int nv = prog.num_vars();
  const int ni = prog.num_ineq();

  const Eigen::VectorXd x0 = prog.starting_point();
  Eigen::VectorXd w1 = Eigen::VectorXd::Zero(ni);
  std::vector<Eigen::Triplet<double>> jac, hess;
  prog.linearize(x0, w1, jac, hess);
  Eigen::SparseMatrix<double> G(ni, nv);
  G.setFromTriplets(jac.begin(), jac.end());

  // typical variable magnitudes differ by ~1e13 (positions vs received
  // powers); probe each row with steps sized to its own variables
  const Eigen::VectorXd vs = prog.variable_scaling();
  Eigen::VectorXd slack0;
  REQUIRE(prog.slacks(x0, slack0));

  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> pick_row(0, ni - 1);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 120; ++trial) {
    const int i = pick_row(rng);
    // finite-difference the row against each of its variables
    Eigen::VectorXd row = G.row(i).transpose();
    for (int j = 0; j < nv; ++j) {
      if (row[j] == 0.0) continue;
      const double h = 1e-6 * vs[j];
      Eigen::VectorXd xp = x0, xm = x0;
      xp[j] += h;
      xm[j] -= h;
      Eigen::VectorXd sp, sm;
      if (!prog.slacks(xp, sp) || !prog.slacks(xm, sm)) continue;
      const double fd = (sp[i] - sm[i]) / (2.0 * h);
      const double scale = std::max({std::abs(row[j]), std::abs(fd), 1e-12});
      CHECK(std::abs(fd - row[j]) / scale <= 5e-4);
      ++checked;
      if (checked >= 120) break;
    }
  }
  CHECK(checked >= 120);
}

TEST_CASE("accumulated curvature is positive semidefinite") {
  const Setup s = make_setup(2, 2, 3, 19);
  const ScaProgram prog = build_sca(s.schedule, s.plan, s.aux, s.cfg);
  const int nv = prog.num_vars();

  Eigen::VectorXd w1 = Eigen::VectorXd::Ones(prog.num_ineq());
  std::vector<Eigen::Triplet<double>> jac, hess;
  prog.linearize(prog.starting_point(), w1, jac, hess);
  Eigen::SparseMatrix<double> H(nv, nv);
  H.setFromTriplets(hess.begin(), hess.end());
  Eigen::MatrixXd Hd = Eigen::MatrixXd(H);
  CHECK((Hd - Hd.transpose()).lpNorm<Eigen::Infinity>() <=
        1e-9 * (1.0 + Hd.lpNorm<Eigen::Infinity>()));
  // scale columns/rows so eigenvalues are comparable across variable kinds
  const Eigen::VectorXd vs = prog.variable_scaling();
  Eigen::MatrixXd Hs = vs.asDiagonal() * Hd * vs.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Hs);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  CHECK(lo >= -1e-10 * std::max(1.0, hi));
}

TEST_CASE("solver improves the objective over the reference and stays feasible") {
  const Setup s = make_setup(1, 3, 10, 23);
  const ScaProgram prog = build_sca(s.schedule, s.plan, s.aux, s.cfg);
  const double mu_ref = prog.min_rate_row_value(prog.reference_point());

  ScaOptions opts;
  const ScaSolution sol = solve_sca(prog, opts);
  CHECK(sol.mu_lb >= mu_ref - 1e-6);
  CHECK(sol.gap <= 1e-2);

  // emitted plan/aux satisfy the exact (non-surrogate) constraints
  PowerPlan powers = recover_powers(s.schedule, sol.aux, sol.plan, s.cfg);
  const auto violations =
      audit_feasibility(sol.plan, s.schedule, powers, s.cfg);
  for (const auto& v : violations)
    FAIL_CHECK("violation " << v.constraint << " magnitude " << v.magnitude);
  CHECK(violations.empty());

  // the relaxed objective of the emitted iterate did not regress either
  const double mu_out = relaxed_objective(s.schedule, sol.aux, sol.plan, s.cfg);
  const double mu_in = relaxed_objective(s.schedule, s.aux, s.plan, s.cfg);
  CHECK(mu_out >= mu_in - 1e-6);
}

TEST_CASE("two-uav solve respects separation and the frozen initial velocity") {
  const Setup s = make_setup(2, 4, 8, 29);
  const ScaProgram prog = build_sca(s.schedule, s.plan, s.aux, s.cfg);
  const ScaSolution sol = solve_sca(prog);

  for (int m = 0; m < 2; ++m) {
    CHECK(sol.plan.velocities[m][0].x() ==
          doctest::Approx(s.plan.velocities[m][0].x()));
    CHECK(sol.plan.velocities[m][0].y() ==
          doctest::Approx(s.plan.velocities[m][0].y()));
  }
  for (int n = 0; n <= 8; ++n)
    CHECK((sol.plan.positions[0][n] - sol.plan.positions[1][n]).norm() >=
          s.cfg.d_min - 1e-6);

  // aux gains never exceed the true received-power cap
  const Tensor3 h = gain_tensor(sol.plan, s.cfg);
  for (int k = 0; k < 4; ++k)
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n <= 8; ++n)
        CHECK(sol.aux.b(k, m, n) <= s.cfg.p_max * h(k, m, n) + 1e-20);
}

TEST_CASE("dimension mismatches are rejected") {
  const Setup s = make_setup(2, 3, 4, 31);
  Schedule bad = s.schedule;
  bad.alpha = Tensor3(3, 2, 3);  // wrong sample count
  CHECK_THROWS_AS(build_sca(bad, s.plan, s.aux, s.cfg), std::invalid_argument);

  AuxGains bad_aux = s.aux;
  bad_aux.b = Tensor3(2, 2, 5);
  CHECK_THROWS_AS(build_sca(s.schedule, s.plan, bad_aux, s.cfg),
                  std::invalid_argument);
}

TEST_CASE("structural dump mentions every constraint family") {
  const Setup s = make_setup(2, 2, 3, 37);
  const ScaProgram prog = build_sca(s.schedule, s.plan, s.aux, s.cfg);
  std::ostringstream out;
  prog.dump(out);
  const std::string text = out.str();
  for (const char* needle :
       {"variables", "speed", "acc", "rate", "energy", "separation"})
    CHECK(text.find(needle) != std::string::npos);
}
