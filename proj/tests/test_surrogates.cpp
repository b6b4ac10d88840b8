#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "uavfair/oracle.hpp"
#include "uavfair/surrogates.hpp"

using namespace uavfair;

namespace {

std::mt19937_64 rng(123);

Vec2 random_point(double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Vec2(u(rng), u(rng));
}

ScenarioConfig base_cfg() {
  ScenarioConfig cfg;
  cfg.num_uavs = 2;
  cfg.num_gts = 1;
  cfg.num_steps = 1;
  return cfg;
}

}  // namespace

TEST_CASE("squared-norm linearization: global lower bound, tight, gradient-matching") {
  for (int trial = 0; trial < 200; ++trial) {
    const Vec2 x0 = random_point(-500, 500);
    const Affine2 f = taylor_sq_lower(x0);
    // tight at the expansion point
    CHECK(f.eval(x0) == doctest::Approx(x0.squaredNorm()).epsilon(1e-12));
    // global lower bound
    const Vec2 x = random_point(-500, 500);
    CHECK(f.eval(x) <= x.squaredNorm() + 1e-9);
    // gradient matches d|x|^2/dx = 2x at x0
    const auto fd = finite_difference_gradient(
        [&](const Eigen::VectorXd& v) {
          return Vec2(v[0], v[1]).squaredNorm();
        },
        Eigen::Vector2d(x0), 1e-5);
    CHECK(f.g.x() == doctest::Approx(fd[0]).epsilon(1e-6));
    CHECK(f.g.y() == doctest::Approx(fd[1]).epsilon(1e-6));
  }
}

TEST_CASE("interference log bound: upper bound everywhere, tight at the reference") {
  const double s2 = 1e-14;
  std::uniform_real_distribution<double> u(0.0, 1e-10);
  for (int trial = 0; trial < 200; ++trial) {
    const double iref = u(rng);
    const RbarCoeffs c = rbar_coeffs(iref, s2);
    CHECK(c.slope == doctest::Approx(std::log2(std::exp(1.0)) / (iref + s2)));
    CHECK(c.intercept == doctest::Approx(std::log2(iref + s2)));
    CHECK(c.eval(iref) == doctest::Approx(std::log2(iref + s2)).epsilon(1e-12));
    const double i = u(rng);
    CHECK(c.eval(i) >= std::log2(i + s2) - 1e-12);
  }
}

TEST_CASE("interference sum excludes the serving UAV") {
  AuxGains b;
  b.b = Tensor3(1, 3, 1);
  b.b(0, 0, 0) = 1.0;
  b.b(0, 1, 0) = 2.0;
  b.b(0, 2, 0) = 4.0;
  CHECK(interference_sum(b, 0, 0, 0) == doctest::Approx(6.0));
  CHECK(interference_sum(b, 0, 1, 0) == doctest::Approx(5.0));
  CHECK(interference_sum(b, 0, 2, 0) == doctest::Approx(3.0));
}

TEST_CASE("rbar_upper bounds the exact interference log and is tight at the reference") {
  const ScenarioConfig cfg = base_cfg();
  AuxGains ref;
  ref.b = Tensor3(1, 2, 2);
  ref.b(0, 0, 0) = 3e-11;
  ref.b(0, 1, 0) = 1e-11;
  ref.b(0, 0, 1) = 2e-12;
  ref.b(0, 1, 1) = 8e-12;

  // tight at the reference itself
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) {
      const double exact =
          std::log2(interference_sum(ref, 0, m, n) + cfg.sigma0_sq);
      CHECK(rbar_upper(ref, ref, 0, m, n, cfg) ==
            doctest::Approx(exact).epsilon(1e-12));
    }
  // upper bound at random perturbed points
  std::uniform_real_distribution<double> u(0.0, 5e-11);
  for (int trial = 0; trial < 100; ++trial) {
    AuxGains b = ref;
    for (double& v : b.b.raw()) v = u(rng);
    for (int m = 0; m < 2; ++m) {
      const double exact =
          std::log2(interference_sum(b, 0, m, 0) + cfg.sigma0_sq);
      CHECK(rbar_upper(b, ref, 0, m, 0, cfg) >= exact - 1e-12);
    }
  }
}

TEST_CASE("received-power cap surrogate: concave global lower bound, tight with matching gradient") {
  const ScenarioConfig cfg = base_cfg();
  for (int trial = 0; trial < 200; ++trial) {
    const Vec2 w = random_point(0, 500);
    const Vec2 qref = random_point(0, 500);
    const BmaxSurrogate s = bmax_surrogate(qref, w, cfg);

    // tight at the reference
    CHECK(s.eval(qref) ==
          doctest::Approx(bmax_true(qref, w, cfg)).epsilon(1e-12));
    // global lower bound on the true cap
    const Vec2 q = random_point(-200, 700);
    CHECK(s.eval(q) <= bmax_true(q, w, cfg) + 1e-20);
    // gradient of the surrogate matches the true cap's gradient at qref
    const auto fd = finite_difference_gradient(
        [&](const Eigen::VectorXd& v) {
          return bmax_true(Vec2(v[0], v[1]), w, cfg);
        },
        Eigen::Vector2d(qref), 1e-4);
    const Vec2 g = s.gradient(qref);
    CHECK(g.x() == doctest::Approx(fd[0]).epsilon(1e-5));
    CHECK(g.y() == doctest::Approx(fd[1]).epsilon(1e-5));
    // concavity in q: the quadratic part is -|dq|^2/H^4 (negative definite),
    // so the surrogate lies below its own tangent planes
    const Vec2 q2 = random_point(-200, 700);
    const double tangent = s.eval(qref) + s.gradient(qref).dot(q2 - qref);
    CHECK(s.eval(q2) <= tangent + 1e-18);
  }
}

TEST_CASE("separation linearization lower-bounds the true squared distance") {
  for (int trial = 0; trial < 200; ++trial) {
    const Vec2 qm = random_point(0, 500);
    Vec2 qj = random_point(0, 500);
    if ((qm - qj).squaredNorm() == 0.0) qj += Vec2(1, 0);
    const Affine2 f = collision_linearization(qm, qj);
    const Vec2 dref = qm - qj;
    // tight at the reference separation
    CHECK(f.eval(dref) == doctest::Approx(dref.squaredNorm()).epsilon(1e-12));
    // lower bound at any other separation
    const Vec2 d = random_point(-500, 500);
    CHECK(f.eval(d) <= d.squaredNorm() + 1e-9);
  }
}

TEST_CASE("separation linearization rejects coincident reference points") {
  const Vec2 q(12.0, -7.0);
  CHECK_THROWS_AS(collision_linearization(q, q), std::invalid_argument);
}
