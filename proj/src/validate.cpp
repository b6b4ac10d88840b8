#include "uavfair/validate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "uavfair/bcd.hpp"
#include "uavfair/config_io.hpp"
#include "uavfair/lp.hpp"
#include "uavfair/oracle.hpp"
#include "uavfair/surrogates.hpp"

namespace uavfair {

namespace {

// fixed 53-bit mapping, independent of stdlib distribution implementations
struct Rng {
  explicit Rng(std::uint64_t seed) : gen(seed ^ 0x9e3779b97f4a7c15ull) {}
  double uniform(double lo, double hi) {
    const double u = double(gen() >> 11) * (1.0 / 9007199254740992.0);
    return lo + u * (hi - lo);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  std::mt19937_64 gen;
};

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double fd_scalar(const std::function<double(double)>& f, double x,
                 double step) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

}  // namespace

bool all_passed(const std::vector<PropertyResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const PropertyResult& r) { return r.passed; });
}

std::vector<PropertyResult> surrogate_suite(const ValidateOptions& opts) {
  std::vector<PropertyResult> out;
  const ScenarioConfig cfg = default_scenario(opts.seed);
  Rng rng(opts.seed);

  // sampling box: GT bounding box inflated 2x
  double lo_x = 1e30, hi_x = -1e30, lo_y = 1e30, hi_y = -1e30;
  for (const Vec2& w : cfg.gt_positions) {
    lo_x = std::min(lo_x, w.x()); hi_x = std::max(hi_x, w.x());
    lo_y = std::min(lo_y, w.y()); hi_y = std::max(hi_y, w.y());
  }
  const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
  const double rx = std::max(1.0, hi_x - lo_x), ry = std::max(1.0, hi_y - lo_y);
  auto sample_pos = [&]() {
    return Vec2(rng.uniform(cx - rx, cx + rx), rng.uniform(cy - ry, cy + ry));
  };

  auto check = [&](const std::string& name, bool ok, int samples,
                   const std::string& detail) {
    out.push_back({name, ok, samples, ok ? "" : detail});
  };

  // ---- squared-norm lower bound (velocity/trajectory linearization)
  {
    const Vec2 x0 = sample_pos();
    const Affine2 lin = taylor_sq_lower(x0);
    check("taylor_sq_lower/value", rel_close(lin.eval(x0), x0.squaredNorm(), 1e-8),
          1, "eval(x0)=" + fmt(lin.eval(x0)) + " |x0|^2=" + fmt(x0.squaredNorm()));
    const Eigen::VectorXd g = finite_difference_gradient(
        [](const Eigen::VectorXd& v) { return v.squaredNorm(); },
        Eigen::Vector2d(x0), 1e-4);
    check("taylor_sq_lower/gradient",
          rel_close(lin.g[0], g[0], 1e-6) && rel_close(lin.g[1], g[1], 1e-6), 1,
          "surrogate grad=(" + fmt(lin.g[0]) + "," + fmt(lin.g[1]) +
              ") fd=(" + fmt(g[0]) + "," + fmt(g[1]) + ")");
    bool ok = true;
    std::string bad;
    for (int i = 0; i < opts.samples && ok; ++i) {
      const Vec2 x = sample_pos();
      const double viol = lin.eval(x) - x.squaredNorm();
      if (viol > 1e-12) {
        ok = false;
        bad = "x=(" + fmt(x[0]) + "," + fmt(x[1]) + ") violation=" + fmt(viol);
      }
    }
    check("taylor_sq_lower/bound", ok, opts.samples, bad);
  }

  // ---- interference log upper bound
  {
    const double iref = rng.log_uniform(1e-16, 1e-8);
    const RbarCoeffs c = rbar_coeffs(iref, cfg.sigma0_sq);
    auto truth = [&](double i) { return std::log2(i + cfg.sigma0_sq); };
    check("rbar_upper/value", rel_close(c.eval(iref), truth(iref), 1e-8), 1,
          "eval(iref)=" + fmt(c.eval(iref)) + " log2=" + fmt(truth(iref)));
    const double fd = fd_scalar(truth, iref, 1e-4 * iref);
    check("rbar_upper/gradient", rel_close(c.slope, fd, 1e-6), 1,
          "slope=" + fmt(c.slope) + " fd=" + fmt(fd));
    bool ok = true;
    std::string bad;
    for (int i = 0; i < opts.samples && ok; ++i) {
      const double interf = rng.log_uniform(1e-16, 1e-8);
      const double viol = truth(interf) - c.eval(interf);
      if (viol > 1e-12) {
        ok = false;
        bad = "i=" + fmt(interf) + " violation=" + fmt(viol);
      }
    }
    check("rbar_upper/bound", ok, opts.samples, bad);
  }

  // ---- received-power cap lower bound
  {
    const Vec2 q_ref = sample_pos();
    const Vec2 w = cfg.gt_positions[0];
    BmaxSurrogate s = bmax_surrogate(q_ref, w, cfg);
    if (opts.corrupt_bmax_d_sign) s.d_coeff = -s.d_coeff;
    auto truth = [&](const Vec2& q) { return bmax_true(q, w, cfg); };
    check("bmax_surrogate/value", rel_close(s.eval(q_ref), truth(q_ref), 1e-8),
          1, "eval(q_ref)=" + fmt(s.eval(q_ref)) + " true=" + fmt(truth(q_ref)));
    const Eigen::VectorXd g = finite_difference_gradient(
        [&](const Eigen::VectorXd& v) { return truth(Vec2(v[0], v[1])); },
        Eigen::Vector2d(q_ref), 1e-4);
    const Vec2 sg = s.gradient(q_ref);
    check("bmax_surrogate/gradient",
          rel_close(sg[0], g[0], 1e-6) && rel_close(sg[1], g[1], 1e-6), 1,
          "surrogate grad=(" + fmt(sg[0]) + "," + fmt(sg[1]) + ") fd=(" +
              fmt(g[0]) + "," + fmt(g[1]) + ")");
    bool ok = true;
    std::string bad;
    for (int i = 0; i < opts.samples && ok; ++i) {
      const Vec2 q = sample_pos();
      const double viol = s.eval(q) - truth(q);
      if (viol > 1e-12) {
        ok = false;
        bad = "q=(" + fmt(q[0]) + "," + fmt(q[1]) + ") surrogate=" +
              fmt(s.eval(q)) + " true=" + fmt(truth(q)) +
              " violation=" + fmt(viol);
      }
    }
    check("bmax_surrogate/bound", ok, opts.samples, bad);
  }

  // ---- pairwise-separation lower bound
  {
    const Vec2 qm = sample_pos(), qj = sample_pos();
    const Affine2 lin = collision_linearization(qm, qj);
    const Vec2 dref = qm - qj;
    check("collision_linearization/value",
          rel_close(lin.eval(dref), dref.squaredNorm(), 1e-8), 1,
          "eval=" + fmt(lin.eval(dref)) + " |d|^2=" + fmt(dref.squaredNorm()));
    const Eigen::VectorXd g = finite_difference_gradient(
        [](const Eigen::VectorXd& v) { return v.squaredNorm(); },
        Eigen::Vector2d(dref), 1e-4);
    check("collision_linearization/gradient",
          rel_close(lin.g[0], g[0], 1e-6) && rel_close(lin.g[1], g[1], 1e-6), 1,
          "surrogate grad=(" + fmt(lin.g[0]) + "," + fmt(lin.g[1]) + ") fd=(" +
              fmt(g[0]) + "," + fmt(g[1]) + ")");
    bool ok = true;
    std::string bad;
    for (int i = 0; i < opts.samples && ok; ++i) {
      const Vec2 d = sample_pos() - sample_pos();
      const double viol = lin.eval(d) - d.squaredNorm();
      if (viol > 1e-12) {
        ok = false;
        bad = "d=(" + fmt(d[0]) + "," + fmt(d[1]) + ") violation=" + fmt(viol);
      }
    }
    check("collision_linearization/bound", ok, opts.samples, bad);
  }

  return out;
}

std::vector<PropertyResult> lp_dominance_suite(int instances,
                                               std::uint64_t seed) {
  std::vector<PropertyResult> out;
  Rng rng(seed);

  // hand instance: two users, one UAV, one sample, rates 2 and 1
  {
    LpInstance inst;
    inst.time_norm = 1.0;
    inst.rate_coefficients = Tensor3(2, 1, 1);
    inst.rate_coefficients(0, 0, 0) = 2.0;
    inst.rate_coefficients(1, 0, 0) = 1.0;
    const LpSolution sol = solve_lp(inst);
    const bool ok = std::abs(sol.mu - 2.0 / 3.0) <= 1e-8;
    out.push_back({"lp/hand_instance", ok, 1,
                   ok ? "" : "mu=" + fmt(sol.mu) + " expected 2/3"});
  }

  bool ok = true;
  std::string bad;
  int run = 0;
  for (int i = 0; i < instances && ok; ++i, ++run) {
    ScenarioConfig cfg;  // only dimensions and time_norm are consumed here
    cfg.num_gts = 1 + int(rng.gen() % 3);
    cfg.num_uavs = 1 + int(rng.gen() % 2);
    cfg.num_steps = int(rng.gen() % 3);
    const int N1 = cfg.num_steps + 1;
    LinkMetrics metrics;
    metrics.slot_rate = Tensor3(cfg.num_gts, cfg.num_uavs, N1);
    for (double& v : metrics.slot_rate.raw())
      v = (rng.uniform(0.0, 1.0) < 0.1) ? 0.0 : rng.uniform(0.0, 8.0);
    metrics.sinr = metrics.slot_rate;
    metrics.gain = metrics.slot_rate;

    LpInstance inst = build_lp(metrics, cfg);
    const LpSolution sol = solve_lp(inst);
    const double brute = enumerate_schedules(metrics, cfg);
    if (sol.mu < brute - 1e-8) {
      ok = false;
      bad = "instance " + std::to_string(i) + ": K=" +
            std::to_string(cfg.num_gts) + " M=" + std::to_string(cfg.num_uavs) +
            " N=" + std::to_string(cfg.num_steps) + " lp_mu=" + fmt(sol.mu) +
            " binary_mu=" + fmt(brute);
    }
  }
  out.push_back({"lp/dominance", ok, run, bad});
  return out;
}

std::vector<PropertyResult> audit_suite(const ScenarioConfig& cfg) {
  std::vector<PropertyResult> out;
  const SolveReport rep = solve(cfg);
  {
    const bool ok = rep.status != SolveStatus::infeasible;
    out.push_back({"audit/solve_status", ok, 1,
                   ok ? "" : "status=" + std::string(to_string(rep.status)) +
                                 " " + rep.message});
    if (!ok) return out;
  }
  const auto violations =
      audit_feasibility(rep.plan, rep.schedule, rep.powers, cfg);
  std::string bad;
  if (!violations.empty()) {
    const Violation& v = violations.front();
    bad = v.constraint + " m=" + std::to_string(v.m) + " k=" +
          std::to_string(v.k) + " n=" + std::to_string(v.n) +
          " magnitude=" + fmt(v.magnitude) + " (" +
          std::to_string(violations.size()) + " total)";
  }
  out.push_back({"audit/feasibility", violations.empty(),
                 int(violations.size()), bad});

  double worst_p = 0.0;
  for (int m = 0; m < cfg.num_uavs; ++m)
    for (int n = 0; n <= cfg.num_steps; ++n)
      worst_p = std::max(worst_p, rep.powers.p(m, n));
  const bool p_ok = worst_p <= cfg.p_max + 1e-9;
  out.push_back({"audit/recovered_power", p_ok, 1,
                 p_ok ? "" : "max p=" + fmt(worst_p) +
                                 " p_max=" + fmt(cfg.p_max)});
  return out;
}

}  // namespace uavfair
