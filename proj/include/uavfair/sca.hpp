#ifndef UAVFAIR_SCA_HPP
#define UAVFAIR_SCA_HPP

#include <Eigen/Sparse>
#include <iosfwd>
#include <stdexcept>

#include "uavfair/scenario.hpp"
#include "uavfair/surrogates.hpp"

namespace uavfair {

struct ScaCounts {
  int variables = 0;
  int eq_rows = 0;  // scalar kinematic rows
  int speed_rows = 0;
  int acc_rows = 0;
  int lambda_min_rows = 0;
  int lambda_quad_rows = 0;
  int b_lower_rows = 0;
  int b_upper_rows = 0;
  int rate_rows = 0;
  int energy_rows = 0;
  int collision_rows = 0;

  int inequality_rows() const {
    return speed_rows + acc_rows + lambda_min_rows + lambda_quad_rows +
           b_lower_rows + b_upper_rows + rate_rows + energy_rows +
           collision_rows;
  }
};

/// The convexified trajectory/power subproblem for a fixed schedule:
/// maximize mu over (Q, V, A, B, Lambda) subject to kinematic equalities,
/// speed/acceleration caps, the linearized minimum-speed slack rows, the
/// received-power cap surrogate, the affine interference upper bound inside
/// the rate rows, the slack-speed energy budget (v(0) frozen at the
/// reference) and the linearized pairwise-separation rows. All surrogate
/// rows are tight at the reference, which is therefore feasible.
class ScaProgram {
 public:
  ScaProgram(const Schedule& schedule, const FlightPlan& ref_plan,
            const AuxGains& ref_b, const ScenarioConfig& cfg);

  const ScenarioConfig& config() const { return cfg_; }
  ScaCounts counts() const { return counts_; }

  int num_vars() const { return counts_.variables; }
  int num_eq() const { return counts_.eq_rows; }
  int num_ineq() const { return counts_.inequality_rows(); }

  /// Packed reference point; strictly feasible for the (slightly relaxed)
  /// constraint rows of this program.
  const Eigen::VectorXd& reference_point() const { return x_ref_; }

  /// Strictly interior solver start: the reference with B backed off its
  /// received-power cap (the reference itself sits exactly on that cap).
  const Eigen::VectorXd& starting_point() const { return x_start_; }

  /// Value of the best rate row at the packed point (the objective a feasible
  /// mu can reach at fixed (B, Q)); used by solver diagnostics and tests.
  double min_rate_row_value(const Eigen::VectorXd& x) const;

  /// Slack vector of all inequality rows (relaxations included).
  /// Returns false when any slack is nonpositive.
  bool slacks(const Eigen::VectorXd& x, Eigen::VectorXd& s) const;

  /// Constraint linearization at x: jac holds the slack gradients (row i is
  /// grad s_i) and hess accumulates the full symmetric curvature
  /// sum_i w1[i] * (-hessian of s_i), which is PSD row by row (every
  /// constraint family is convex).
  void linearize(const Eigen::VectorXd& x, const Eigen::VectorXd& w1,
                 std::vector<Eigen::Triplet<double>>& jac,
                 std::vector<Eigen::Triplet<double>>& hess) const;

  /// Per-row natural scales of the inequality slacks, used by the solver to
  /// balance the dual variables across constraint families.
  const Eigen::VectorXd& row_scales() const { return row_scale_; }

  /// Constant kinematic equality system J x = b.
  void equality_system(std::vector<Eigen::Triplet<double>>& jac,
                       Eigen::VectorXd& rhs) const;

  /// Per-variable scaling used by the solver to condition the Newton system.
  Eigen::VectorXd variable_scaling() const;

  /// Re-integrates v and q in place from (q(0), v(0), a) so the kinematic
  /// equalities hold to machine precision.
  void project_kinematics(Eigen::VectorXd& x) const;

  /// Direction-space analogue of project_kinematics: rewrites the v and q
  /// components of a step so it lies exactly in the kinematic null space.
  void project_kinematics_direction(Eigen::VectorXd& dx) const;

  FlightPlan unpack_plan(const Eigen::VectorXd& x) const;
  /// B clamped into [0, true received-power cap] at the re-integrated plan.
  AuxGains unpack_aux(const Eigen::VectorXd& x, const FlightPlan& plan) const;
  double unpack_mu(const Eigen::VectorXd& x) const { return x[imu()]; }

  /// Human-readable structural dump (variables, row families, coefficients).
  void dump(std::ostream& out) const;

  // packed variable layout (public: exercised directly by tests)
  int iq(int m, int n, int d) const { return off_q_ + (m * (N_ + 1) + n) * 2 + d; }
  int iv(int m, int n, int d) const { return off_v_ + (m * N_ + n - 1) * 2 + d; }
  int ia(int m, int n, int d) const { return off_a_ + (m * N_ + n) * 2 + d; }
  int il(int m, int n) const { return off_l_ + m * N_ + n - 1; }
  int ib(int k, int m, int n) const {
    return off_b_ + (k * M_ + m) * (N_ + 1) + n;
  }
  int imu() const { return off_mu_; }

 private:
  Vec2 velocity_at(const Eigen::VectorXd& x, int m, int n) const;
  double rate_row_value(const Eigen::VectorXd& x, int k) const;
  double energy_value(const Eigen::VectorXd& x, int m) const;

  ScenarioConfig cfg_;
  int M_ = 0, K_ = 0, N_ = 0;
  int off_q_ = 0, off_v_ = 0, off_a_ = 0, off_l_ = 0, off_b_ = 0, off_mu_ = 0;
  ScaCounts counts_;

  Tensor3 alpha_;                  // pruned schedule weights
  Eigen::MatrixXd alpha_total_;    // (k, n) sums of alpha over m
  std::vector<Vec2> v0_;           // frozen initial velocities
  std::vector<double> lambda0_;    // |v0|
  Tensor3 rbar_slope_;             // A_{k,m}(n)
  Tensor3 rbar_intercept_;         // C_{k,m}(n)
  Tensor3 rbar_iref_;              // reference interference
  std::vector<BmaxSurrogate> bmax_;       // (k, m, n)
  std::vector<Affine2> speed_lin_;        // (m, n-1), bound on |v_m(n)|^2
  std::vector<std::pair<int, int>> pairs_;
  std::vector<Affine2> coll_lin_;         // (pair, n), bound on |delta|^2

  Eigen::VectorXd x_ref_;
  Eigen::VectorXd x_start_;
  Eigen::VectorXd relax_;      // per-row slack floor shifts
  Eigen::VectorXd row_scale_;  // per-row slack scales
};

ScaProgram build_sca(const Schedule& schedule, const FlightPlan& ref_plan,
                   const AuxGains& ref_b, const ScenarioConfig& cfg);

struct ScaOptions {
  double gap_abs = 1e-6;   // target complementarity gap on mu
  double dual_tol = 1e-5;  // scaled dual-residual tolerance
  int max_iterations = 300;
  bool verbose = false;  // per-step diagnostics on stderr
};

struct ScaSolveError : std::runtime_error {
  ScaSolveError(const std::string& what, double best_mu, double gap)
      : std::runtime_error(what), best_mu(best_mu), gap(gap) {}
  double best_mu;
  double gap;
};

struct ScaSolution {
  FlightPlan plan;
  AuxGains aux;
  double mu_lb = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

/// Feasible-start primal-dual interior-point solve over the sparse KKT
/// system, with fraction-to-boundary step control.
ScaSolution solve_sca(const ScaProgram& program, const ScaOptions& opts = {});

}  // namespace uavfair

#endif
