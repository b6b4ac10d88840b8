#ifndef UAVFAIR_SURROGATES_HPP
#define UAVFAIR_SURROGATES_HPP

#include "uavfair/scenario.hpp"

namespace uavfair {

/// Affine function c + g.x of a planar point.
struct Affine2 {
  double c = 0.0;
  Vec2 g = Vec2::Zero();
  double eval(const Vec2& x) const { return c + g.dot(x); }
};

/// First-order lower bound on |x|^2 around x0: |x0|^2 + 2 x0.(x - x0).
/// Tight at x0, gradient-matching, and a global lower bound.
Affine2 taylor_sq_lower(const Vec2& x0);

/// Slope/intercept of the interference log bound: value(i) is an upper bound
/// on log2(i + sigma0^2) for interference power i >= 0, tight at i = i_ref.
struct RbarCoeffs {
  double slope = 0.0;      // log2(e) / (i_ref + sigma0^2)
  double intercept = 0.0;  // log2(i_ref + sigma0^2)
  double i_ref = 0.0;
  double eval(double interference) const {
    return slope * (interference - i_ref) + intercept;
  }
};
RbarCoeffs rbar_coeffs(double interference_ref, double sigma0_sq);

/// Interference seen by (k, m, n): sum over j != m of B_{k,j}(n).
double interference_sum(const AuxGains& b, int k, int m, int n);

/// Upper bound on the interference log term of user k served by UAV m at
/// slot n, affine in B and tight at B = b_ref.
double rbar_upper(const AuxGains& b, const AuxGains& b_ref, int k, int m,
                  int n, const ScenarioConfig& cfg);

/// Concave quadratic lower bound on p_max*beta0 / (H^2 + |q - w|^2) around
/// q_ref (the received-power cap surrogate).
struct BmaxSurrogate {
  Vec2 w = Vec2::Zero();
  Vec2 q_ref = Vec2::Zero();
  double d_coeff = 0.0;  // 2 (1/H^4 - 1/(|q_ref - w|^2 + H^2)^2)
  double f_coeff = 0.0;
  double scale = 0.0;    // p_max * beta0
  double inv_h4 = 0.0;

  double eval(const Vec2& q) const {
    const Vec2 dq = q - w;
    return scale * (-dq.squaredNorm() * inv_h4 +
                    d_coeff * dq.dot(q_ref - w) + f_coeff);
  }
  Vec2 gradient(const Vec2& q) const {
    return scale * (-2.0 * inv_h4 * (q - w) + d_coeff * (q_ref - w));
  }
};
BmaxSurrogate bmax_surrogate(const Vec2& q_ref, const Vec2& w_k,
                             const ScenarioConfig& cfg);

/// True cap p_max*beta0 / (H^2 + |q - w|^2) that the surrogate lower-bounds.
double bmax_true(const Vec2& q, const Vec2& w_k, const ScenarioConfig& cfg);

/// Affine lower bound on |q_m - q_j|^2 around the reference pair; throws
/// std::invalid_argument when the reference points coincide. The bound is a
/// function of delta = q_m - q_j.
Affine2 collision_linearization(const Vec2& q_m_ref, const Vec2& q_j_ref);

}  // namespace uavfair

#endif
