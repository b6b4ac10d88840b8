#include "uavfair/surrogates.hpp"

#include <cmath>
#include <stdexcept>

namespace uavfair {

Affine2 taylor_sq_lower(const Vec2& x0) {
  return Affine2{-x0.squaredNorm(), 2.0 * x0};
}

RbarCoeffs rbar_coeffs(double interference_ref, double sigma0_sq) {
  RbarCoeffs c;
  c.i_ref = interference_ref;
  const double denom = interference_ref + sigma0_sq;
  c.slope = std::log2(std::exp(1.0)) / denom;
  c.intercept = std::log2(denom);
  return c;
}

double interference_sum(const AuxGains& b, int k, int m, int n) {
  double sum = 0.0;
  for (int j = 0; j < b.b.dim_m(); ++j)
    if (j != m) sum += b.b(k, j, n);
  return sum;
}

double rbar_upper(const AuxGains& b, const AuxGains& b_ref, int k, int m,
                  int n, const ScenarioConfig& cfg) {
  const RbarCoeffs c =
      rbar_coeffs(interference_sum(b_ref, k, m, n), cfg.sigma0_sq);
  return c.eval(interference_sum(b, k, m, n));
}

BmaxSurrogate bmax_surrogate(const Vec2& q_ref, const Vec2& w_k,
                             const ScenarioConfig& cfg) {
  BmaxSurrogate s;
  s.w = w_k;
  s.q_ref = q_ref;
  s.scale = cfg.p_max * cfg.beta0;
  const double h2 = cfg.altitude * cfg.altitude;
  s.inv_h4 = 1.0 / (h2 * h2);
  const double dr2 = (q_ref - w_k).squaredNorm();
  const double denom = dr2 + h2;
  s.d_coeff = 2.0 * (s.inv_h4 - 1.0 / (denom * denom));
  s.f_coeff = 1.0 / denom + 2.0 * dr2 / (denom * denom) - dr2 * s.inv_h4;
  return s;
}

double bmax_true(const Vec2& q, const Vec2& w_k, const ScenarioConfig& cfg) {
  return cfg.p_max * cfg.beta0 /
         (cfg.altitude * cfg.altitude + (q - w_k).squaredNorm());
}

Affine2 collision_linearization(const Vec2& q_m_ref, const Vec2& q_j_ref) {
  const Vec2 delta_ref = q_m_ref - q_j_ref;
  if (delta_ref.squaredNorm() == 0.0)
    throw std::invalid_argument(
        "collision_linearization: coincident reference points");
  return taylor_sq_lower(delta_ref);
}

}  // namespace uavfair
