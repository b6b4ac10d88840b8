#ifndef UAVFAIR_LP_HPP
#define UAVFAIR_LP_HPP

#include <iosfwd>
#include <stdexcept>

#include "uavfair/scenario.hpp"

namespace uavfair {

/// The scheduling subproblem with trajectories and powers held fixed:
/// maximize mu over relaxed alpha subject to the per-user rate rows,
/// the per-UAV / per-GT sum rows and the unit box.
struct LpInstance {
  Tensor3 rate_coefficients;  // log2(1 + gamma), constants once gamma is fixed
  double time_norm = 1.0;

  int num_gts() const { return rate_coefficients.dim_k(); }
  int num_uavs() const { return rate_coefficients.dim_m(); }
  int num_samples() const { return rate_coefficients.dim_n(); }  // N+1
  int num_variables() const {
    return num_gts() * num_uavs() * num_samples() + 1;
  }
  int num_rows() const {
    return num_gts() + (num_uavs() + num_gts()) * num_samples();
  }
};

struct LpSolveError : std::runtime_error {
  LpSolveError(const std::string& what, Schedule iterate, double mu)
      : std::runtime_error(what), iterate(std::move(iterate)), mu(mu) {}
  Schedule iterate;
  double mu;
};

struct LpSolution {
  Schedule schedule;
  double mu = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

LpInstance build_lp(const LinkMetrics& metrics, const ScenarioConfig& cfg);

/// Deterministic interior-point solve; optimality certified by the duality
/// gap. Throws LpSolveError with the last iterate on numerical failure.
LpSolution solve_lp(const LpInstance& instance);

/// Plain-text LP interchange format (CPLEX-style), for external cross-checks.
void write_lp_format(const LpInstance& instance, std::ostream& out);

}  // namespace uavfair

#endif
