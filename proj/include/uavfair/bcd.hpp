#ifndef UAVFAIR_BCD_HPP
#define UAVFAIR_BCD_HPP

#include <string>
#include <vector>

#include "uavfair/scenario.hpp"

namespace uavfair {

enum class SolveStatus { converged, max_iters, infeasible };

const char* to_string(SolveStatus status);

/// Outcome of the outer block-coordinate-descent loop: alternates the
/// scheduling LP and the convexified trajectory/power subproblem, tracks the
/// relaxed max-min objective, and recovers physical transmit powers.
struct SolveReport {
  SolveStatus status = SolveStatus::max_iters;
  std::string message;
  int iterations = 0;

  std::vector<double> mu_trace;        // objective after each iteration
  std::vector<double> delta_mu_trace;  // per-iteration increase
  std::vector<double> lp_ms;           // wall-clock per phase, per iteration
  std::vector<double> sca_ms;

  FlightPlan plan;
  Schedule schedule;  // relaxed
  Schedule rounded;   // binary companion (never replaces the relaxed one)
  AuxGains aux;
  PowerPlan powers;   // recovered, p_m(n) = sum_k alpha B / h

  double mu = 0.0;  // final objective (relaxed rates, headline figure)
  // headline rates from the auxiliary received powers (the relaxed model the
  // objective optimizes); physical rates re-derived from recovered powers
  // are reported alongside
  PerformanceReport relaxed;
  PerformanceReport physical;
};

/// min_k of the average user rate implied by the auxiliary received powers.
double relaxed_objective(const Schedule& schedule, const AuxGains& aux,
                         const FlightPlan& plan, const ScenarioConfig& cfg);

/// p_m(n) = sum_k alpha_{k,m}(n) B_{k,m}(n) / h_{k,m}(n).
PowerPlan recover_powers(const Schedule& schedule, const AuxGains& aux,
                         const FlightPlan& plan, const ScenarioConfig& cfg);

/// Per-slot maximum-weight one-to-one UAV-to-GT assignment with the relaxed
/// alpha as weights; UAVs may stay unassigned.
Schedule round_schedule(const Schedule& schedule);

/// Runs the full pipeline. Initializer infeasibility (energy budget
/// unreachable by the starting plan) yields status=infeasible naming the
/// budget; subproblem failures are rethrown with the iteration index.
SolveReport solve(const ScenarioConfig& cfg);

struct BaselineReport {
  // single transmitter fixed at the GT centroid serving every user
  // simultaneously with an equal share of its power budget; each stream
  // suffers the other K-1 streams as interference, so its SINR is close to
  // 1/(K-1) regardless of the layout
  PerformanceReport static_ap;
  // the same transmitter operated as a time-shared single stream at full
  // power under the max-min LP schedule (much stronger; reported alongside
  // for reference)
  PerformanceReport static_tdma;
  Vec2 static_position = Vec2::Zero();
  // initializer trajectories (circular plan, full power) with only the
  // max-min LP schedule optimized
  PerformanceReport circular;
};

BaselineReport run_baselines(const ScenarioConfig& cfg);

}  // namespace uavfair

#endif
