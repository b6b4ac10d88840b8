#ifndef UAVFAIR_ORACLE_HPP
#define UAVFAIR_ORACLE_HPP

#include <functional>

#include "uavfair/scenario.hpp"

namespace uavfair {

/// Exact max-min objective over all binary schedules that satisfy the
/// one-UAV-per-GT / one-GT-per-UAV sum constraints, by exhaustive search.
/// Throws std::length_error when the candidate count exceeds 1e7.
double enumerate_schedules(const LinkMetrics& metrics,
                           const ScenarioConfig& cfg);

/// Central finite differences per coordinate.
Eigen::VectorXd finite_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double step = 1e-4);

}  // namespace uavfair

#endif
