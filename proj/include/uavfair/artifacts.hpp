#ifndef UAVFAIR_ARTIFACTS_HPP
#define UAVFAIR_ARTIFACTS_HPP

#include <string>

#include "uavfair/bcd.hpp"
#include "uavfair/scenario.hpp"

namespace uavfair {

struct ArtifactPaths {
  std::string trajectory;
  std::string schedule;
  std::string convergence;
  std::string summary;
};

/// Writes trajectory.tsv, schedule.tsv, convergence.tsv and summary.json
/// under out_dir (created if missing). All numeric output is fixed-format,
/// so identical reports serialize to identical bytes; the wall_ms column of
/// convergence.tsv is the only run-dependent field.
ArtifactPaths write_solve_artifacts(const SolveReport& report,
                                    const ScenarioConfig& cfg,
                                    const std::string& out_dir);

/// Writes baseline.json comparing the optimized run with the two benchmarks.
std::string write_baseline_artifacts(const BaselineReport& baselines,
                                     const SolveReport& optimized,
                                     const ScenarioConfig& cfg,
                                     const std::string& out_dir);

}  // namespace uavfair

#endif
