#ifndef UAVFAIR_VALIDATE_HPP
#define UAVFAIR_VALIDATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "uavfair/scenario.hpp"

namespace uavfair {

struct PropertyResult {
  std::string name;
  bool passed = false;
  int samples = 0;
  std::string detail;  // counterexample dump on failure
};

struct ValidateOptions {
  int samples = 1000;
  std::uint64_t seed = 1;
  // mutation hook for the suite's own negative test: flips the sign of the
  // quadratic coefficient of the received-power cap surrogate
  bool corrupt_bmax_d_sign = false;
};

/// Triple-condition checks (value match at reference, gradient match vs
/// central differences, one-sided global bound over seeded samples) for each
/// of the four surrogate families.
std::vector<PropertyResult> surrogate_suite(const ValidateOptions& opts = {});

/// Relaxed-LP dominance over exhaustive binary enumeration on small random
/// instances, plus the two-user hand instance.
std::vector<PropertyResult> lp_dominance_suite(int instances = 200,
                                               std::uint64_t seed = 1);

/// Runs the full pipeline on cfg and audits the final artifacts.
std::vector<PropertyResult> audit_suite(const ScenarioConfig& cfg);

bool all_passed(const std::vector<PropertyResult>& results);

}  // namespace uavfair

#endif
