#ifndef UAVFAIR_CONFIG_IO_HPP
#define UAVFAIR_CONFIG_IO_HPP

#include <iosfwd>
#include <string>

#include "uavfair/scenario.hpp"

namespace uavfair {

/// Raised on malformed configuration input; `field` names the bad entry.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error("config error in '" + field + "': " + what),
        field(field) {}
  std::string field;
};

/// Parses the key = value scenario format. dB-valued fields carry a _db /
/// _dbm suffix and are converted to linear units here. Ground stations come
/// either from repeated `gt = x, y` lines or from `gt_area = w h` (seeded
/// random placement of num_gts points).
ScenarioConfig load_scenario(std::istream& in);
ScenarioConfig load_scenario_file(const std::string& path);

/// Writes a config back out in the same format (round-trips through load).
void save_scenario(const ScenarioConfig& cfg, std::ostream& out);

/// The bundled default: M=2, K=6 random in 500x500 m, N=100, dt=1 s,
/// P_max=0.1 W, beta0=-60 dB, noise=-110 dBm, V in [1.5,50], a_max=5,
/// E_max=2e5 J, c1=9.26e-4, c2=2250.
ScenarioConfig default_scenario(std::uint64_t seed);

/// Deterministic GT placement used by default_scenario and gt_area configs.
std::vector<Vec2> random_gt_positions(int count, double width, double height,
                                      std::uint64_t seed);

}  // namespace uavfair

#endif
