#include "uavfair/artifacts.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace uavfair {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

}  // namespace

ArtifactPaths write_solve_artifacts(const SolveReport& report,
                                    const ScenarioConfig& cfg,
                                    const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  ArtifactPaths paths;
  paths.trajectory = out_dir + "/trajectory.tsv";
  paths.schedule = out_dir + "/schedule.tsv";
  paths.convergence = out_dir + "/convergence.tsv";
  paths.summary = out_dir + "/summary.json";

  {
    auto out = open_out(paths.trajectory);
    out << "n\tuav\tx\ty\tvx\tvy\tax\tay\tp_watts\n";
    for (int n = 0; n <= cfg.num_steps; ++n)
      for (int m = 0; m < cfg.num_uavs; ++m) {
        const Vec2& q = report.plan.positions[m][n];
        const Vec2& v = report.plan.velocities[m][n];
        const Vec2 a = n < cfg.num_steps ? report.plan.accelerations[m][n]
                                         : Vec2::Zero();
        out << n << '\t' << m << '\t' << num(q.x()) << '\t' << num(q.y())
            << '\t' << num(v.x()) << '\t' << num(v.y()) << '\t' << num(a.x())
            << '\t' << num(a.y()) << '\t' << num(report.powers.p(m, n))
            << '\n';
      }
  }
  {
    auto out = open_out(paths.schedule);
    out << "n\tuav\tgt\talpha\n";
    for (int n = 0; n <= cfg.num_steps; ++n)
      for (int m = 0; m < cfg.num_uavs; ++m)
        for (int k = 0; k < cfg.num_gts; ++k)
          out << n << '\t' << m << '\t' << k << '\t'
              << num(report.schedule.alpha(k, m, n)) << '\n';
  }
  {
    auto out = open_out(paths.convergence);
    out << "iteration\tmu\tdelta_mu\twall_ms\n";
    for (std::size_t i = 0; i < report.mu_trace.size(); ++i) {
      const double wall =
          (i < report.lp_ms.size() ? report.lp_ms[i] : 0.0) +
          (i < report.sca_ms.size() ? report.sca_ms[i] : 0.0);
      out << (i + 1) << '\t' << num(report.mu_trace[i]) << '\t'
          << num(report.delta_mu_trace[i]) << '\t' << num(wall) << '\n';
    }
  }
  {
    ordered_json j;
    j["status"] = to_string(report.status);
    j["message"] = report.message;
    j["iterations"] = report.iterations;
    j["mu"] = report.mu;
    j["rate_per_gt"] = report.relaxed.rate_per_gt;
    j["rate_per_gt_physical"] = report.physical.rate_per_gt;
    j["connection_time_per_gt"] = report.relaxed.connection_time_per_gt;
    j["energy_per_uav"] = report.relaxed.energy_per_uav;
    j["seed"] = cfg.seed;
    j["epsilon"] = cfg.epsilon;
    j["max_iters"] = cfg.max_iters;
    auto out = open_out(paths.summary);
    out << j.dump(2) << '\n';
  }
  return paths;
}

std::string write_baseline_artifacts(const BaselineReport& baselines,
                                     const SolveReport& optimized,
                                     const ScenarioConfig& cfg,
                                     const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/baseline.json";
  ordered_json j;
  j["optimized_min_rate"] = optimized.mu;
  j["circular_min_rate"] = baselines.circular.min_rate;
  j["static_min_rate"] = baselines.static_ap.min_rate;
  j["static_tdma_min_rate"] = baselines.static_tdma.min_rate;
  j["static_position"] = {baselines.static_position.x(),
                          baselines.static_position.y()};
  j["optimized_rate_per_gt"] = optimized.relaxed.rate_per_gt;
  j["circular_rate_per_gt"] = baselines.circular.rate_per_gt;
  j["static_rate_per_gt"] = baselines.static_ap.rate_per_gt;
  j["ordering_holds"] = optimized.mu > baselines.circular.min_rate &&
                        baselines.circular.min_rate >
                            baselines.static_ap.min_rate;
  j["seed"] = cfg.seed;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  return path;
}

}  // namespace uavfair
