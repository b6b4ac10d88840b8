#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uavfair/artifacts.hpp"
#include "uavfair/bcd.hpp"
#include "uavfair/config_io.hpp"
#include "uavfair/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitMaxIters = 3;
constexpr int kExitUsage = 64;

struct CommonArgs {
  std::string config;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  bool seed_set = false;
  double epsilon = 0.0;
  bool epsilon_set = false;
  int max_iters = 0;
  bool max_iters_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "scenario file (key = value)");
  cmd->add_option("--out-dir", args.out_dir, "artifact directory");
  cmd->add_option("--seed", args.seed, "seed for the bundled default scenario")
      ->each([&](const std::string&) { args.seed_set = true; });
  cmd->add_option("--epsilon", args.epsilon, "convergence threshold override")
      ->each([&](const std::string&) { args.epsilon_set = true; });
  cmd->add_option("--max-iters", args.max_iters, "iteration cap override")
      ->each([&](const std::string&) { args.max_iters_set = true; });
}

uavfair::ScenarioConfig make_config(const CommonArgs& args) {
  uavfair::ScenarioConfig cfg =
      args.config.empty()
          ? uavfair::default_scenario(args.seed_set ? args.seed : 1)
          : uavfair::load_scenario_file(args.config);
  if (args.seed_set && !args.config.empty()) cfg.seed = args.seed;
  if (args.epsilon_set) cfg.epsilon = args.epsilon;
  if (args.max_iters_set) cfg.max_iters = args.max_iters;
  cfg.validate();
  return cfg;
}

int status_exit(uavfair::SolveStatus status) {
  switch (status) {
    case uavfair::SolveStatus::converged: return kExitOk;
    case uavfair::SolveStatus::infeasible: return kExitInfeasible;
    case uavfair::SolveStatus::max_iters: return kExitMaxIters;
  }
  return kExitFail;
}

void print_report(const uavfair::SolveReport& rep) {
  std::printf("status: %s\n", uavfair::to_string(rep.status));
  if (!rep.message.empty()) std::printf("note: %s\n", rep.message.c_str());
  std::printf("iterations: %d\n", rep.iterations);
  std::printf("min average rate: %.6g\n", rep.mu);
  for (std::size_t k = 0; k < rep.relaxed.rate_per_gt.size(); ++k)
    std::printf("  gt %zu: rate %.6g (physical %.6g), connected %.6g s\n", k,
                rep.relaxed.rate_per_gt[k], rep.physical.rate_per_gt[k],
                rep.relaxed.connection_time_per_gt[k]);
  for (std::size_t m = 0; m < rep.relaxed.energy_per_uav.size(); ++m)
    std::printf("  uav %zu: energy %.6g J\n", m, rep.relaxed.energy_per_uav[m]);
}

int cmd_solve(const CommonArgs& args) {
  const auto cfg = make_config(args);
  const auto rep = uavfair::solve(cfg);
  const auto paths = uavfair::write_solve_artifacts(rep, cfg, args.out_dir);
  print_report(rep);
  std::printf("artifacts: %s %s %s %s\n", paths.trajectory.c_str(),
              paths.schedule.c_str(), paths.convergence.c_str(),
              paths.summary.c_str());
  return status_exit(rep.status);
}

int cmd_baseline(const CommonArgs& args) {
  const auto cfg = make_config(args);
  const auto rep = uavfair::solve(cfg);
  const auto baselines = uavfair::run_baselines(cfg);
  const auto path =
      uavfair::write_baseline_artifacts(baselines, rep, cfg, args.out_dir);
  std::printf("optimized min rate: %.6g\n", rep.mu);
  std::printf("initial-circular min rate: %.6g\n",
              baselines.circular.min_rate);
  std::printf("static-ap min rate: %.6g (at %.6g, %.6g)\n",
              baselines.static_ap.min_rate, baselines.static_position.x(),
              baselines.static_position.y());
  std::printf("static-ap time-shared variant min rate: %.6g\n",
              baselines.static_tdma.min_rate);
  std::printf("artifacts: %s\n", path.c_str());
  return status_exit(rep.status);
}

int cmd_validate(const CommonArgs& args, int samples) {
  uavfair::ValidateOptions opts;
  opts.samples = samples;
  opts.seed = args.seed_set ? args.seed : 1;
  auto results = uavfair::surrogate_suite(opts);
  {
    auto lp = uavfair::lp_dominance_suite(200, opts.seed);
    results.insert(results.end(), lp.begin(), lp.end());
  }
  {
    // a desk-scale scenario keeps the audited end-to-end run quick
    uavfair::ScenarioConfig cfg = uavfair::default_scenario(opts.seed);
    cfg.num_steps = 30;
    if (args.epsilon_set) cfg.epsilon = args.epsilon;
    if (args.max_iters_set) cfg.max_iters = args.max_iters;
    auto audit = uavfair::audit_suite(cfg);
    results.insert(results.end(), audit.begin(), audit.end());
  }
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%-36s %s (%d samples)%s%s\n", r.name.c_str(),
                r.passed ? "pass" : "FAIL", r.samples,
                r.detail.empty() ? "" : " — ", r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitFail;
}

int cmd_sweep_energy(const CommonArgs& args,
                     const std::vector<double>& fractions) {
  const auto cfg = make_config(args);
  const auto base = uavfair::solve(cfg);
  if (base.status == uavfair::SolveStatus::infeasible) {
    std::fprintf(stderr, "unconstrained run infeasible: %s\n",
                 base.message.c_str());
    return kExitInfeasible;
  }
  double consumed = 0.0;
  for (double e : base.relaxed.energy_per_uav) consumed = std::max(consumed, e);
  std::printf("unconstrained: min rate %.6g, max consumed energy %.6g J\n",
              base.mu, consumed);

  nlohmann::ordered_json j;
  j["unconstrained_min_rate"] = base.mu;
  j["consumed_energy"] = consumed;
  j["fractions"] = nlohmann::ordered_json::array();
  for (double f : fractions) {
    uavfair::ScenarioConfig scaled = cfg;
    scaled.e_max = f * consumed;
    const auto rep = uavfair::solve(scaled);
    std::printf("fraction %.3g: status %s, min rate %.6g\n", f,
                uavfair::to_string(rep.status), rep.mu);
    nlohmann::ordered_json entry;
    entry["fraction"] = f;
    entry["e_max"] = scaled.e_max;
    entry["status"] = uavfair::to_string(rep.status);
    entry["min_rate"] = rep.mu;
    j["fractions"].push_back(entry);
  }
  std::filesystem::create_directories(args.out_dir);
  const std::string path = args.out_dir + "/energy_sweep.json";
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << '\n';
  std::printf("artifacts: %s\n", path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"max-min fair multi-UAV trajectory/power/scheduling optimizer"};
  app.require_subcommand(1);

  CommonArgs args;
  int samples = 1000;
  std::vector<double> fractions = {0.9, 0.6, 0.3};

  auto* solve_cmd = app.add_subcommand("solve", "run the full optimization");
  add_common(solve_cmd, args);
  auto* baseline_cmd =
      app.add_subcommand("baseline", "compare against the benchmark schemes");
  add_common(baseline_cmd, args);
  auto* validate_cmd =
      app.add_subcommand("validate", "run the property suites");
  add_common(validate_cmd, args);
  validate_cmd->add_option("--samples", samples, "samples per bound check");
  auto* sweep_cmd = app.add_subcommand(
      "sweep-energy", "re-solve under scaled energy budgets");
  add_common(sweep_cmd, args);
  sweep_cmd->add_option("--fractions", fractions,
                        "energy budget fractions of the unconstrained run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(args);
    if (baseline_cmd->parsed()) return cmd_baseline(args);
    if (validate_cmd->parsed()) return cmd_validate(args, samples);
    if (sweep_cmd->parsed()) return cmd_sweep_energy(args, fractions);
  } catch (const uavfair::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFail;
  }
  return kExitUsage;
}
