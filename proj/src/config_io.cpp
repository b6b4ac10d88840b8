#include "uavfair/config_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace uavfair {

namespace {

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + text + "'");
  }
}

long parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<Vec2> random_gt_positions(int count, double width, double height,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<Vec2> pts;
  pts.reserve(count);
  auto uniform = [&rng](double lo, double hi) {
    // fixed 53-bit mapping keeps placement independent of the stdlib
    const double u = double(rng() >> 11) * (1.0 / 9007199254740992.0);
    return lo + u * (hi - lo);
  };
  while (int(pts.size()) < count) {
    Vec2 p(uniform(0.0, width), uniform(0.0, height));
    bool dup = false;
    for (const auto& q : pts)
      if ((p - q).norm() < 1.0) dup = true;
    if (!dup) pts.push_back(p);
  }
  return pts;
}

ScenarioConfig load_scenario(std::istream& in) {
  ScenarioConfig cfg;
  cfg.gt_positions.clear();
  bool have_gt_area = false;
  double area_w = 0, area_h = 0;
  std::map<std::string, bool> seen;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno),
                        "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    seen[key] = true;

    if (key == "num_uavs") cfg.num_uavs = int(parse_int(key, value));
    else if (key == "num_gts") cfg.num_gts = int(parse_int(key, value));
    else if (key == "num_steps") cfg.num_steps = int(parse_int(key, value));
    else if (key == "delta_t") cfg.delta_t = parse_double(key, value);
    else if (key == "altitude") cfg.altitude = parse_double(key, value);
    else if (key == "beta0") cfg.beta0 = parse_double(key, value);
    else if (key == "beta0_db")
      cfg.beta0 = std::pow(10.0, parse_double(key, value) / 10.0);
    else if (key == "sigma0_sq") cfg.sigma0_sq = parse_double(key, value);
    else if (key == "noise_dbm")
      cfg.sigma0_sq = std::pow(10.0, parse_double(key, value) / 10.0) * 1e-3;
    else if (key == "p_max") cfg.p_max = parse_double(key, value);
    else if (key == "v_min") cfg.v_min = parse_double(key, value);
    else if (key == "v_max") cfg.v_max = parse_double(key, value);
    else if (key == "a_max") cfg.a_max = parse_double(key, value);
    else if (key == "d_min") cfg.d_min = parse_double(key, value);
    else if (key == "e_max") cfg.e_max = parse_double(key, value);
    else if (key == "c1") cfg.c1 = parse_double(key, value);
    else if (key == "c2") cfg.c2 = parse_double(key, value);
    else if (key == "mass") cfg.mass = parse_double(key, value);
    else if (key == "gravity") cfg.gravity = parse_double(key, value);
    else if (key == "epsilon") cfg.epsilon = parse_double(key, value);
    else if (key == "max_iters") cfg.max_iters = int(parse_int(key, value));
    else if (key == "seed") cfg.seed = std::uint64_t(parse_int(key, value));
    else if (key == "gt") {
      for (auto& c : value)
        if (c == ',') c = ' ';
      std::istringstream ss(value);
      double x, y;
      if (!(ss >> x >> y)) throw ConfigError("gt", "expected 'x, y'");
      cfg.gt_positions.emplace_back(x, y);
    } else if (key == "gt_area") {
      for (auto& c : value)
        if (c == ',') c = ' ';
      std::istringstream ss(value);
      if (!(ss >> area_w >> area_h))
        throw ConfigError("gt_area", "expected 'width height'");
      have_gt_area = true;
    } else {
      throw ConfigError(key, "unknown key");
    }
  }

  if (cfg.gt_positions.empty()) {
    if (!have_gt_area)
      throw ConfigError("gt_positions",
                        "missing: provide 'gt = x, y' lines or 'gt_area'");
    if (cfg.num_gts < 1) throw ConfigError("num_gts", "required with gt_area");
    cfg.gt_positions =
        random_gt_positions(cfg.num_gts, area_w, area_h, cfg.seed);
  }
  if (cfg.num_gts == 0) cfg.num_gts = int(cfg.gt_positions.size());
  if (int(cfg.gt_positions.size()) != cfg.num_gts)
    throw ConfigError("gt_positions",
                      "count disagrees with num_gts (" +
                          std::to_string(cfg.gt_positions.size()) + " vs " +
                          std::to_string(cfg.num_gts) + ")");
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("scenario", e.what());
  }
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  return load_scenario(in);
}

void save_scenario(const ScenarioConfig& cfg, std::ostream& out) {
  char buf[128];
  auto emit = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s = %.17g\n", key, v);
    out << buf;
  };
  out << "num_uavs = " << cfg.num_uavs << "\n";
  out << "num_gts = " << cfg.num_gts << "\n";
  out << "num_steps = " << cfg.num_steps << "\n";
  emit("delta_t", cfg.delta_t);
  emit("altitude", cfg.altitude);
  emit("beta0", cfg.beta0);
  emit("sigma0_sq", cfg.sigma0_sq);
  emit("p_max", cfg.p_max);
  emit("v_min", cfg.v_min);
  emit("v_max", cfg.v_max);
  emit("a_max", cfg.a_max);
  emit("d_min", cfg.d_min);
  emit("e_max", cfg.e_max);
  emit("c1", cfg.c1);
  emit("c2", cfg.c2);
  emit("mass", cfg.mass);
  emit("gravity", cfg.gravity);
  emit("epsilon", cfg.epsilon);
  out << "max_iters = " << cfg.max_iters << "\n";
  out << "seed = " << cfg.seed << "\n";
  for (const auto& w : cfg.gt_positions) {
    std::snprintf(buf, sizeof buf, "gt = %.17g, %.17g\n", w.x(), w.y());
    out << buf;
  }
}

ScenarioConfig default_scenario(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.num_uavs = 2;
  cfg.num_gts = 6;
  cfg.num_steps = 100;
  cfg.seed = seed;
  cfg.gt_positions = random_gt_positions(cfg.num_gts, 500.0, 500.0, seed);
  cfg.validate();
  return cfg;
}

}  // namespace uavfair
