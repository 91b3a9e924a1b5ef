#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace canham::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::invalid_argument("config: invalid value '" + value + "' for " + key);
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != value.size()) bad_value(key, value);
  return x;
}

template <class Int>
Int to_int(const std::string& key, const std::string& value) {
  Int x{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
  return x;
}

}  // namespace

const std::vector<SettingInfo>& settings() {
  static const std::vector<SettingInfo> s{
      {"m", "number of bridges (genus m - 1); default 2"},
      {"tau", "bridge waist; a comma-separated list is a tau ladder; default 1e-4"},
      {"alpha", "gluing exponent in (0,1); default 0.5"},
      {"lmax", "spherical-harmonic degree of the spectral LD solve; default 256"},
      {"phi", "LD solution used for the surface: exact | spectral; default exact"},
      {"admissibility", "strict | geometric (geometric drops 2 tau^alpha < 1/(10m)); default strict"},
      {"radial_nodes", "Gauss nodes per radial panel; default 20"},
      {"angular_nodes", "Gauss nodes per angular panel; default 24"},
      {"bridge_s_nodes", "Gauss nodes in s per half bridge; default 64"},
      {"bridge_theta_nodes", "uniform nodes in the bridge angle; default 32"},
      {"boundary_nodes", "nodes per boundary circle; default 64"},
      {"mesh_angular", "mesh vertices per ring (multiple of 4); default 64"},
      {"target_v", "isoperimetric ratio to reach with the Moebius family; no default"},
      {"out", "output directory; default canham_out"},
      {"seed", "seed for sampled checks; default 20240607"},
      {"jobs", "concurrent sweep rows; default 1"},
  };
  return s;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "m") {
    c.m = to_int<int>(key, value);
  } else if (key == "tau") {
    c.taus.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) c.taus.push_back(to_double(key, trim(item)));
    if (c.taus.empty()) bad_value(key, value);
  } else if (key == "alpha") {
    c.alpha = to_double(key, value);
  } else if (key == "lmax") {
    c.lmax = to_int<int>(key, value);
  } else if (key == "phi") {
    if (value == "exact") c.phi = PhiSource::exact;
    else if (value == "spectral") c.phi = PhiSource::spectral;
    else bad_value(key, value);
  } else if (key == "admissibility") {
    if (value == "strict") c.admissibility = Admissibility::strict;
    else if (value == "geometric") c.admissibility = Admissibility::geometric;
    else bad_value(key, value);
  } else if (key == "radial_nodes") {
    c.quadrature.radial_nodes = to_int<int>(key, value);
  } else if (key == "angular_nodes") {
    c.quadrature.angular_nodes = to_int<int>(key, value);
  } else if (key == "bridge_s_nodes") {
    c.quadrature.bridge_s_nodes = to_int<int>(key, value);
  } else if (key == "bridge_theta_nodes") {
    c.quadrature.bridge_theta_nodes = to_int<int>(key, value);
  } else if (key == "boundary_nodes") {
    c.quadrature.boundary_nodes = to_int<int>(key, value);
  } else if (key == "mesh_angular") {
    c.mesh.angular = to_int<int>(key, value);
  } else if (key == "target_v") {
    c.target_v = to_double(key, value);
  } else if (key == "out") {
    if (value.empty()) bad_value(key, value);
    c.out = value;
  } else if (key == "seed") {
    c.seed = to_int<std::uint64_t>(key, value);
  } else if (key == "jobs") {
    c.jobs = to_int<int>(key, value);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(number) + ": expected key = value");
    try {
      apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

void validate(const RunConfig& c) {
  if (c.m < 1) throw std::invalid_argument("config: m must be >= 1");
  if (c.taus.empty()) throw std::invalid_argument("config: no tau given");
  if (c.lmax < 4) throw std::invalid_argument("config: lmax must be >= 4");
  if (c.mesh.angular < 8 || c.mesh.angular % 4 != 0)
    throw std::invalid_argument("config: mesh_angular must be a multiple of 4, >= 8");
  if (c.jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
  for (int n : {c.quadrature.radial_nodes, c.quadrature.angular_nodes, c.quadrature.bridge_s_nodes,
                c.quadrature.bridge_theta_nodes, c.quadrature.boundary_nodes})
    if (n < 2) throw std::invalid_argument("config: quadrature node counts must be >= 2");
  if (c.target_v && !(*c.target_v > 0.0 && *c.target_v < 1.0))
    throw std::invalid_argument("v must lie in (0,1)");
  for (double tau : c.taus) check_admissibility(c.m, tau, c.alpha, c.admissibility);
}

SurfaceSpec surface_spec(const RunConfig& c, double tau) {
  SurfaceSpec s;
  s.m = c.m;
  s.tau = tau;
  s.alpha = c.alpha;
  s.lmax = c.lmax;
  s.phi = c.phi;
  s.admissibility = c.admissibility;
  s.quadrature = c.quadrature;
  s.mesh = c.mesh;
  return s;
}

}  // namespace canham::cli
