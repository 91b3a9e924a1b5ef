#pragma once

#include "canham/assembly.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace canham::cli {

// Run configuration: a flat key=value file, overridden by command-line flags
// of the same name (underscores become dashes on the command line).
struct RunConfig {
  int m = 2;
  std::vector<double> taus{1e-4};
  double alpha = 0.5;
  int lmax = 256;
  PhiSource phi = PhiSource::exact;
  Admissibility admissibility = Admissibility::strict;
  QuadratureSpec quadrature;
  MeshResolution mesh;
  std::optional<double> target_v;
  std::string out = "canham_out";
  std::uint64_t seed = 20240607;
  int jobs = 1;
};

struct SettingInfo {
  const char* key;
  const char* help;
};
// Every recognised key with a one-line description including its default.
const std::vector<SettingInfo>& settings();

// Throws std::invalid_argument for unknown keys or unparsable values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
// Lines "key = value"; '#' starts a comment; blank lines are ignored.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

// Range checks plus the admissibility rules for every tau of the config;
// throws std::invalid_argument or AdmissibilityError.
void validate(const RunConfig& config);

SurfaceSpec surface_spec(const RunConfig& config, double tau);

}  // namespace canham::cli
