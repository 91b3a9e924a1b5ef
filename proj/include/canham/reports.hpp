#pragma once

#include "canham/ambient.hpp"
#include "canham/assembly.hpp"
#include "canham/ldsolutions.hpp"
#include "canham/mesh.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace canham {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// {"value": v, "error": e}: every reported number carries an error estimate
// (0 for exact bookkeeping).
Json quantity(double value, double error = 0.0);

Json to_json(const SurfaceSpec& spec);
Json to_json(const Topology& topology);
Json to_json(const RegionEnergy& energy);
Json to_json(const EnergyReport& report);
Json to_json(const IsoperimetricReport& report);
Json to_json(const VSolve& solve);

// Lowercase hex SHA-256 digest.
std::string sha256_hex(const std::string& bytes);

class ArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Versioned LD-solution artifact: the configuration, mode, extraction radius,
// c0 and the smooth-part coefficients, with a SHA-256 checksum of the payload.
Json ld_artifact(const LDSolution& solution);
LDSolution ld_from_artifact(const Json& artifact);  // throws ArtifactError on any mismatch
void save_ld_artifact(const LDSolution& solution, const std::filesystem::path& path);
LDSolution load_ld_artifact(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& json);

// Mesh export: Wavefront OBJ and binary little-endian PLY (double coordinates).
void write_obj(const Mesh3& mesh, const std::filesystem::path& path);
void write_ply(const Mesh3& mesh, const std::filesystem::path& path);
// A mesh on S^3: OBJ with (x1, x2, x3) plus a CSV sidecar "vertex,x4".
void write_obj4(const SurfaceMesh& mesh, const std::filesystem::path& obj_path,
                const std::filesystem::path& csv_path);
Mesh3 read_obj(const std::filesystem::path& path);

// One row of a tau sweep.
struct SweepRow {
  double tau = 0.0;
  bool ok = false;
  std::string error;  // set when the row failed
  EnergyReport energy;
  double v = 0.0;
  int genus = 0;
};

// Least-squares slopes of log|W - 8 pi| against log tau and against
// log(tau^2 |log tau|) over the successful rows (NaN with fewer than two rows).
struct SweepFit {
  double exponent_tau = 0.0;
  double exponent_reference = 0.0;
  std::size_t rows = 0;
};
SweepFit fit_sweep(const std::vector<SweepRow>& rows);

// Columns: tau, bridge_deficit, graph_deficit, W_minus_8pi, error_bound,
// margin_ratio, v, genus, verdict, error.
std::string sweep_csv(const std::vector<SweepRow>& rows);
// gnuplot script plotting |W - 8 pi| and m pi tau^2 |log tau| against tau (log-log), and v.
std::string sweep_gnuplot(const std::string& csv_name, int m);
Json to_json(const SweepRow& row);
Json to_json(const SweepFit& fit);

// Rows "lambda,v,discrete_W".
struct MobiusSample {
  double lambda = 1.0;
  double v = 0.0;
  double discrete_willmore = 0.0;
};
std::string mobius_csv(const std::vector<MobiusSample>& rows);

}  // namespace canham
