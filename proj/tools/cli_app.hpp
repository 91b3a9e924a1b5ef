#pragma once

#include "run_config.hpp"

#include "canham/reports.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace canham::cli {

enum ExitCode { kOk = 0, kFailure = 1, kAdmissibility = 2, kArtifact = 3, kUsage = 4 };

// Parses the command line and runs one command, writing its output (or an
// error JSON document) to `os`. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& os);

int cmd_build(const RunConfig& config, const std::string& artifact, std::ostream& os);
// One row per tau, computed `config.jobs` at a time; failures are recorded per row.
std::vector<SweepRow> sweep_rows(const RunConfig& config);
int cmd_sweep(const RunConfig& config, std::ostream& os);
int cmd_solve_v(const RunConfig& config, int table_points, std::ostream& os);
int cmd_verify(const RunConfig& config, bool quick, const std::string& artifact, const std::vector<int>& only,
               std::ostream& os);
int cmd_export_mesh(const RunConfig& config, const std::string& space, const std::string& format, bool refine,
                    std::ostream& os);
int cmd_ld_solve(const RunConfig& config, std::ostream& os);

}  // namespace canham::cli
