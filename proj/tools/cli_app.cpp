#include "cli_app.hpp"

#include "run_config.hpp"

#include "canham/acceptance.hpp"
#include "canham/ambient.hpp"
#include "canham/assembly.hpp"
#include "canham/reports.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <thread>

namespace fs = std::filesystem;

namespace canham::cli {

namespace {

void print_error(std::ostream& os, const std::string& type, const std::string& message, const Json& extra = Json::object()) {
  Json e{{"type", type}, {"message", message}};
  for (auto it = extra.begin(); it != extra.end(); ++it) e[it.key()] = it.value();
  os << Json{{"schema_version", kSchemaVersion}, {"error", e}}.dump(2) << std::endl;
}

std::shared_ptr<const LDSolution> maybe_artifact(const std::string& path) {
  if (path.empty()) return nullptr;
  return std::make_shared<const LDSolution>(load_ld_artifact(path));
}

BuiltSurface build(const RunConfig& c, double tau, const std::shared_ptr<const LDSolution>& ld) {
  const SurfaceSpec spec = surface_spec(c, tau);
  return ld ? build_surface(spec, ld) : build_surface(spec);
}

}  // namespace

int cmd_build(const RunConfig& c, const std::string& artifact, std::ostream& os) {
  const fs::path out(c.out);
  const BuiltSurface surface = build(c, c.taus.front(), maybe_artifact(artifact));
  const EnergyReport energy = total_energy(surface);
  const MeshedSurface meshed = mesh_surface(surface);
  const Topology topo = topology(meshed.mesh.faces, meshed.mesh.vertices.size());
  const Mesh3 mesh3 = stereographic_project(meshed.mesh);
  const IsoperimetricReport iso = isoperimetric_ratio(mesh3, true);

  save_ld_artifact(*surface.ld, out / "ld_solution.json");
  write_obj(mesh3, out / "surface.obj");
  write_ply(mesh3, out / "surface.ply");
  write_obj4(meshed.mesh, out / "surface_s3.obj", out / "surface_s3_x4.csv");
  Json report{{"schema_version", kSchemaVersion},
              {"kind", "build_report"},
              {"spec", to_json(surface.spec)},
              {"energy", to_json(energy)},
              {"topology", to_json(topo)},
              {"isoperimetric", to_json(iso)},
              {"artifacts",
               {"ld_solution.json", "surface.obj", "surface.ply", "surface_s3.obj", "surface_s3_x4.csv",
                "report.json"}}};
  write_json(out / "report.json", report);
  os << report.dump(2) << std::endl;
  return kOk;
}

SweepRow sweep_row(const RunConfig& c, double tau) {
  SweepRow row;
  row.tau = tau;
  try {
    const BuiltSurface surface = build(c, tau, nullptr);
    row.energy = total_energy(surface);
    const MeshedSurface meshed = mesh_surface(surface);
    row.genus = topology(meshed.mesh.faces, meshed.mesh.vertices.size()).genus;
    row.v = isoperimetric_ratio(stereographic_project(meshed.mesh)).v;
    row.ok = true;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

std::vector<SweepRow> sweep_rows(const RunConfig& c) {
  std::vector<SweepRow> rows(c.taus.size());
  // Rows are independent; each writes only its own slot.
  std::size_t next = 0;
  while (next < rows.size()) {
    std::vector<std::thread> batch;
    for (int j = 0; j < c.jobs && next < rows.size(); ++j, ++next)
      batch.emplace_back([&, i = next] { rows[i] = sweep_row(c, c.taus[i]); });
    for (auto& t : batch) t.join();
  }
  return rows;
}

int cmd_sweep(const RunConfig& c, std::ostream& os) {
  const fs::path out(c.out);
  const std::vector<SweepRow> rows = sweep_rows(c);
  const SweepFit fit = fit_sweep(rows);
  write_text(out / "sweep.csv", sweep_csv(rows));
  write_text(out / "sweep.gp", sweep_gnuplot("sweep.csv", c.m));
  Json jrows = Json::array();
  for (const auto& r : rows) jrows.push_back(to_json(r));
  write_json(out / "sweep.json", Json{{"schema_version", kSchemaVersion},
                                      {"kind", "sweep"},
                                      {"m", c.m},
                                      {"alpha", c.alpha},
                                      {"rows", jrows},
                                      {"fit", to_json(fit)}});
  os << sweep_csv(rows);
  os << "# fit: " << to_json(fit).dump() << std::endl;
  for (const auto& r : rows)
    if (!r.ok) return kFailure;
  return kOk;
}

int cmd_solve_v(const RunConfig& c, int table_points, std::ostream& os) {
  if (!c.target_v) throw std::invalid_argument("solve-v: --target-v is required");
  const fs::path out(c.out);
  const BuiltSurface surface = build(c, c.taus.front(), nullptr);
  const EnergyReport energy = total_energy(surface);
  const MobiusPoints pts = default_mobius_points(surface);
  const Mesh3 mesh = stereographic_project(mesh_refined_near(surface, pts.p_plus).mesh);
  const VSolve solve = solve_for_v(mesh, *c.target_v, pts.p_minus, pts.p_plus);
  const IsoperimetricReport iso = isoperimetric_ratio(solve.mesh, true);
  const Topology topo = topology(solve.mesh.faces, solve.mesh.vertices.size());

  write_obj(solve.mesh, out / "solved.obj");
  write_ply(solve.mesh, out / "solved.ply");
  if (table_points > 1) {
    std::vector<MobiusSample> samples;
    for (int i = 0; i < table_points; ++i) {
      MobiusSample s;
      s.lambda = std::pow(10.0, 5.0 * i / (table_points - 1));
      const Mesh3 img = mobius_apply(MobiusMap{pts.p_minus, pts.p_plus, s.lambda}, mesh);
      s.v = isoperimetric_ratio(img).v;
      s.discrete_willmore = discrete_willmore(img);
      samples.push_back(s);
    }
    write_text(out / "mobius.csv", mobius_csv(samples));
  }
  Json report{{"schema_version", kSchemaVersion},
              {"kind", "solve_v_report"},
              {"spec", to_json(surface.spec)},
              {"target_v", *c.target_v},
              {"willmore", quantity(energy.willmore, energy.error_bound)},
              {"W_minus_8pi", quantity(energy.margin, energy.error_bound)},
              {"willmore_source", "chart quadrature of the surface in S^3; Moebius maps and stereographic projection "
                                  "preserve W of closed surfaces"},
              {"verdict", energy.verdict},
              {"solve", to_json(solve)},
              {"isoperimetric", to_json(iso)},
              {"topology", to_json(topo)},
              {"genus", topo.genus}};
  write_json(out / "solve_v.json", report);
  os << report.dump(2) << std::endl;
  return std::abs(iso.v - *c.target_v) < 1e-3 ? kOk : kFailure;
}

int cmd_verify(const RunConfig& c, bool quick, const std::string& artifact, const std::vector<int>& only,
               std::ostream& os) {
  const fs::path out(c.out);
  Json results = Json::array();
  bool all = true;
  if (!artifact.empty()) {
    Json entry{{"criterion", "artifact"}, {"name", "LD artifact checksum"}, {"path", artifact}};
    try {
      const LDSolution sol = load_ld_artifact(artifact);
      entry["passed"] = true;
      entry["summary"] = "checksum verified (m = " + std::to_string(sol.config().m) + ")";
    } catch (const ArtifactError& e) {
      entry["passed"] = false;
      entry["summary"] = std::string("checksum failure: ") + e.what();
      all = false;
    }
    os << (entry["passed"].get<bool>() ? "PASS" : "FAIL") << " [artifact] "
              << entry["summary"].get<std::string>() << std::endl;
    results.push_back(entry);
  }
  AcceptanceOptions options;
  options.seed = c.seed;
  for (const auto& key : quick ? quick_matrix() : acceptance_matrix()) {
    if (!only.empty() && std::find(only.begin(), only.end(), key.id) == only.end()) continue;
    const CriterionResult r = run_criterion(key, options);
    os << format_result(r) << std::endl;
    all = all && r.passed;
    results.push_back(to_json(r));
  }
  std::size_t passed = 0;
  for (const auto& r : results) passed += r["passed"].get<bool>() ? 1 : 0;
  write_json(out / "verify.json", Json{{"schema_version", kSchemaVersion},
                                       {"kind", "verify"},
                                       {"quick", quick},
                                       {"passed", all},
                                       {"results", results}});
  os << passed << "/" << results.size() << " checks passed" << std::endl;
  return all ? kOk : kFailure;
}

int cmd_export_mesh(const RunConfig& c, const std::string& space, const std::string& format, bool refine,
                    std::ostream& os) {
  const fs::path out(c.out);
  const BuiltSurface surface = build(c, c.taus.front(), nullptr);
  const MeshedSurface meshed =
      refine ? mesh_refined_near(surface, default_mobius_points(surface).p_plus) : mesh_surface(surface);
  std::vector<std::string> files;
  if (space == "s3") {
    write_obj4(meshed.mesh, out / "mesh_s3.obj", out / "mesh_s3_x4.csv");
    files = {"mesh_s3.obj", "mesh_s3_x4.csv"};
  } else {
    const Mesh3 mesh3 = stereographic_project(meshed.mesh);
    if (format == "ply") {
      write_ply(mesh3, out / "mesh.ply");
      files = {"mesh.ply"};
    } else {
      write_obj(mesh3, out / "mesh.obj");
      files = {"mesh.obj"};
    }
  }
  const Topology topo = topology(meshed.mesh.faces, meshed.mesh.vertices.size());
  os << Json{{"schema_version", kSchemaVersion}, {"kind", "mesh_export"}, {"files", files},
                    {"topology", to_json(topo)}}
                   .dump(2)
            << std::endl;
  return kOk;
}

int cmd_ld_solve(const RunConfig& c, std::ostream& os) {
  const fs::path out(c.out);
  const LDSolution sol = c.phi == PhiSource::exact ? build_phi_closed_form(c.m) : build_phi(c.m, c.lmax);
  const Json artifact = ld_artifact(sol);
  write_json(out / "ld_solution.json", artifact);
  const double c0 = compute_c0(sol);
  os << Json{{"schema_version", kSchemaVersion},
                    {"kind", "ld_solution_summary"},
                    {"m", c.m},
                    {"mode", to_string(sol.mode())},
                    {"lmax", sol.smooth_part().lmax()},
                    {"c0", quantity(c0, std::abs(c0 - c0_closed_form(c.m)))},
                    {"c0_closed_form", c0_closed_form(c.m)},
                    {"sha256", artifact["sha256"]},
                    {"file", "ld_solution.json"}}
                   .dump(2)
            << std::endl;
  return kOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& os) {
  std::string help_footer = "Settings (config file keys; flags use dashes):\n";
  for (const auto& s : settings()) help_footer += "  " + std::string(s.key) + ": " + s.help + "\n";
  help_footer += "Environment: CANHAM_THREADS caps the worker threads.\n"
                 "Exit codes: 0 ok, 1 failure, 2 admissibility violation, 3 corrupted artifact, 4 usage error.";

  CLI::App app{"Comparison surfaces of genus m-1 with W < 8 pi and prescribed isoperimetric ratio"};
  app.footer(help_footer);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<int> threads;
  bool relaxed = false;
  std::map<std::string, std::optional<std::string>> flags;
  app.add_option("--config", config_path, "key=value configuration file");
  app.add_option("--threads", threads, "worker threads (sets CANHAM_THREADS)");
  app.add_flag("--relaxed-admissibility", relaxed, "use geometric admissibility (admissibility = geometric)");
  for (const auto& s : settings()) {
    std::string name = s.key;
    std::replace(name.begin(), name.end(), '_', '-');
    app.add_option("--" + name, flags[s.key], s.help);
  }

  auto* build_cmd = app.add_subcommand("build", "build the surface: LD artifact, meshes and energy report");
  std::string build_artifact;
  build_cmd->add_option("--artifact", build_artifact, "build on a saved LD-solution artifact");
  auto* sweep_cmd = app.add_subcommand("sweep", "energy and isoperimetric ratio over a tau ladder");
  auto* solve_cmd = app.add_subcommand("solve-v", "Moebius-adjusted mesh with a prescribed isoperimetric ratio");
  int table_points = 0;
  solve_cmd->add_option("--table", table_points, "also write mobius.csv with this many lambda samples");
  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance checks");
  bool quick = false;
  std::string verify_artifact;
  std::vector<int> only;
  verify_cmd->add_flag("--quick", quick, "m <= 2, single tau subset");
  verify_cmd->add_option("--artifact", verify_artifact, "also verify the checksum of an LD-solution artifact");
  verify_cmd->add_option("--criterion", only, "run only these criteria");
  auto* export_cmd = app.add_subcommand("export-mesh", "write the surface mesh");
  std::string space = "r3", format = "obj";
  bool refine = false;
  export_cmd->add_option("--space", space, "r3 (stereographic image) or s3 (OBJ plus x4 sidecar)")
      ->check(CLI::IsMember({"r3", "s3"}));
  export_cmd->add_option("--format", format, "obj or ply (r3 only)")->check(CLI::IsMember({"obj", "ply"}));
  export_cmd->add_flag("--refine", refine, "refine about the Moebius blow-up point");
  auto* ld_cmd = app.add_subcommand("ld-solve", "solve for the LD solution only and write its artifact");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (threads) {
      if (*threads < 1) throw std::invalid_argument("--threads must be >= 1");
      setenv("CANHAM_THREADS", std::to_string(*threads).c_str(), 1);
    }
    RunConfig config = config_path.empty() ? RunConfig{} : load_config_file(config_path);
    for (const auto& s : settings())
      if (flags[s.key]) apply_setting(config, s.key, *flags[s.key]);
    if (relaxed) config.admissibility = Admissibility::geometric;
    validate(config);

    if (build_cmd->parsed()) return cmd_build(config, build_artifact, os);
    if (sweep_cmd->parsed()) return cmd_sweep(config, os);
    if (solve_cmd->parsed()) return cmd_solve_v(config, table_points, os);
    if (verify_cmd->parsed()) return cmd_verify(config, quick, verify_artifact, only, os);
    if (export_cmd->parsed()) return cmd_export_mesh(config, space, format, refine, os);
    if (ld_cmd->parsed()) return cmd_ld_solve(config, os);
    return kUsage;
  } catch (const AdmissibilityError& e) {
    print_error(os, "admissibility", e.what(), Json{{"violations", e.violations()}});
    return kAdmissibility;
  } catch (const ArtifactError& e) {
    print_error(os, "artifact", e.what());
    return kArtifact;
  } catch (const std::invalid_argument& e) {
    print_error(os, "invalid_argument", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    print_error(os, "error", e.what());
    return kFailure;
  }
}

}  // namespace canham::cli
