#include "canham/reports.hpp"

#include <openssl/evp.h>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace canham {

namespace {

constexpr double kPi = std::numbers::pi;

// Shortest text that reads back to the same double.
std::string number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::string to_string(PhiSource s) { return s == PhiSource::exact ? "exact" : "spectral"; }
std::string to_string(Admissibility a) { return a == Admissibility::strict ? "strict" : "geometric"; }

}  // namespace

Json quantity(double value, double error) { return Json{{"value", value}, {"error", error}}; }

Json to_json(const SurfaceSpec& spec) {
  const QuadratureSpec& q = spec.quadrature;
  return Json{{"m", spec.m},
              {"tau", spec.tau},
              {"alpha", spec.alpha},
              {"lmax", spec.lmax},
              {"phi", to_string(spec.phi)},
              {"admissibility", to_string(spec.admissibility)},
              {"quadrature",
               {{"radial_nodes", q.radial_nodes},
                {"angular_nodes", q.angular_nodes},
                {"transition_subpanels", q.transition_subpanels},
                {"log_panel_width", q.log_panel_width},
                {"bridge_s_nodes", q.bridge_s_nodes},
                {"bridge_theta_nodes", q.bridge_theta_nodes},
                {"boundary_nodes", q.boundary_nodes}}},
              {"mesh", {{"angular", spec.mesh.angular}, {"radial", spec.mesh.radial}, {"bridge", spec.mesh.bridge}}}};
}

Json to_json(const Topology& t) {
  return Json{{"vertices", t.vertices}, {"edges", t.edges},       {"faces", t.faces},
              {"watertight", t.watertight}, {"oriented", t.oriented}, {"manifold_vertices", t.manifold_vertices},
              {"euler_characteristic", t.euler}, {"genus", t.genus}};
}

Json to_json(const RegionEnergy& e) {
  return Json{{"area", quantity(e.area, e.error)},
              {"h2", quantity(e.h2, e.error)},
              {"willmore", quantity(e.willmore, e.error)},
              {"reference_area", quantity(e.reference)},
              {"deficit", quantity(e.deficit, e.error + e.rounding)},
              {"nodes", e.nodes}};
}

Json to_json(const EnergyReport& r) {
  Json bridges = Json::array();
  for (const auto& b : r.bridges) bridges.push_back(to_json(b));
  const ExteriorDiagnostics& d = r.graph.diagnostics;
  const double graph_err = r.graph.energy.error + r.graph.energy.rounding;
  return Json{
      {"schema_version", kSchemaVersion},
      {"kind", "energy_report"},
      {"m", r.m},
      {"tau", r.tau},
      {"alpha", r.alpha},
      {"bridges", bridges},
      {"graph", to_json(r.graph.energy)},
      {"bridge_deficit", quantity(r.bridge_deficit, r.bridges.empty() ? 0.0 : r.bridges.front().error + r.bridges.front().rounding)},
      {"graph_deficit", quantity(r.graph_deficit, graph_err)},
      {"willmore", quantity(r.willmore, r.error_bound)},
      {"W_minus_8pi", quantity(r.margin, r.error_bound)},
      {"error_bound", r.error_bound},
      {"single_pass", quantity(r.single_pass, r.error_bound)},
      {"single_pass_difference", r.single_pass_difference},
      {"reference_scale", quantity(r.reference_scale)},
      {"margin_ratio", quantity(r.margin_ratio, r.error_bound / r.reference_scale)},
      {"diagnostics",
       {{"bridge_lemma_bound", quantity(r.bridge_lemma_bound)},
        {"bridge_max_H", quantity(r.bridge_max_H)},
        {"bridge_H_constant", quantity(r.bridge_H_constant)},
        {"exterior_lemma_bound", quantity(d.lemma_bound)},
        {"annulus_max_laplacian", quantity(d.max_laplacian_annulus)},
        {"annulus_max_jacobi", quantity(d.max_jacobi_annulus)},
        {"annulus_laplacian_constant", quantity(d.laplacian_constant)},
        {"annulus_jacobi_constant", quantity(d.jacobi_constant)},
        {"phi_gl_c2_norm", quantity(d.c2_norm)},
        {"phi_gl_c2_constant", quantity(d.c2_constant)},
        {"energy_pairing", quantity(d.energy_pairing, graph_err)},
        {"flux_term", quantity(d.flux_term)},
        {"pairing_error_constant", quantity(d.pairing_error_constant)},
        {"forcing_region_term", quantity(d.forcing_region_term)},
        {"interface_mismatch", quantity(r.interface_mismatch)}}},
      {"verdict", r.verdict}};
}

Json to_json(const IsoperimetricReport& r) {
  Json j{{"schema_version", kSchemaVersion},
         {"kind", "isoperimetric_report"},
         {"area", quantity(r.area)},
         {"volume", quantity(r.volume)},
         {"v", quantity(r.v)},
         {"genus", r.genus}};
  if (r.willmore) j["discrete_willmore"] = *r.willmore;
  return j;
}

Json to_json(const VSolve& s) {
  return Json{{"family", s.map.description()},
              {"lambda", s.map.lambda},
              {"achieved_v", quantity(s.achieved_v)},
              {"bracket",
               {{"lambda_lo", s.lambda_lo}, {"lambda_hi", s.lambda_hi}, {"v_lo", s.v_lo}, {"v_hi", s.v_hi}}},
              {"iterations", s.iterations}};
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

Json ld_artifact(const LDSolution& sol) {
  const HarmonicSeries& w = sol.smooth_part();
  Json payload{{"m", sol.config().m},
               {"mode", to_string(sol.mode())},
               {"extraction_radius", sol.extraction_radius()},
               {"c0", sol.c0()},
               {"lmax", w.lmax()},
               {"coefficients", w.coefficients()}};
  return Json{{"schema_version", kSchemaVersion},
              {"kind", "ld_solution"},
              {"payload", payload},
              {"sha256", sha256_hex(payload.dump())}};
}

LDSolution ld_from_artifact(const Json& a) {
  try {
    if (a.at("kind") != "ld_solution") throw ArtifactError("artifact: not an LD solution");
    if (a.at("schema_version") != kSchemaVersion) throw ArtifactError("artifact: unsupported schema_version");
    const Json& p = a.at("payload");
    const std::string expected = a.at("sha256").get<std::string>();
    const std::string actual = sha256_hex(p.dump());
    if (expected != actual)
      throw ArtifactError("artifact checksum mismatch: expected " + expected + ", computed " + actual);
    const int lmax = p.at("lmax").get<int>();
    const auto coeffs = p.at("coefficients").get<std::vector<double>>();
    HarmonicSeries w;
    if (!coeffs.empty()) {
      w = HarmonicSeries(lmax);
      if (coeffs.size() != w.coefficients().size()) throw ArtifactError("artifact: coefficient count does not match lmax");
      w.coefficients() = coeffs;
    }
    return LDSolution::from_parts(Configuration::equatorial(p.at("m").get<int>()),
                                  phi_mode_from_string(p.at("mode").get<std::string>()),
                                  p.at("extraction_radius").get<double>(), std::move(w), p.at("c0").get<double>());
  } catch (const ArtifactError&) {
    throw;
  } catch (const std::exception& e) {
    throw ArtifactError(std::string("artifact: malformed (") + e.what() + ")");
  }
}

void save_ld_artifact(const LDSolution& sol, const std::filesystem::path& path) { write_json(path, ld_artifact(sol)); }

LDSolution load_ld_artifact(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArtifactError("artifact: cannot open " + path.string());
  Json a;
  try {
    a = Json::parse(in);
  } catch (const std::exception& e) {
    throw ArtifactError(std::string("artifact: not valid JSON (") + e.what() + ")");
  }
  return ld_from_artifact(a);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

void write_json(const std::filesystem::path& path, const Json& json) { write_text(path, json.dump(2) + "\n"); }

void write_obj(const Mesh3& mesh, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << std::setprecision(17);
  for (const Vec3& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const Face& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void write_ply(const Mesh3& mesh, const std::filesystem::path& path) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << mesh.vertices.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "element face " << mesh.faces.size() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  static_assert(std::endian::native == std::endian::little, "PLY writer assumes a little-endian host");
  for (const Vec3& v : mesh.vertices) {
    const double xyz[3] = {v.x(), v.y(), v.z()};
    out.write(reinterpret_cast<const char*>(xyz), sizeof xyz);
  }
  for (const Face& f : mesh.faces) {
    const unsigned char n = 3;
    const std::int32_t idx[3] = {f[0], f[1], f[2]};
    out.write(reinterpret_cast<const char*>(&n), 1);
    out.write(reinterpret_cast<const char*>(idx), sizeof idx);
  }
}

void write_obj4(const SurfaceMesh& mesh, const std::filesystem::path& obj_path, const std::filesystem::path& csv_path) {
  auto obj = open_out(obj_path);
  auto csv = open_out(csv_path);
  obj << std::setprecision(17);
  csv << std::setprecision(17) << "vertex,x4\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec4& v = mesh.vertices[i];
    obj << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    csv << i + 1 << ',' << v[3] << '\n';
  }
  for (const Face& f : mesh.faces) obj << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

Mesh3 read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Mesh3 mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v;
      ls >> v.x() >> v.y() >> v.z();
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      Face f;
      ls >> f[0] >> f[1] >> f[2];
      for (int& i : f) --i;
      mesh.faces.push_back(f);
    }
  }
  return mesh;
}

SweepFit fit_sweep(const std::vector<SweepRow>& rows) {
  std::vector<double> lt, lr, lm;
  for (const auto& r : rows) {
    if (!r.ok || r.energy.margin == 0.0) continue;
    lt.push_back(std::log(r.tau));
    lr.push_back(std::log(r.tau * r.tau * std::abs(std::log(r.tau))));
    lm.push_back(std::log(std::abs(r.energy.margin)));
  }
  auto slope = [&](const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += lm[i];
      sxx += x[i] * x[i];
      sxy += x[i] * lm[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  SweepFit f;
  f.rows = lt.size();
  if (f.rows < 2) {
    f.exponent_tau = f.exponent_reference = std::numeric_limits<double>::quiet_NaN();
    return f;
  }
  f.exponent_tau = slope(lt);
  f.exponent_reference = slope(lr);
  return f;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "tau,bridge_deficit,graph_deficit,W_minus_8pi,error_bound,margin_ratio,v,genus,verdict,error\n";
  for (const auto& r : rows) {
    os << number(r.tau) << ',';
    if (r.ok)
      os << number(r.energy.bridge_deficit) << ',' << number(r.energy.graph_deficit) << ',' << number(r.energy.margin)
         << ',' << number(r.energy.error_bound) << ',' << number(r.energy.margin_ratio) << ',' << number(r.v) << ','
         << r.genus << ',' << r.energy.verdict << ",\n";
    else {
      std::string msg = r.error;
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      os << ",,,,,,,failed," << msg << '\n';
    }
  }
  return os.str();
}

std::string sweep_gnuplot(const std::string& csv_name, int m) {
  std::ostringstream os;
  os << "# gnuplot script for " << csv_name << "\n"
     << "set datafile separator ','\n"
     << "set key top left\n"
     << "set logscale xy\n"
     << "set xlabel 'tau'\n"
     << "set terminal pngcairo size 900,600\n"
     << "set output 'margin.png'\n"
     << "plot '" << csv_name << "' every ::1 using 1:(abs($4)) with linespoints title '|W - 8pi|', \\\n"
     << "     '' every ::1 using 1:($5) with linespoints title 'error bound', \\\n"
     << "     " << m << "*pi*x**2*abs(log(x)) title 'm pi tau^2 |log tau|'\n"
     << "set output 'v.png'\n"
     << "set ylabel 'v'\n"
     << "plot '" << csv_name << "' every ::1 using 1:7 with linespoints title 'v(Y(Sigma))'\n";
  return os.str();
}

Json to_json(const SweepRow& r) {
  if (!r.ok) return Json{{"tau", r.tau}, {"ok", false}, {"error", r.error}};
  return Json{{"tau", r.tau},
              {"ok", true},
              {"energy", to_json(r.energy)},
              {"v", quantity(r.v)},
              {"genus", r.genus}};
}

Json to_json(const SweepFit& f) {
  return Json{{"rows", f.rows},
              {"exponent_vs_tau", std::isfinite(f.exponent_tau) ? Json(f.exponent_tau) : Json(nullptr)},
              {"exponent_vs_tau2_log_tau",
               std::isfinite(f.exponent_reference) ? Json(f.exponent_reference) : Json(nullptr)}};
}

std::string mobius_csv(const std::vector<MobiusSample>& rows) {
  std::ostringstream os;
  os << "lambda,v,discrete_W\n";
  for (const auto& r : rows) os << number(r.lambda) << ',' << number(r.v) << ',' << number(r.discrete_willmore) << '\n';
  return os.str();
}

}  // namespace canham
