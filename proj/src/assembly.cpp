#include "canham/assembly.hpp"

#include <cmath>
#include <cstdint>
#include <queue>
#include <unordered_map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace canham {

namespace {

constexpr double kPi = std::numbers::pi;

Vec4 graph_vertex(const S2Point& x, double u) {
  Vec4 v;
  v << std::cos(u) * x.coords(), std::sin(u);
  return v;
}

// rho_max of a lune about an equatorial point (see Region::punctured).
double lune_extent(int m, double theta) {
  if (m == 1) return kPi;
  if (m == 2) return kPi / 2;
  return std::atan2(std::tan(kPi / m), std::abs(std::cos(theta)));
}

}  // namespace

BuiltSurface build_surface(const SurfaceSpec& spec, std::shared_ptr<const LDSolution> ld) {
  if (!ld) throw std::invalid_argument("build_surface: missing LD solution");
  if (ld->config().m != spec.m) throw std::invalid_argument("build_surface: LD solution has a different m");
  Profile profile = build_profile(ld, spec.tau, spec.alpha, spec.admissibility);
  GluedProfile glued = build_glued_profile(profile);
  std::vector<BridgeChart> bridges;
  for (const auto& p : ld->config().points) bridges.emplace_back(p, spec.tau, spec.alpha);
  BuiltSurface s{spec, ld, glued, bridges, 0.0};
  for (const auto& chart : s.bridges) {
    for (int k = 0; k < 8; ++k) {
      const S2Point x = chart.frame().point(glued.inner_radius(), 2.0 * kPi * k / 8);
      s.interface_mismatch =
          std::max(s.interface_mismatch, std::abs(glued.value(x) - chart.tau() * chart.s_max()));
    }
  }
  return s;
}

BuiltSurface build_surface(const SurfaceSpec& spec) {
  // Reject inadmissible parameters before any (possibly expensive) solve.
  check_admissibility(spec.m, spec.tau, spec.alpha, spec.admissibility);
  std::shared_ptr<const LDSolution> ld =
      spec.phi == PhiSource::exact ? std::make_shared<const LDSolution>(build_phi_closed_form(spec.m))
                                   : std::make_shared<const LDSolution>(build_phi(spec.m, spec.lmax));
  return build_surface(spec, std::move(ld));
}

MeshedSurface mesh_surface(const BuiltSurface& surface, const MeshResolution& res) {
  const int m = surface.spec.m;
  const int nt = res.angular;
  if (nt < 8 || nt % 4 != 0) throw std::invalid_argument("mesh: angular resolution must be a multiple of 4, >= 8");
  const double dtheta = 2.0 * kPi / nt;
  const double r_in = surface.glued.inner_radius();
  const double rho_top = m == 1 ? kPi : kPi / 2;
  const int nr = res.radial > 0 ? res.radial : std::max(4, static_cast<int>(std::ceil(std::log(rho_top / r_in) / dtheta)));
  const double s_max = surface.bridges.front().s_max();
  int ns = res.bridge > 0 ? res.bridge : static_cast<int>(std::ceil(2.0 * s_max / dtheta));
  ns = std::max(ns, 2);

  MeshedSurface out;
  auto& V = out.mesh.vertices;
  auto& F = out.mesh.faces;
  auto add = [&](const Vec4& v, VertexRole role, const VertexParam& param) {
    V.push_back(v);
    out.roles.push_back(role);
    out.params.push_back(param);
    return static_cast<int>(V.size()) - 1;
  };
  auto sheet_param = [](const S2Point& x, int sign) {
    VertexParam p;
    p.on_sheet = true;
    p.x = x.coords();
    p.sign = sign;
    return p;
  };

  const auto& pts = surface.glued.points();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const PolarFrame frame(pts[k].coords());
    const int rows = m == 1 ? nr : nr + 1;  // m = 1 closes with a fan at the antipode
    std::vector<std::vector<int>> up(rows, std::vector<int>(nt)), lo(rows, std::vector<int>(nt));
    for (int j = 0; j < rows; ++j)
      for (int i = 0; i < nt; ++i) {
        const double theta = -kPi / 2 + dtheta * i;
        const double rho_max = lune_extent(m, theta);
        const double rho = j == 0 ? r_in : (j == nr ? rho_max : r_in * std::pow(rho_max / r_in, static_cast<double>(j) / nr));
        const S2Point x = frame.point(rho, theta);
        const double u = surface.glued.value(x);
        up[j][i] = add(graph_vertex(x, u), VertexRole::upper, sheet_param(x, +1));
        lo[j][i] = add(graph_vertex(x, -u), VertexRole::lower, sheet_param(x, -1));
      }
    for (int j = 0; j + 1 < rows; ++j)
      for (int i = 0; i < nt; ++i) {
        const int i1 = (i + 1) % nt;
        F.push_back({up[j][i], up[j][i1], up[j + 1][i1]});
        F.push_back({up[j][i], up[j + 1][i1], up[j + 1][i]});
        F.push_back({lo[j][i], lo[j + 1][i1], lo[j][i1]});
        F.push_back({lo[j][i], lo[j + 1][i], lo[j + 1][i1]});
      }
    if (m == 1) {
      const Vec3 anti = -frame.p;
      const S2Point xa(anti);
      const double u = surface.glued.value(xa);
      const int a_up = add(graph_vertex(xa, u), VertexRole::upper, sheet_param(xa, +1));
      const int a_lo = add(graph_vertex(xa, -u), VertexRole::lower, sheet_param(xa, -1));
      for (int i = 0; i < nt; ++i) {
        const int i1 = (i + 1) % nt;
        F.push_back({up[rows - 1][i], up[rows - 1][i1], a_up});
        F.push_back({lo[rows - 1][i], a_lo, lo[rows - 1][i1]});
      }
    }

    // Bridge: rows from the lower ring (s = -s_max) to the upper ring (s = s_max).
    const BridgeChart& chart = surface.bridges[k];
    if (up[0].size() != static_cast<std::size_t>(nt) || lo[0].size() != static_cast<std::size_t>(nt))
      throw std::logic_error("mesh: stitching count mismatch");
    std::vector<std::vector<int>> br(ns + 1);
    br[0] = lo[0];
    br[ns] = up[0];
    for (int i = 0; i < nt; ++i)
      for (int end = 0; end < 2; ++end) {
        VertexParam& p = out.params[end == 0 ? lo[0][i] : up[0][i]];
        p.on_bridge = true;
        p.bridge = static_cast<int>(k);
        p.s = end == 0 ? -chart.s_max() : chart.s_max();
        p.theta = -kPi / 2 + dtheta * i;
      }
    for (int j = 1; j < ns; ++j) {
      br[j].resize(nt);
      const double s = chart.s_max() * static_cast<double>(2 * j - ns) / ns;
      for (int i = 0; i < nt; ++i) {
        VertexParam p;
        p.on_bridge = true;
        p.bridge = static_cast<int>(k);
        p.s = s;
        p.theta = -kPi / 2 + dtheta * i;
        br[j][i] = add(chart.position(s, p.theta), VertexRole::bridge, p);
      }
    }
    for (int j = 0; j < ns; ++j)
      for (int i = 0; i < nt; ++i) {
        const int i1 = (i + 1) % nt;
        F.push_back({br[j][i], br[j][i1], br[j + 1][i1]});
        F.push_back({br[j][i], br[j + 1][i1], br[j + 1][i]});
      }
  }

  // Lune edges (and the poles) are generated once per lune; merge them.
  std::vector<int> remap;
  MeshedSurface result;
  result.mesh = weld(out.mesh, 1e-10, &remap);
  if (result.mesh.faces.size() != out.mesh.faces.size()) throw std::logic_error("mesh: welding collapsed faces");
  result.roles.resize(result.mesh.vertices.size());
  result.params.resize(result.mesh.vertices.size());
  std::vector<bool> seen(result.mesh.vertices.size(), false);
  for (std::size_t i = 0; i < remap.size(); ++i) {
    const int j = remap[i];
    if (seen[j]) continue;
    seen[j] = true;
    result.roles[j] = out.roles[i];
    result.params[j] = out.params[i];
  }
  return result;
}

namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b)), hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

double wrap_angle(double t) { return t - 2.0 * kPi * std::floor((t + kPi / 2) / (2.0 * kPi)); }

}  // namespace

void refine_near(const BuiltSurface& surface, MeshedSurface& meshed, const FocusRefinement& ref) {
  auto& V = meshed.mesh.vertices;
  auto& F = meshed.mesh.faces;
  auto& P = meshed.params;
  auto& R = meshed.roles;
  std::vector<Vec3> Y(V.size());
  for (std::size_t i = 0; i < V.size(); ++i) Y[i] = Vec3(V[i].head<3>() / (1.0 - V[i][3]));

  std::unordered_map<std::uint64_t, std::array<int, 2>> edge_faces;
  edge_faces.reserve(F.size() * 2);
  auto attach = [&](int a, int b, int f) {
    auto& slot = edge_faces.try_emplace(edge_key(a, b), std::array<int, 2>{-1, -1}).first->second;
    (slot[0] < 0 ? slot[0] : slot[1]) = f;
  };
  auto detach = [&](int a, int b, int f) {
    auto it = edge_faces.find(edge_key(a, b));
    if (it == edge_faces.end()) return;
    if (it->second[0] == f) it->second[0] = it->second[1];
    it->second[1] = -1;
    if (it->second[0] < 0) edge_faces.erase(it);
  };
  for (std::size_t f = 0; f < F.size(); ++f)
    for (int c = 0; c < 3; ++c) attach(F[f][c], F[f][(c + 1) % 3], static_cast<int>(f));

  auto excess = [&](int a, int b) {
    const double len = (Y[a] - Y[b]).norm();
    const double target = std::max(ref.h_min, ref.kappa * (0.5 * (Y[a] + Y[b]) - ref.focus).norm());
    return len / target;
  };
  using Item = std::pair<double, std::uint64_t>;
  std::priority_queue<Item> queue;
  for (const auto& [key, faces] : edge_faces) {
    const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    const double e = excess(a, b);
    if (e > 1.0) queue.push({e, key});
  }

  const double r_in = surface.glued.inner_radius();
  auto midpoint = [&](int a, int b, Vec4& pos, VertexParam& param, VertexRole& role) {
    const VertexParam& pa = P[a];
    const VertexParam& pb = P[b];
    const bool same_ring = pa.on_bridge && pb.on_bridge && pa.bridge == pb.bridge &&
                           std::abs(pa.s) == std::abs(pb.s) && pa.s == pb.s && pa.on_sheet && pb.on_sheet;
    if (pa.on_bridge && pb.on_bridge && pa.bridge == pb.bridge && (!(pa.on_sheet && pb.on_sheet) || same_ring)) {
      const BridgeChart& chart = surface.bridges[pa.bridge];
      double tb = pb.theta;
      while (tb - pa.theta > kPi) tb -= 2.0 * kPi;
      while (tb - pa.theta < -kPi) tb += 2.0 * kPi;
      param.on_bridge = true;
      param.bridge = pa.bridge;
      param.s = 0.5 * (pa.s + pb.s);
      param.theta = wrap_angle(0.5 * (pa.theta + tb));
      pos = chart.position(param.s, param.theta);
      role = VertexRole::bridge;
      if (same_ring) {
        // Stay on the ring: also a sheet vertex.
        param.on_sheet = true;
        param.sign = pa.sign;
        param.x = chart.frame().point(r_in, param.theta).coords();
        const double u = pa.sign * surface.glued.value(S2Point(param.x));
        pos << std::cos(u) * param.x, std::sin(u);
        role = pa.sign > 0 ? VertexRole::upper : VertexRole::lower;
      }
      return;
    }
    if (pa.on_sheet && pb.on_sheet && pa.sign == pb.sign) {
      S2Point x(pa.x + pb.x);
      // Keep the midpoint outside the discs removed for the bridges.
      const auto& pts = surface.glued.points();
      const std::size_t k = nearest_index(x, pts);
      if (geodesic_distance(pts[k], x) < r_in) {
        const Vec3 c = pts[k].coords();
        const Vec3 dir = (x.coords() - x.coords().dot(c) * c).normalized();
        x = S2Point(std::cos(r_in) * c + std::sin(r_in) * dir);
      }
      param.on_sheet = true;
      param.x = x.coords();
      param.sign = pa.sign;
      const double u = pa.sign * surface.glued.value(x);
      pos << std::cos(u) * x.coords(), std::sin(u);
      role = pa.sign > 0 ? VertexRole::upper : VertexRole::lower;
      return;
    }
    throw std::logic_error("refine: edge joins incompatible surface pieces");
  };

  while (!queue.empty() && V.size() < ref.max_vertices) {
    const auto [e, key] = queue.top();
    queue.pop();
    auto it = edge_faces.find(key);
    if (it == edge_faces.end()) continue;
    const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    if (excess(a, b) != e) continue;  // stale entry
    const std::array<int, 2> faces = it->second;

    Vec4 pos;
    VertexParam param;
    VertexRole role = VertexRole::bridge;
    midpoint(a, b, pos, param, role);
    const int m = static_cast<int>(V.size());
    V.push_back(pos);
    P.push_back(param);
    R.push_back(role);
    Y.push_back(Vec3(pos.head<3>() / (1.0 - pos[3])));

    edge_faces.erase(it);
    std::vector<int> touched{a, b};
    for (int f : faces) {
      if (f < 0) continue;
      Face face = F[f];
      // Rotate so that the split edge is (face[0], face[1]).
      while (!((face[0] == a && face[1] == b) || (face[0] == b && face[1] == a)))
        face = {face[1], face[2], face[0]};
      const int p = face[0], q = face[1], r = face[2];
      const int g = static_cast<int>(F.size());
      detach(q, r, f);
      F[f] = {p, m, r};
      F.push_back({m, q, r});
      attach(p, m, f);
      attach(m, r, f);
      attach(m, q, g);
      attach(q, r, g);
      attach(m, r, g);
      touched.push_back(r);
    }
    for (int t : touched) {
      const double x = excess(m, t);
      if (x > 1.0) queue.push({x, edge_key(m, t)});
    }
  }
}

MeshedSurface mesh_refined_near(const BuiltSurface& surface, const Vec3& focus) {
  MeshedSurface meshed = mesh_surface(surface);
  FocusRefinement ref;
  ref.focus = focus;
  refine_near(surface, meshed, ref);
  return meshed;
}

EnergyReport total_energy(const BuiltSurface& surface) {
  const SurfaceSpec& spec = surface.spec;
  const QuadratureSpec& q = spec.quadrature;
  EnergyReport r;
  r.m = spec.m;
  r.tau = spec.tau;
  r.alpha = spec.alpha;
  const double ltau = std::abs(std::log(spec.tau));

  KahanSum margin, err;
  for (const auto& chart : surface.bridges) {
    r.bridges.push_back(bridge_willmore(chart, q));
    margin.add(r.bridges.back().deficit);
    err.add(r.bridges.back().error + r.bridges.back().rounding);
  }
  r.graph = exterior_willmore(surface.glued, q, true);
  margin.add(2.0 * r.graph.energy.deficit);
  err.add(2.0 * (r.graph.energy.error + r.graph.energy.rounding));

  KahanSum bsum;
  for (const auto& b : r.bridges) bsum.add(b.deficit);
  r.bridge_deficit = bsum.value() / static_cast<double>(r.bridges.size());
  r.graph_deficit = r.graph.energy.deficit;
  r.margin = margin.value();
  r.willmore = 8.0 * kPi + r.margin;
  r.error_bound = err.value();

  // Independent bookkeeping: one accumulator over every node of every region.
  KahanSum single;
  for (const auto& chart : surface.bridges) visit_bridge_deficit(chart, q, [&](double v) { single.add(v); });
  const Region domain = surface.glued.domain();
  for (int sheet = 0; sheet < 2; ++sheet) {
    const double sign = sheet == 0 ? 1.0 : -1.0;
    visit_nodes(domain, q, [&](const S2Point& x, double w) {
      single.add(w * graph_deficit_density(graph_point(x, sign * surface.glued.jet(x))));
    });
  }
  r.single_pass = single.value();
  r.single_pass_difference = std::abs(r.single_pass - r.margin);

  r.reference_scale = spec.m * kPi * spec.tau * spec.tau * ltau;
  r.margin_ratio = std::abs(r.margin) / r.reference_scale;
  r.bridge_lemma_bound = (8.0 * kPi / 3.0) * spec.tau * spec.tau * ltau;
  for (const auto& chart : surface.bridges)
    r.bridge_max_H = std::max(r.bridge_max_H, bridge_max_mean_curvature(chart));
  r.bridge_H_constant = r.bridge_max_H / (spec.tau * ltau);
  r.interface_mismatch = surface.interface_mismatch;
  r.verdict = r.margin < -r.error_bound ? "W<8π: certified" : "inconclusive";
  return r;
}

MobiusPoints default_mobius_points(const BuiltSurface& surface) {
  const S2Point south(0.0, 0.0, -1.0);
  const double u = surface.glued.value(south);
  MobiusPoints p;
  p.p_minus = Vec3(0.0, 0.0, 1.0);
  p.p_plus = Vec3(0.0, 0.0, -std::cos(u) / (1.0 - std::sin(u)));
  return p;
}

}  // namespace canham
