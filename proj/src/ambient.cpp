#include "canham/ambient.hpp"

#include "canham/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace canham {

Vec3 stereographic(const Vec4& x) {
  const double d = 1.0 - x[3];
  if (d < 1e-6) throw std::domain_error("stereographic projection: point within 1e-6 of the pole (0,0,0,1)");
  return x.head<3>() / d;
}

namespace {

// Flips all faces of a closed mesh whose enclosed volume came out negative.
// Stereographic projection and inversions can swap the bounded and unbounded
// sides, so orientation is restored after every map.
void orient_outward(Mesh3& mesh) {
  if (!topology(mesh.faces, mesh.vertices.size()).watertight) return;
  KahanSum vol;
  for (const Face& f : mesh.faces)
    vol.add(mesh.vertices[f[0]].dot(mesh.vertices[f[1]].cross(mesh.vertices[f[2]])));
  if (vol.value() < 0.0)
    for (Face& f : mesh.faces) std::swap(f[1], f[2]);
}

}  // namespace

Mesh3 stereographic_project(const SurfaceMesh& mesh) {
  Mesh3 out;
  out.faces = mesh.faces;
  out.vertices.resize(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) out.vertices[i] = stereographic(mesh.vertices[i]);
  orient_outward(out);
  return out;
}

namespace {

// Area and signed volume of the image of the mesh under `map` (identity when
// null); the caller guarantees watertightness.
template <class Map>
AreaVolume area_volume_of(const Mesh3& mesh, const Map& map) {
  std::vector<Vec3> image(mesh.vertices.size());
  for (std::size_t i = 0; i < image.size(); ++i) image[i] = map(mesh.vertices[i]);
  KahanSum area, vol;
  for (const Face& f : mesh.faces) {
    const Vec3& a = image[f[0]];
    const Vec3& b = image[f[1]];
    const Vec3& c = image[f[2]];
    area.add(0.5 * (b - a).cross(c - a).norm());
    vol.add(a.dot(b.cross(c)) / 6.0);
  }
  AreaVolume r;
  r.area = area.value();
  r.signed_volume = vol.value();
  r.volume = std::abs(r.signed_volume);
  return r;
}

}  // namespace

AreaVolume mesh_area_volume(const Mesh3& mesh) {
  if (!topology(mesh.faces, mesh.vertices.size()).watertight)
    throw std::invalid_argument("mesh_area_volume: mesh is not watertight");
  return area_volume_of(mesh, [](const Vec3& x) { return x; });
}

double isoperimetric_value(double area, double volume) {
  return 36.0 * std::numbers::pi * volume * volume / (area * area * area);
}

IsoperimetricReport isoperimetric_ratio(const Mesh3& mesh, bool with_willmore) {
  const AreaVolume av = mesh_area_volume(mesh);
  IsoperimetricReport r;
  r.area = av.area;
  r.volume = av.volume;
  r.v = isoperimetric_value(av.area, av.volume);
  r.genus = topology(mesh.faces, mesh.vertices.size()).genus;
  if (with_willmore) r.willmore = discrete_willmore(mesh);
  return r;
}

double discrete_willmore(const Mesh3& mesh) {
  const std::size_t n = mesh.vertices.size();
  const auto ring1 = vertex_neighbours(mesh.faces, n);
  std::vector<Vec3> normal(n, Vec3::Zero());
  std::vector<double> vertex_area(n, 0.0);
  for (const Face& f : mesh.faces) {
    const Vec3 cr = (mesh.vertices[f[1]] - mesh.vertices[f[0]]).cross(mesh.vertices[f[2]] - mesh.vertices[f[0]]);
    for (int k = 0; k < 3; ++k) {
      normal[f[k]] += cr;  // area weighted
      vertex_area[f[k]] += cr.norm() / 6.0;
    }
  }
  std::vector<double> contrib(n, 0.0);
  parallel_for(n, [&](std::size_t v) {
    // Two-ring stencil.
    std::vector<int> ring = ring1[v];
    for (int w : ring1[v]) ring.insert(ring.end(), ring1[w].begin(), ring1[w].end());
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
    ring.erase(std::remove(ring.begin(), ring.end(), static_cast<int>(v)), ring.end());

    const Vec3 nz = normal[v].normalized();
    const Vec3 a = std::abs(nz.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 ex = (a - a.dot(nz) * nz).normalized();
    const Vec3 ey = nz.cross(ex);
    const Vec3& p = mesh.vertices[v];
    double scale = 0.0;
    for (int w : ring) scale = std::max(scale, (mesh.vertices[w] - p).norm());
    if (!(scale > 0.0) || ring.size() < 5) return;
    Eigen::MatrixXd A(ring.size(), 5);
    Eigen::VectorXd rhs(ring.size());
    for (std::size_t k = 0; k < ring.size(); ++k) {
      const Vec3 d = (mesh.vertices[ring[k]] - p) / scale;
      const double x = d.dot(ex), y = d.dot(ey);
      A.row(k) << x * x, x * y, y * y, x, y;
      rhs[k] = d.dot(nz);
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
    const double qa = c[0], qb = c[1], qc = c[2], qd = c[3], qe = c[4];
    const double H = ((1.0 + qe * qe) * 2.0 * qa - 2.0 * qb * qd * qe + (1.0 + qd * qd) * 2.0 * qc) /
                     std::pow(1.0 + qd * qd + qe * qe, 1.5) / scale;
    contrib[v] = 0.25 * H * H * vertex_area[v];
  });
  KahanSum w;
  for (double c : contrib) w.add(c);
  return w.value();
}

Vec3 MobiusMap::invert(const Vec3& x) const {
  const Vec3 d = x - p_minus;
  return p_minus + d / d.squaredNorm();
}

Vec3 MobiusMap::apply(const Vec3& x) const {
  if (lambda == 1.0) return x;
  const Vec3 c = invert(p_plus);
  return invert(c + lambda * (invert(x) - c));
}

std::string MobiusMap::description() const {
  std::ostringstream os;
  os.precision(17);
  os << "F(x) = I(c + lambda (I(x) - c)), I = inversion in the unit sphere about p_minus, c = I(p_plus); p_minus = ("
     << p_minus.x() << ", " << p_minus.y() << ", " << p_minus.z() << "), p_plus = (" << p_plus.x() << ", "
     << p_plus.y() << ", " << p_plus.z() << "), lambda = " << lambda;
  return os.str();
}

Mesh3 mobius_apply(const MobiusMap& map, const Mesh3& mesh) {
  for (const Vec3& v : mesh.vertices)
    if ((v - map.p_minus).norm() <= 1e-6)
      throw std::invalid_argument("mobius: inversion center p_minus lies on the surface");
  Mesh3 out;
  out.faces = mesh.faces;
  out.vertices.resize(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) out.vertices[i] = map.apply(mesh.vertices[i]);
  orient_outward(out);
  return out;
}

VSolve solve_for_v(const Mesh3& mesh, double target_v, const Vec3& p_minus, const Vec3& p_plus, double tol) {
  if (!(target_v > 0.0 && target_v < 1.0)) throw std::invalid_argument("solve_for_v: v must lie in (0,1)");
  if (!topology(mesh.faces, mesh.vertices.size()).watertight)
    throw std::invalid_argument("solve_for_v: mesh is not watertight");
  for (const Vec3& v : mesh.vertices)
    if ((v - p_minus).norm() <= 1e-6) throw std::invalid_argument("mobius: inversion center p_minus lies on the surface");
  MobiusMap map{p_minus, p_plus, 1.0};
  auto v_at = [&](double lambda) {
    map.lambda = lambda;
    const AreaVolume av = area_volume_of(mesh, [&](const Vec3& x) { return map.apply(x); });
    return isoperimetric_value(av.area, av.volume);
  };
  const double v0 = v_at(1.0);
  if (!(target_v > v0)) {
    std::ostringstream os;
    os << "solve_for_v: target v = " << target_v << " must exceed the surface's v = " << v0;
    throw std::invalid_argument(os.str());
  }
  double lo = 0.0, hi = std::log(1e3);
  double v_lo = v0, v_hi = v_at(std::exp(hi));
  while (v_hi < target_v) {
    if (hi >= std::log(1e6) - 1e-12) {
      std::ostringstream os;
      os << "solve_for_v: no bracket up to lambda = 1e6 (v = " << v_hi << " < target " << target_v << ")";
      throw std::runtime_error(os.str());
    }
    lo = hi;
    v_lo = v_hi;
    hi = std::min(hi + std::log(10.0), std::log(1e6));
    v_hi = v_at(std::exp(hi));
  }
  VSolve r;
  double mid = hi, v_mid = v_hi;
  for (int it = 0; it < 200; ++it) {
    r.iterations = it + 1;
    mid = 0.5 * (lo + hi);
    v_mid = v_at(std::exp(mid));
    if (std::abs(v_mid - target_v) < tol) break;
    if (v_mid < target_v) {
      lo = mid;
      v_lo = v_mid;
    } else {
      hi = mid;
      v_hi = v_mid;
    }
  }
  if (!(std::abs(v_mid - target_v) < tol)) throw std::runtime_error("solve_for_v: bisection did not converge");
  // Final bracket straddling the target, with the returned lambda inside it.
  r.lambda_lo = std::exp(lo);
  r.lambda_hi = std::exp(hi);
  r.v_lo = v_lo;
  r.v_hi = v_hi;
  r.map = MobiusMap{p_minus, p_plus, std::exp(mid)};
  r.mesh = mobius_apply(r.map, mesh);
  r.achieved_v = v_mid;
  return r;
}

Mesh3 icosphere(int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  Mesh3 m;
  m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : m.vertices) v.normalize();
  m.faces = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
             {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      const int idx = static_cast<int>(m.vertices.size()) - 1;
      mid[key] = idx;
      return idx;
    };
    std::vector<Face> faces;
    faces.reserve(m.faces.size() * 4);
    for (const Face& f : m.faces) {
      const int a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
      faces.push_back({f[0], a, c});
      faces.push_back({f[1], b, a});
      faces.push_back({f[2], c, b});
      faces.push_back({a, b, c});
    }
    m.faces = std::move(faces);
  }
  return m;
}

double sphere_fit_residual(const std::vector<Vec3>& points) {
  // |x|^2 = 2 c.x + (r^2 - |c|^2): linear least squares in (c, k).
  Eigen::MatrixXd A(points.size(), 4);
  Eigen::VectorXd b(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    A.row(i) << 2 * points[i].x(), 2 * points[i].y(), 2 * points[i].z(), 1.0;
    b[i] = points[i].squaredNorm();
  }
  const Eigen::VectorXd s = A.colPivHouseholderQr().solve(b);
  const Vec3 c(s[0], s[1], s[2]);
  const double r = std::sqrt(s[3] + c.squaredNorm());
  double worst = 0.0;
  for (const Vec3& p : points) worst = std::max(worst, std::abs((p - c).norm() - r));
  return worst;
}

double circle_fit_residual(const std::vector<Vec3>& points) {
  // Plane by SVD, then a 2D circle fit in that plane.
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::MatrixXd M(points.size(), 3);
  for (std::size_t i = 0; i < points.size(); ++i) M.row(i) = (points[i] - mean).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinV);
  const Vec3 e1 = svd.matrixV().col(0), e2 = svd.matrixV().col(1), nrm = svd.matrixV().col(2);
  Eigen::MatrixXd A(points.size(), 3);
  Eigen::VectorXd b(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3 d = points[i] - mean;
    const double x = d.dot(e1), y = d.dot(e2);
    A.row(i) << 2 * x, 2 * y, 1.0;
    b[i] = x * x + y * y;
  }
  const Eigen::VectorXd s = A.colPivHouseholderQr().solve(b);
  const double r = std::sqrt(s[2] + s[0] * s[0] + s[1] * s[1]);
  double worst = 0.0;
  for (const Vec3& p : points) {
    const Vec3 d = p - mean;
    const double x = d.dot(e1) - s[0], y = d.dot(e2) - s[1];
    worst = std::max({worst, std::abs(std::hypot(x, y) - r), std::abs(d.dot(nrm))});
  }
  return worst;
}

}  // namespace canham
