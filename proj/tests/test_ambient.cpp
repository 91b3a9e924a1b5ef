#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "canham/ambient.hpp"
#include "canham/assembly.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace canham;
using std::numbers::pi;

namespace {

// v of the stereographic image of Sigma_{2, 1e-4} at the default mesh,
// pinned from the first validated run.
constexpr double kVSigma2 = 4.575e-6;

const MobiusMap kMap{Vec3(0.3, -0.2, 1.6), Vec3(-0.2, 0.1, -0.5), 2.0};

SurfaceSpec spec_for(int m, double tau) {
  SurfaceSpec s;
  s.m = m;
  s.tau = tau;
  if (tau > 5e-4) s.admissibility = Admissibility::geometric;
  return s;
}

Mesh3 translated(Mesh3 mesh, const Vec3& t) {
  for (Vec3& v : mesh.vertices) v += t;
  return mesh;
}

// Jacobian of the map by central differences.
Mat3 jacobian(const MobiusMap& map, const Vec3& x) {
  Mat3 J;
  const double h = 1e-6;
  for (int k = 0; k < 3; ++k) {
    const Vec3 e = Vec3::Unit(k) * h;
    J.col(k) = (map.apply(x + e) - map.apply(x - e)) / (2 * h);
  }
  return J;
}

}  // namespace

TEST_CASE("stereographic projection: fixed equator, south pole, pole guard") {
  CHECK((stereographic(Vec4(1, 0, 0, 0)) - Vec3(1, 0, 0)).norm() == 0.0);
  CHECK(stereographic(Vec4(0, 0, 0, -1)).norm() == 0.0);
  CHECK_THROWS_AS(stereographic(Vec4(0, 0, 0, 1)), std::domain_error);
  const double a = 0.3;
  CHECK((stereographic(Vec4(0, std::cos(a), 0, std::sin(a))) - Vec3(0, std::cos(a) / (1 - std::sin(a)), 0)).norm() < 1e-16);
}

TEST_CASE("stereographic projection: circles go to circles") {
  // circle of S^3 cut out by an affine 2-plane
  const Vec4 c = Vec4(0.2, -0.1, 0.3, 0.4);
  const double r = std::sqrt(1.0 - c.squaredNorm());
  Vec4 e1(1, 1, 0, 0), e2(0, 0, 1, 0);
  e1 -= e1.dot(c) / c.squaredNorm() * c;
  e1.normalize();
  e2 -= e2.dot(c) / c.squaredNorm() * c + e2.dot(e1) * e1;
  e2.normalize();
  std::vector<Vec3> pts;
  for (int i = 0; i < 64; ++i) {
    const double t = 2 * pi * i / 64;
    pts.push_back(stereographic(c + r * (std::cos(t) * e1 + std::sin(t) * e2)));
  }
  CHECK(circle_fit_residual(pts) < 1e-10);
}

TEST_CASE("mesh area and volume: icosphere") {
  const Mesh3 s = icosphere(5);
  CHECK(s.faces.size() == 20480);
  const AreaVolume av = mesh_area_volume(s);
  CHECK(av.area == doctest::Approx(4 * pi).epsilon(1e-3));
  CHECK(av.volume == doctest::Approx(4 * pi / 3).epsilon(1e-3));
  CHECK(isoperimetric_value(av.area, av.volume) == doctest::Approx(1.0).epsilon(3e-3));
  CHECK(isoperimetric_ratio(s).v == doctest::Approx(1.0).epsilon(3e-3));
  CHECK(isoperimetric_ratio(s).genus == 0);
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 5; ++i) {
    const Vec3 t(u(rng), u(rng), u(rng));
    CHECK(std::abs(mesh_area_volume(translated(s, t)).volume - av.volume) < 1e-12);
  }
  Mesh3 open = s;
  open.faces.pop_back();
  CHECK_THROWS_AS(mesh_area_volume(open), std::invalid_argument);
}

TEST_CASE("isoperimetric ratio of the comparison surfaces") {
  std::vector<double> v;
  for (double tau : {1e-3, 3e-4, 1e-4}) {
    const Mesh3 m = stereographic_project(mesh_surface(build_surface(spec_for(2, tau))).mesh);
    const IsoperimetricReport r = isoperimetric_ratio(m);
    CHECK(r.genus == 1);
    CHECK(r.v > 0.0);
    v.push_back(r.v);
  }
  MESSAGE("v ladder: " << v[0] << ", " << v[1] << ", " << v[2]);
  CHECK(v[0] > v[1]);
  CHECK(v[1] > v[2]);
  CHECK(v[2] < 0.05);
  CHECK(v[2] == doctest::Approx(kVSigma2).epsilon(0.01));
}

TEST_CASE("Moebius map: identity at lambda = 1, conformal, spheres to spheres") {
  MobiusMap id = kMap;
  id.lambda = 1.0;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int i = 0; i < 20; ++i) {
    const Vec3 x(n(rng), n(rng), n(rng));
    CHECK((id.apply(x) - x).norm() < 1e-12 * (1 + x.norm()));
    const Eigen::JacobiSVD<Mat3> svd(jacobian(kMap, x));
    const auto s = svd.singularValues();
    CHECK(std::abs(s[0] / s[2] - 1.0) < 1e-8);
    CHECK(jacobian(kMap, x).determinant() > 0.0);
  }
  const Mesh3 sphere = icosphere(5);
  for (double lambda : {0.5, 2.0}) {
    MobiusMap map = kMap;
    map.lambda = lambda;
    const Mesh3 image = mobius_apply(map, sphere);
    CHECK(sphere_fit_residual(image.vertices) < 1e-9);
    CHECK(isoperimetric_ratio(image).v == doctest::Approx(1.0).epsilon(3e-3));
    CHECK(mesh_area_volume(image).signed_volume > 0.0);
  }
  MobiusMap bad = kMap;
  bad.p_minus = sphere.vertices[7];
  CHECK_THROWS_AS(mobius_apply(bad, sphere), std::invalid_argument);
}

TEST_CASE("discrete Willmore energy is conformally invariant within diagnostic tolerance") {
  const Mesh3 sphere = icosphere(5);
  const double w0 = discrete_willmore(sphere);
  CHECK(w0 == doctest::Approx(4 * pi).epsilon(0.01));
  CHECK(discrete_willmore(mobius_apply(kMap, sphere)) == doctest::Approx(w0).epsilon(0.01));
  const BuiltSurface s = build_surface(spec_for(2, 1e-4));
  const double chart = total_energy(s).willmore;
  const double mesh = discrete_willmore(stereographic_project(mesh_surface(s).mesh));
  MESSAGE("discrete W " << mesh << " vs chart W " << chart);
  CHECK(mesh == doctest::Approx(chart).epsilon(0.02));
}

TEST_CASE("prescribed isoperimetric ratio on Sigma_{2, 1e-4}") {
  const BuiltSurface s = build_surface(spec_for(2, 1e-4));
  const MobiusPoints p = default_mobius_points(s);
  const Mesh3 mesh = stereographic_project(mesh_refined_near(s, p.p_plus).mesh);
  const double v0 = isoperimetric_ratio(mesh).v;
  CHECK_THROWS_AS(solve_for_v(mesh, v0, p.p_minus, p.p_plus), std::invalid_argument);
  CHECK_THROWS_AS(solve_for_v(mesh, 1.0, p.p_minus, p.p_plus), std::invalid_argument);

  const VSolve a = solve_for_v(mesh, 0.5, p.p_minus, p.p_plus);
  MESSAGE("lambda " << a.map.lambda << ", v " << a.achieved_v);
  CHECK(std::abs(a.achieved_v - 0.5) < 1e-3);
  CHECK((a.v_lo - 0.5) * (a.v_hi - 0.5) <= 0.0);
  CHECK(a.lambda_lo <= a.map.lambda);
  CHECK(a.map.lambda <= a.lambda_hi);
  const IsoperimetricReport r = isoperimetric_ratio(a.mesh);
  CHECK(r.genus == 1);
  CHECK(std::abs(r.v - a.achieved_v) < 1e-12);
  CHECK(mesh_area_volume(a.mesh).signed_volume > 0.0);

  const VSolve b = solve_for_v(mesh, 0.5, p.p_minus, p.p_plus);
  CHECK(b.map.lambda == a.map.lambda);
  CHECK(b.achieved_v == a.achieved_v);
}
