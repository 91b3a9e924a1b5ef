#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "canham/graphs.hpp"
#include "canham/linops.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <random>

using namespace canham;
using std::numbers::pi;

namespace {

// 1/2 sum over both boundary circles of u du/d(eta) for u = 1e-3 G(d) on
// 0.5 < d < 1, from the closed form of G' (tests/oracles/oracles.py).
constexpr double kAnnulusBoundary = 3.7431864196698229878e-6;

// m = 1, tau = 1e-4: tau^2 * int_{A_1} (L Phi)(Laplacian Phi) divided by tau^2,
// frozen from the first validated run as a regression bound.
constexpr double kForcingConstantM1 = 3.4585e4;

std::vector<S2Point> sample_points(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<S2Point> out;
  while (static_cast<int>(out.size()) < n) out.emplace_back(g(rng), g(rng), g(rng));
  return out;
}

// Y_20 up to normalization: (3 z^2 - 1) / 2.
ScalarField y20(double eps) {
  return ScalarField([eps](const S2Point& x) {
    const Jet z = linear_jet(Vec3(0, 0, 1), x);
    return eps * (1.5 * product(z, z) - constant_jet(0.5));
  });
}

GluedProfile glued(int m, double tau) {
  auto base = std::make_shared<const LDSolution>(build_phi_closed_form(m));
  return build_glued_profile(build_profile(base, tau, 0.5));
}

const ExteriorEnergy& exterior(int m, double tau) {
  static std::map<std::pair<int, double>, ExteriorEnergy> cache;
  auto it = cache.find({m, tau});
  if (it == cache.end()) it = cache.emplace(std::make_pair(m, tau), exterior_willmore(glued(m, tau))).first;
  return it->second;
}

// Area density of E_u from the first fundamental form of the explicit
// embedding: dE(v) = (-sin u x + cos u e4) du(v) + cos u v for tangent v.
double embedding_density(const S2Point& x, const Jet& u) {
  const auto basis = tangent_basis(x.coords());
  const Vec4 radial(-std::sin(u.value) * x[0], -std::sin(u.value) * x[1], -std::sin(u.value) * x[2], std::cos(u.value));
  Vec4 d[2];
  for (int i = 0; i < 2; ++i) {
    const Vec3& e = basis[i];
    d[i] = radial * u.grad.dot(e) + std::cos(u.value) * Vec4(e[0], e[1], e[2], 0.0);
  }
  const double E = d[0].dot(d[0]), F = d[0].dot(d[1]), G = d[1].dot(d[1]);
  return std::sqrt(E * G - F * F);
}

}  // namespace

TEST_CASE("graph geometry: constant fields") {
  const S2Point x(0.3, 0.4, 0.5);
  const GraphPoint g0 = graph_point(x, constant_jet(0.0));
  CHECK(g0.density == 1.0);
  CHECK(std::abs(g0.H) < 1e-15);
  for (double c : {0.1, 0.3, 0.7}) {
    const GraphPoint g = graph_point(x, constant_jet(c));
    CHECK(g.density == doctest::Approx(std::cos(c) * std::cos(c)).epsilon(1e-15));
    CHECK(g.H == doctest::Approx(2 * std::tan(c)).epsilon(1e-13));
    CHECK(std::abs(g.position.norm() - 1.0) < 1e-14);
  }
  CHECK_THROWS_AS(graph_point(x, constant_jet(pi / 2)), std::domain_error);
}

TEST_CASE("graph geometry: density against the embedding's first fundamental form") {
  const ScalarField u = y20(0.4) + ScalarField::linear(Vec3(0.1, -0.2, 0.05));
  for (const S2Point& x : sample_points(41, 50)) {
    const Jet j = u.jet(x);
    const GraphPoint g = graph_point(x, j);
    CHECK(std::abs(g.density - embedding_density(x, j)) < 1e-12);
    CHECK(std::abs(g.density_minus_one - (g.density - 1.0)) < 1e-15);
  }
}

TEST_CASE("graph geometry: mean curvature linearizes to L u") {
  std::vector<double> err;
  for (double eps : {1e-2, 1e-3}) {
    const ScalarField u = y20(eps);
    double worst = 0.0;
    for (const S2Point& x : sample_points(43, 50)) worst = std::max(worst, std::abs(graph_point(x, u.jet(x)).H - u.jet(x).jacobi()));
    err.push_back(worst);
  }
  MESSAGE("max |H - Lu|: " << err[0] << ", " << err[1]);
  // quadratic in eps (or better): a tenfold smaller field gives >= 90x smaller error
  CHECK(err[0] / err[1] > 90.0);
}

TEST_CASE("exact energy: latitude spheres all have W = 4 pi") {
  for (double c : {0.0, 0.1, 0.3, 0.7}) {
    const RegionEnergy e = graph_willmore_exact({Region::sphere(), ScalarField::constant(c)});
    CHECK(std::abs(e.willmore - 4 * pi) < 1e-11);
    CHECK(std::abs(e.deficit) < 1e-11);
  }
}

TEST_CASE("exact energy: fourth-order agreement with the linearized energy") {
  std::vector<double> eps{1e-1, 3e-2, 1e-2}, res;
  for (double e : eps) {
    const GraphPatch patch{Region::sphere(), y20(e)};
    res.push_back(std::abs(graph_willmore_exact(patch).deficit - graph_willmore_linearized(patch).deficit));
  }
  const double slope = std::log(res[0] / res[2]) / std::log(eps[0] / eps[2]);
  MESSAGE("log-log slope " << slope);
  CHECK(slope == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("linearized energy: kernel fields and the annulus boundary terms") {
  CHECK(graph_willmore_linearized({Region::sphere(), ScalarField::constant(0.2)}).willmore == doctest::Approx(4 * pi).epsilon(1e-13));
  const S2Point p(0, 0, 1);
  const ScalarField cosd = ScalarField::radial(p, [](double d) -> Derivs { return {std::cos(d), -std::sin(d), -std::cos(d)}; });
  CHECK(std::abs(graph_willmore_linearized({Region::sphere(), cosd}).deficit) < 1e-12);

  const ScalarField g = ScalarField::radial(p, [](double d) -> Derivs {
    const Derivs h = GreenFunction::derivs(d);
    return {1e-3 * h[0], 1e-3 * h[1], 1e-3 * h[2]};
  });
  const LinearizedEnergy lin = graph_willmore_linearized({Region::annulus(p, 0.5, 1.0), g});
  CHECK(std::abs(lin.boundary - kAnnulusBoundary) < 1e-10 * 1e-3);
  CHECK(std::abs(lin.interior) < 1e-15);
}

TEST_CASE("glued profile: matched zones and positivity") {
  const double tau = 1e-4;
  const GluedProfile gl = glued(2, tau);
  const double ra = std::pow(tau, 0.5);
  const PolarFrame f(gl.points()[0].coords());
  const CatenoidProfile cat{tau};
  for (double th : {0.0, 0.8, 2.0}) {
    const S2Point q3 = f.point(3 * ra, th), q1 = f.point(1.05 * ra, th);
    CHECK(gl.value(q3) == gl.profile().value(q3));
    CHECK(std::abs(gl.value(q1) - cat.value(distance_to_set(q1, gl.points()))) < 1e-15);
  }
  for (const S2Point& x : sample_points(47, 500))
    if (distance_to_set(x, gl.points()) >= ra) CHECK(gl.value(x) > 0.0);
  for (int i = 0; i <= 50; ++i) CHECK(gl.value(f.point(ra * (1.0 + i / 50.0), 0.3)) > 0.0);
}

TEST_CASE("glued profile: annulus decomposition") {
  const double tau = 1e-4, ra = std::pow(tau, 0.5);
  const GluedProfile gl = glued(3, tau);
  const PolarFrame f(gl.points()[1].coords());
  const CutoffSpec cut(ra, 2 * ra);
  for (int i = 0; i <= 20; ++i) {
    const double d = ra * (1.0 + i / 20.0);
    const S2Point x = f.point(d, 0.37 * i);
    const double w = psi_cut(cut, d);
    const double expect = w * gl.outer_jet(x).value + (1 - w) * gl.inner_jet(x).value;
    CHECK(std::abs(gl.value(x) - gl.reference_jet(x).value - expect) < 1e-12 * tau);
  }
}

TEST_CASE("glued profile: derivatives converge at second order and are continuous across interfaces") {
  const double tau = 1e-4, ra = std::pow(tau, 0.5);
  const GluedProfile gl = glued(2, tau);
  const PolarFrame f(gl.points()[0].coords());
  for (double d : {1.2 * ra, 1.5 * ra, 1.8 * ra}) {
    const S2Point x = f.point(d, 0.4);
    const Jet j = gl.jet(x);
    const Vec3 e = f.radial(d, 0.4);
    double prev = 0.0;
    for (double h : {4e-2 * ra, 2e-2 * ra}) {
      const double fd = (gl.value(exp_map(x, e, h)) - gl.value(exp_map(x, e, -h))) / (2 * h);
      const double err = std::abs(fd - j.grad.dot(e));
      if (prev > 0.0) CHECK(err < 0.3 * prev);
      prev = err;
    }
  }
  for (double d : {ra, 2 * ra}) {
    const Jet a = gl.jet(f.point(d * (1 - 1e-12), 1.1)), b = gl.jet(f.point(d * (1 + 1e-12), 1.1));
    CHECK(std::abs(a.value - b.value) < 1e-13);
  }
}

TEST_CASE("exterior energy: negative deficit and diagnostics (m = 2, tau = 1e-4)") {
  const ExteriorEnergy& e = exterior(2, 1e-4);
  const auto& d = e.diagnostics;
  // The lemma bound holds for sufficiently small tau with no stated threshold;
  // at the operating tau it is reported, not gated.
  MESSAGE("deficit " << e.energy.deficit << ", lemma bound " << d.lemma_bound << ", ratio "
                     << e.energy.deficit / d.lemma_bound);
  MESSAGE("C2 constant " << d.c2_constant);
  CHECK(e.energy.deficit < 0.0);
  CHECK(e.energy.error < 1e-11);
  CHECK(d.c2_constant > 0.0);
}

TEST_CASE("exterior energy: annulus smallness constants are stable in tau") {
  auto base = std::make_shared<const LDSolution>(build_phi_closed_form(2));
  const ExteriorEnergy a = exterior_willmore(build_glued_profile(build_profile(base, 1e-3, 0.5, Admissibility::geometric)));
  const auto& d3 = a.diagnostics;
  const auto& d4 = exterior(2, 1e-4).diagnostics;
  MESSAGE("|Laplacian| / (tau |log tau|): tau=1e-3 " << d3.laplacian_constant << ", tau=1e-4 " << d4.laplacian_constant);
  MESSAGE("|L| / (tau |log tau|): tau=1e-3 " << d3.jacobi_constant << ", tau=1e-4 " << d4.jacobi_constant);
  CHECK(d3.laplacian_constant / d4.laplacian_constant < 2.0);
  CHECK(d4.laplacian_constant / d3.laplacian_constant < 2.0);
  CHECK(d3.jacobi_constant / d4.jacobi_constant < 2.0);
  CHECK(d4.jacobi_constant / d3.jacobi_constant < 2.0);
}

TEST_CASE("exterior energy: pairing bookkeeping constant is stable in tau") {
  auto base = std::make_shared<const LDSolution>(build_phi_closed_form(2));
  const ExteriorEnergy a = exterior_willmore(build_glued_profile(build_profile(base, 1e-3, 0.5, Admissibility::geometric)));
  const double C3 = a.diagnostics.pairing_error_constant;
  const double C4 = exterior(2, 1e-4).diagnostics.pairing_error_constant;
  MESSAGE("pairing error constants: tau=1e-3 " << C3 << ", tau=1e-4 " << C4);
  CHECK(C3 / C4 < 2.0);
  CHECK(C4 / C3 < 2.0);
}

TEST_CASE("exterior energy: m = 1 forcing region regression") {
  const double tau = 1e-4;
  const ExteriorEnergy& e = exterior(1, tau);
  const double C = e.diagnostics.forcing_region_term / (tau * tau);
  MESSAGE("forcing-region constant " << C);
  CHECK(C > 0.0);
  CHECK(C <= kForcingConstantM1 * 1.01);
}
