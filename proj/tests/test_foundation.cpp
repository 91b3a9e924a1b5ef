#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "canham/foundation.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace canham;
using std::numbers::pi;

namespace {

// Reference values from tests/oracles/oracles.py (40-digit mpmath).
constexpr double kPsiHalf = 0.79139147267395506003;
constexpr double kPsiMinus03 = 0.34088773883081674802;

S2Point random_point(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return S2Point(n(rng), n(rng), n(rng));
}

}  // namespace

TEST_CASE("cutoff: plateau values and symmetry") {
  CHECK(psi(-3.0) == 0.0);
  CHECK(psi(-1.0) == 0.0);
  CHECK(psi(1.0) == 1.0);
  CHECK(psi(7.5) == 1.0);
  CHECK(psi(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  for (double t = -1.2; t <= 1.2; t += 0.01) CHECK(std::abs(psi(t) + psi(-t) - 1.0) < 1e-15);
}

TEST_CASE("cutoff: values against the high-precision oracle") {
  CHECK(std::abs(psi(0.5) - kPsiHalf) < 1e-15);
  CHECK(std::abs(psi(-0.3) - kPsiMinus03) < 1e-15);
}

TEST_CASE("cutoff: monotone on a fine grid") {
  double prev = psi(-1.0);
  for (int i = 1; i <= 10000; ++i) {
    const double t = -1.0 + 2.0 * i / 10000.0;
    const double v = psi(t);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("cutoff: derivatives match central differences") {
  const double h = 1e-5;
  for (double t : {-0.8, -0.3, 0.0, 0.2, 0.65, 0.9}) {
    const Derivs d = psi_derivs(t);
    CHECK(d[0] == psi(t));
    const double fd1 = (psi(t + h) - psi(t - h)) / (2 * h);
    const double fd2 = (psi_derivs(t + h)[1] - psi_derivs(t - h)[1]) / (2 * h);
    CHECK(std::abs(d[1] - fd1) < 1e-8 * std::max(1.0, std::abs(d[1])));
    CHECK(std::abs(d[2] - fd2) < 1e-7 * std::max(1.0, std::abs(d[2])));
  }
}

TEST_CASE("rescaled cutoff: endpoints, reversed interval and chain rule") {
  const CutoffSpec up(0.2, 0.5);
  CHECK(psi_cut(up, 0.2) == 0.0);
  CHECK(psi_cut(up, 0.5) == 1.0);
  CHECK(psi_cut(up, 0.35) == doctest::Approx(0.5).epsilon(1e-15));
  const CutoffSpec down(0.5, 0.2);
  for (double x = 0.15; x < 0.55; x += 0.013)
    CHECK(std::abs(psi_cut(up, x) + psi_cut(down, x) - 1.0) < 1e-15);
  const Derivs d = psi_cut_derivs(up, 0.3);
  const Derivs p = psi_derivs(up.affine(0.3));
  CHECK(d[1] == doctest::Approx(p[1] * up.slope()).epsilon(1e-14));
  CHECK(d[2] == doctest::Approx(p[2] * up.slope() * up.slope()).epsilon(1e-14));
  CHECK_THROWS_AS(CutoffSpec(0.3, 0.3), std::invalid_argument);
}

TEST_CASE("geodesic distance to the equatorial three-point set") {
  std::vector<S2Point> L3;
  for (int k = 1; k <= 3; ++k) L3.emplace_back(std::cos(2 * pi * k / 3), std::sin(2 * pi * k / 3), 0.0);
  const S2Point p(std::cos(pi / 3), std::sin(pi / 3), 0.0);
  CHECK(std::abs(distance_to_set(p, L3) - pi / 3) < 1e-15);
  CHECK(std::abs(geodesic_distance(S2Point(0, 0, 1), S2Point(1, 0, 0)) - pi / 2) < 1e-15);
  CHECK(std::abs(geodesic_distance(S2Point(1, 0, 0), S2Point(-1, 0, 0)) - pi) < 1e-15);
  // Small separations keep full relative accuracy.
  const double r = 1e-9;
  CHECK(std::abs(geodesic_distance(S2Point(1, 0, 0), S2Point(std::cos(r), std::sin(r), 0)) - r) < 1e-22);
  CHECK(nearest_index(S2Point(1, 0.01, 0), L3) == 2);
  CHECK_THROWS_AS(S2Point(0, 0, 0), std::invalid_argument);
}

TEST_CASE("distance jet: gradient is the unit radial direction, Laplacian cot d") {
  std::mt19937_64 rng(20240607);
  const S2Point c(0.3, -0.4, 0.8);
  for (int i = 0; i < 50; ++i) {
    const S2Point x = random_point(rng);
    const double d = geodesic_distance(c, x);
    if (d < 0.05 || d > pi - 0.05) continue;
    const Jet j = distance_jet(c, x);
    CHECK(std::abs(j.value - d) < 1e-14);
    CHECK(std::abs(j.grad.norm() - 1.0) < 1e-12);
    CHECK(std::abs(j.grad.dot(x.coords())) < 1e-14);
    CHECK(std::abs(j.laplacian() - std::cos(d) / std::sin(d)) < 1e-10 * (1 + 1 / std::sin(d)));
  }
  CHECK_THROWS_AS(distance_jet(c, c), std::domain_error);
}

TEST_CASE("jets: linear functions are eigenfunctions with eigenvalue -2") {
  std::mt19937_64 rng(7);
  const Vec3 a(0.2, 1.5, -0.7);
  for (int i = 0; i < 20; ++i) {
    const S2Point x = random_point(rng);
    const Jet j = linear_jet(a, x);
    CHECK(std::abs(j.laplacian() + 2 * j.value) < 1e-13);
    CHECK(std::abs(j.jacobi()) < 1e-13);
  }
}

TEST_CASE("jets: product and composition obey Leibniz and the chain rule") {
  const S2Point x(0.1, 0.7, -0.2);
  const Jet f = linear_jet(Vec3(1, 0, 0), x);
  const Jet g = linear_jet(Vec3(0, 0, 1), x);
  const Jet fg = product(f, g);
  // Laplacian(fg) = f Lap g + g Lap f + 2 grad f . grad g
  const double lap = f.value * g.laplacian() + g.value * f.laplacian() + 2 * f.grad.dot(g.grad);
  CHECK(std::abs(fg.laplacian() - lap) < 1e-14);
  const double u = f.value;
  const Jet e = compose({std::exp(u), std::exp(u), std::exp(u)}, f);
  CHECK(std::abs(e.laplacian() - std::exp(u) * (f.laplacian() + f.grad.squaredNorm())) < 1e-13);
  const Jet sum = f + 2.0 * g - g;
  CHECK(std::abs(sum.value - (f.value + g.value)) < 1e-15);
}

TEST_CASE("jets: Hessian is tangential and matches finite differences of the gradient") {
  const S2Point c(1, 0.2, 0.1);
  const ScalarField f = ScalarField::radial(c, [](double d) -> Derivs {
    return {std::sin(d) * std::sin(d), std::sin(2 * d), 2 * std::cos(2 * d)};
  });
  const S2Point x(0.2, 0.9, 0.4);
  const Jet j = f.jet(x);
  const Mat3 P = tangent_projector(x.coords());
  CHECK((P * j.hess * P - j.hess).norm() < 1e-13);
  const auto basis = tangent_basis(x.coords());
  const double h = 1e-5;
  for (const Vec3& e : basis) {
    const S2Point xp = exp_map(x, e, h), xm = exp_map(x, e, -h);
    const double fd = (f.value(xp) - 2 * f.value(x) + f.value(xm)) / (h * h);
    CHECK(std::abs(fd - e.dot(j.hess * e)) < 1e-5);
  }
}

TEST_CASE("blend: switched-off branch is never evaluated") {
  const S2Point c(0, 0, 1);
  const ScalarField rho = ScalarField::distance_to({c});
  bool singular_called = false;
  const ScalarField singular([&](const S2Point&) -> Jet {
    singular_called = true;
    throw std::domain_error("singular");
  });
  const ScalarField one = ScalarField::constant(1.0);
  // On d < 0.2 only f0 carries weight; f1 must not be touched there.
  const ScalarField b = blend(0.2, 0.4, rho, one, singular);
  CHECK(b.value(exp_map(c, Vec3(1, 0, 0), 0.1)) == 1.0);
  CHECK_FALSE(singular_called);
  const ScalarField c2 = blend(0.2, 0.4, rho, one, 2.0 * one);
  CHECK(c2.value(exp_map(c, Vec3(1, 0, 0), 0.3)) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(c2.value(exp_map(c, Vec3(1, 0, 0), 0.5)) == 2.0);
}

TEST_CASE("cross4: orthogonal with positive orientation") {
  const Vec4 a(1, 0.2, 0, 0.1), b(0, 1, 0.3, 0), c(0.1, 0, 1, 0.5);
  const Vec4 n = cross4(a, b, c);
  CHECK(std::abs(n.dot(a)) < 1e-15);
  CHECK(std::abs(n.dot(b)) < 1e-15);
  CHECK(std::abs(n.dot(c)) < 1e-15);
  Eigen::Matrix4d M;
  M << a, b, c, n;
  CHECK(M.determinant() == doctest::Approx(n.squaredNorm()).epsilon(1e-14));
}

TEST_CASE("compensated sum: cancellation-safe") {
  KahanSum s;
  s += 1.0;
  for (int i = 0; i < 1000; ++i) s += 1e-16;
  s += -1.0;
  // a plain sum would lose every 1e-16 against 1.0
  CHECK(std::abs(s.value() - 1e-13) < 1e-25);
  KahanSum a, b;
  a += 1e100;
  b += 1.0;
  b += -1e100;
  a.merge(b);
  CHECK(a.value() == 1.0);
  CHECK(a.abs_total() == doctest::Approx(2e100));
}
