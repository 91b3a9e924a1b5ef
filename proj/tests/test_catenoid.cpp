#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "canham/catenoid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace canham;
using std::numbers::pi;

namespace {

// Bridge deficits W - 2|D(tau^alpha)| at alpha = 1/2 from the R^4 embedding
// integrated in 40-digit arithmetic (tests/oracles/oracles.py).
constexpr double kDeficitTau3 = 2.290472902591914e-5;
constexpr double kDeficitTau4 = 3.014744461023519e-7;

const S2Point kCenter(1.0, 0.0, 0.0);

}  // namespace

TEST_CASE("catenoid profile: waist, derivative and boundary trace") {
  const CatenoidProfile c{1e-4};
  CHECK(c.value(1e-4) == 0.0);
  for (double r : {2e-4, 5e-3, 1e-2}) {
    const double h = 1e-4 * r;
    CHECK(std::abs(c.d1(r) - (c.value(r + h) - c.value(r - h)) / (2 * h)) < 1e-6 * c.d1(r));
    CHECK(std::abs(c.d2(r) - (c.d1(r + h) - c.d1(r - h)) / (2 * h)) < 1e-6 * std::abs(c.d2(r)));
    CHECK(c.d1(r) > 0.0);
  }
  for (double tau : {1e-3, 1e-4, 1e-5}) {
    const BridgeChart chart(kCenter, tau, 0.5);
    CHECK(std::abs(CatenoidProfile{tau}.value(std::pow(tau, 0.5)) - chart.z(chart.s_max())) < 1e-13);
    CHECK(std::abs(chart.r(chart.s_max()) - std::pow(tau, 0.5)) < 1e-15);
    CHECK(chart.r(0.0) == tau);
  }
}

TEST_CASE("Christoffel symbols of the Fermi metric") {
  const double r = 0.7, z = 0.2;
  const ChristoffelTable g = fermi_christoffels(r, z);
  CHECK(g(0, 0, 2) == doctest::Approx(-std::tan(z)));
  CHECK(g(0, 2, 0) == doctest::Approx(-std::tan(z)));
  CHECK(g(1, 1, 2) == doctest::Approx(-std::tan(z)));
  CHECK(g(0, 1, 1) == doctest::Approx(-std::sin(r) * std::cos(r)));
  CHECK(g(1, 0, 1) == doctest::Approx(std::cos(r) / std::sin(r)));
  CHECK(g(2, 0, 0) == doctest::Approx(std::cos(z) * std::sin(z)));
  CHECK(g(2, 1, 1) == doctest::Approx(std::sin(r) * std::sin(r) * std::sin(z) * std::cos(z)));
  int nonzero = 0;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (g(k, i, j) != 0.0) ++nonzero;
        CHECK(g(k, i, j) == g(k, j, i));
      }
  CHECK(nonzero == 9);

  const ChristoffelTable flat = fermi_christoffels(r, 0.0);
  CHECK(flat(0, 0, 2) == 0.0);
  CHECK(flat(2, 0, 0) == 0.0);
  CHECK(flat(0, 1, 1) == doctest::Approx(-std::sin(r) * std::cos(r)));
  const ChristoffelTable eq = fermi_christoffels(pi / 2, 0.0);
  CHECK(std::abs(eq(0, 1, 1)) < 1e-16);
  CHECK(std::abs(eq(1, 0, 1)) < 1e-16);

  // odd entries in z flip sign, even ones are unchanged
  const ChristoffelTable m = fermi_christoffels(r, -z);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int z_count = (k == 2) + (i == 2) + (j == 2);
        CHECK(m(k, i, j) == (z_count % 2 ? -1.0 : 1.0) * g(k, i, j));
      }
  CHECK_THROWS_AS(fermi_christoffels(0.0, 0.1), std::domain_error);
  CHECK_THROWS_AS(fermi_christoffels(0.5, 2.0), std::domain_error);
}

TEST_CASE("bridge metric: waist, positivity and the Euclidean limit") {
  const BridgeChart c(kCenter, 1e-4, 0.5);
  const auto w = c.metric(0.0, 0.3);
  CHECK(w.g_ss == doctest::Approx(1e-8).epsilon(1e-15));
  CHECK(w.g_tt == doctest::Approx(std::sin(1e-4) * std::sin(1e-4)).epsilon(1e-15));
  CHECK(w.g_st == 0.0);
  for (int i = -100; i <= 100; ++i) {
    const auto g = c.metric(c.s_max() * i / 100.0, 0.0);
    CHECK(g.g_ss * g.g_tt - g.g_st * g.g_st > 0.0);
  }
  const BridgeChart tiny(kCenter, 1e-6, 0.5);
  for (double s : {0.0, 1.0, 3.0}) {
    const auto g = tiny.metric(s, 0.0);
    const double flat = 1e-12 * std::cosh(s) * std::cosh(s);
    CHECK(std::abs(g.g_ss / flat - 1.0) < 1e-8);
    CHECK(std::abs(g.g_tt / flat - 1.0) < 1e-8);
  }
}

TEST_CASE("bridge metric: agrees with differences of the embedding") {
  const BridgeChart c(S2Point(0.6, 0.8, 0.0), 1e-3, 0.5);
  for (double s : {-2.0, 0.5, 2.9}) {
    const double th = 0.4, h = 1e-6;
    const Vec4 xs = (c.position(s + h, th) - c.position(s - h, th)) / (2 * h);
    const Vec4 xt = (c.position(s, th + h) - c.position(s, th - h)) / (2 * h);
    const auto g = c.metric(s, th);
    CHECK(std::abs(xs.squaredNorm() / g.g_ss - 1.0) < 1e-7);
    CHECK(std::abs(xt.squaredNorm() / g.g_tt - 1.0) < 1e-7);
    CHECK(std::abs(xs.dot(xt)) < 1e-7 * std::sqrt(g.g_ss * g.g_tt));
    CHECK(std::abs(c.position(s, th).norm() - 1.0) < 1e-15);
  }
}

TEST_CASE("bridge mean curvature: minimal limit, parity and the R^4 cross-check") {
  const BridgeChart flat(kCenter, 1e-8, 0.5);
  const double r = flat.r(1.0);
  CHECK(std::abs(flat.second_fundamental_form(1.0, 0.0).H * r * r) < 1e-12);

  for (double tau : {1e-3, 1e-4}) {
    const BridgeChart c(kCenter, tau, 0.5);
    double worst = 0.0;
    for (int i = -40; i <= 40; ++i) {
      const double s = c.s_max() * i / 40.0;
      const auto A = c.second_fundamental_form(s, 0.3);
      CHECK(A.A_st == 0.0);
      CHECK(A.H == doctest::Approx(c.second_fundamental_form(-s, 0.3).H).epsilon(1e-12));
      const double emb = c.mean_curvature_embedded(s, 0.3);
      worst = std::max(worst, std::abs(A.H - emb) / std::max(std::abs(emb), 1e-300));
    }
    MESSAGE("tau " << tau << ": closed form vs embedding, max relative difference " << worst);
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("bridge mean curvature: estimates with measured constants") {
  const double tau = 1e-4;
  const BridgeChart c(kCenter, tau, 0.5);
  const double C = bridge_max_mean_curvature(c) / (tau * std::abs(std::log(tau)));
  MESSAGE("max |H| / (tau |log tau|) = " << C);
  CHECK(C <= 5.0);
  // r^2 H = O(tau z^2 + r^2 |z| + tau r^2)
  double worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double s = c.s_max() * i / 200.0;
    const double r = c.r(s), z = c.z(s);
    const double H = c.second_fundamental_form(s, 0.0).H;
    worst = std::max(worst, std::abs(r * r * H) / (tau * z * z + r * r * std::abs(z) + tau * r * r));
  }
  MESSAGE("r^2 H estimate constant " << worst);
  CHECK(worst < 10.0);
}

TEST_CASE("bridge energy: against the high-precision oracle") {
  const RegionEnergy e4 = bridge_willmore(BridgeChart(kCenter, 1e-4, 0.5));
  const RegionEnergy e3 = bridge_willmore(BridgeChart(kCenter, 1e-3, 0.5));
  MESSAGE("deficit(1e-4) - oracle = " << e4.deficit - kDeficitTau4);
  MESSAGE("deficit(1e-3) - oracle = " << e3.deficit - kDeficitTau3);
  CHECK(std::abs(e4.deficit - kDeficitTau4) < 1e-14);
  CHECK(std::abs(e3.deficit - kDeficitTau3) < 1e-12);
  CHECK(e4.error < 1e-12);
  CHECK(e4.willmore == doctest::Approx(e4.area + e4.h2 / 4).epsilon(1e-15));
  CHECK(std::abs(e4.deficit - (e4.willmore - 2 * disc_area(1e-2))) < 1e-12);
}

TEST_CASE("bridge energy: the lemma bound and the refined expansion") {
  const double tau = 1e-4;
  const RegionEnergy e = bridge_willmore(BridgeChart(kCenter, tau, 0.5));
  CHECK(e.deficit <= 8 * pi / 3 * tau * tau * std::abs(std::log(tau)));
  double C[2];
  int i = 0;
  for (double t : {1e-3, 1e-4}) {
    const RegionEnergy r = bridge_willmore(BridgeChart(kCenter, t, 0.5));
    const double scale = std::pow(t, 3.0) * std::log(t) * std::log(t);
    C[i++] = std::abs(r.deficit - bridge_deficit_expansion(t, 0.5)) / scale;
  }
  MESSAGE("expansion error constants " << C[0] << ", " << C[1]);
  CHECK(C[0] / C[1] < 2.0);
  CHECK(C[1] / C[0] < 2.0);
}

TEST_CASE("bridge energy: rotational symmetry and node doubling") {
  const BridgeChart c(S2Point(-0.5, std::sqrt(3.0) / 2, 0.0), 1e-4, 0.5);
  const auto strips = bridge_strip_deficits(c);
  REQUIRE(strips.size() > 1);
  for (double s : strips) CHECK(std::abs(s - strips[0]) < 1e-14 * std::max(1.0, std::abs(strips[0])) + 1e-20);
  QuadratureSpec fine;
  fine.bridge_s_nodes *= 2;
  const double a = bridge_willmore(c).deficit, b = bridge_willmore(c, fine).deficit;
  CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("disc area") {
  CHECK(disc_area(pi) == doctest::Approx(4 * pi).epsilon(1e-15));
  CHECK(disc_area(pi / 2) == doctest::Approx(2 * pi).epsilon(1e-15));
  // pi r^2 (1 - r^2 / 12) up to O(r^6)
  CHECK(std::abs(disc_area(1e-4) - pi * 1e-8 * (1 - 1e-8 / 12)) < 1e-23);
}
