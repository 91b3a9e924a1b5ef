#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "canham/ldsolutions.hpp"
#include "canham/reports.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <fstream>
#include <memory>
#include <numbers>
#include <random>

using namespace canham;
using std::numbers::pi;

namespace {

// From tests/oracles/oracles.py: the decomposition constant of the three-point
// configuration by high-precision evaluation of the superposition near p, and
// c1 for (tau, m) = (1e-4, 2).
constexpr double kC0Three = 0.9506938556659451543;
constexpr double kC1Tau4M2 = 0.00095966347330960733549;

// Shared spectral solutions (expensive; built once per process).
const LDSolution& solved(int m, int lmax) {
  static std::map<std::pair<int, int>, std::unique_ptr<LDSolution>> cache;
  auto& slot = cache[{m, lmax}];
  if (!slot) slot = std::make_unique<LDSolution>(build_phi(m, lmax));
  return *slot;
}

std::vector<S2Point> sample_points(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<S2Point> out;
  while (static_cast<int>(out.size()) < n) out.emplace_back(g(rng), g(rng), g(rng));
  return out;
}

S2Point rotate_z(const S2Point& x, double angle) {
  const Vec3& v = x.coords();
  return S2Point(std::cos(angle) * v.x() - std::sin(angle) * v.y(), std::sin(angle) * v.x() + std::cos(angle) * v.y(),
                 v.z());
}

}  // namespace

TEST_CASE("configuration: equatorial points and delta") {
  const Configuration c = Configuration::equatorial(3);
  REQUIRE(c.points.size() == 3);
  CHECK(c.delta == 1.0 / 30.0);
  CHECK(std::abs(c.points[2][0] - 1.0) < 1e-15);
  for (const auto& p : c.points) CHECK(p[2] == 0.0);
  CHECK(c.min_pairwise_distance() == doctest::Approx(2 * pi / 3).epsilon(1e-14));
}

TEST_CASE("m = 2: spectral solve agrees with the closed form") {
  const LDSolution& s = solved(2, 256);
  const LDSolution exact = build_phi_closed_form(2);
  CHECK(s.mode() == PhiMode::solved);
  CHECK(exact.mode() == PhiMode::closed_form_m2);
  double worst = 0.0;
  for (const S2Point& x : sample_points(11, 400)) {
    if (distance_to_set(x, s.config().points) <= 0.05) continue;
    worst = std::max(worst, std::abs(s.value(x) - exact.value(x)));
  }
  MESSAGE("max |solved - closed form| = " << worst);
  CHECK(worst < 1e-6);
}

TEST_CASE("m = 1: the cutoff solution vanishes far from L and has c0 = 0") {
  const LDSolution s = build_phi(1);
  CHECK(s.mode() == PhiMode::cutoff_m1);
  const double far = pi / 2 - (pi / 2 - pi / 3) / 3;
  for (const S2Point& x : sample_points(5, 300))
    if (distance_to_set(x, s.config().points) >= far) CHECK(s.value(x) == 0.0);
  CHECK(std::abs(compute_c0(s)) < 1e-12);
}

TEST_CASE("m = 3: spectral solution is invariant under the symmetry group") {
  const LDSolution& s = solved(3, 256);
  double worst = 0.0;
  for (const S2Point& x : sample_points(17, 200)) {
    if (distance_to_set(x, s.config().points) <= 0.05) continue;
    const double v = s.value(x);
    worst = std::max(worst, std::abs(v - s.value(rotate_z(x, 2 * pi / 3))));
    worst = std::max(worst, std::abs(v - s.value(S2Point(x[0], x[1], -x[2]))));
  }
  MESSAGE("max asymmetry = " << worst);
  CHECK(worst < 1e-10);
}

TEST_CASE("m = 3: Jacobi operator annihilates the closed form away from L") {
  const LDSolution s = build_phi_closed_form(3);
  double worst = 0.0;
  for (const S2Point& x : sample_points(23, 200)) {
    if (distance_to_set(x, s.config().points) <= 0.05) continue;
    worst = std::max(worst, std::abs(s.jet(x).jacobi()));
  }
  MESSAGE("max |L Phi| = " << worst);
  CHECK(worst < 1e-8);
}

TEST_CASE("m = 3: Jacobi operator annihilates the spectral solution away from L") {
  const LDSolution& s = solved(3, 256);
  double worst = 0.0;
  for (const S2Point& x : sample_points(23, 200)) {
    if (distance_to_set(x, s.config().points) <= 0.05 || std::abs(std::abs(x[2]) - 1.0) < 1e-3) continue;
    worst = std::max(worst, std::abs(s.jet(x).jacobi()));
  }
  MESSAGE("max |L Phi| = " << worst);
  CHECK(worst < 1e-8);
}

TEST_CASE("decomposition constant: closed forms and the three-point oracle") {
  CHECK(std::abs(c0_closed_form(2) - (1 - std::log(2.0))) < 1e-15);
  CHECK(std::abs(c0_closed_form(3) - kC0Three) < 1e-15);
  CHECK(std::abs(compute_c0(build_phi_closed_form(2)) - (1 - std::log(2.0))) < 1e-10);
  CHECK(std::abs(compute_c0(build_phi_closed_form(3)) - kC0Three) < 1e-10);
}

TEST_CASE("decomposition constant: dual-method agreement for three points") {
  // spectral solve at two resolutions against the superposition oracle
  for (int lmax : {256, 384}) {
    const double c = compute_c0(solved(3, lmax));
    MESSAGE("lmax " << lmax << ": c0 - oracle = " << c - kC0Three);
    if (lmax == 384) CHECK(std::abs(c - kC0Three) < 1e-8);
    else CHECK(std::abs(c - kC0Three) < 1e-7);
  }
}

TEST_CASE("decomposition constant does not depend on the chosen point of L") {
  for (int m : {3, 4}) {
    const LDSolution s = build_phi_closed_form(m);
    double lo = 1e300, hi = -1e300;
    for (std::size_t k = 0; k < s.config().points.size(); ++k) {
      const double c = compute_c0(s, k);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    CHECK(hi - lo < 1e-9);
  }
}

TEST_CASE("uniqueness: two extraction radii give the same solution") {
  SolveOptions a, b;
  a.rho_ext = 0.9 * pi;
  b.rho_ext = 0.75 * pi;
  const Configuration c = Configuration::equatorial(3);
  // The cutoff forcing is not band-limited; two radii agree to ~2e-8 at
  // lmax 384 and ~1e-9 at 512.
  const LDSolution sa = build_phi_solved(c, 512, a);
  const LDSolution sb = build_phi_solved(c, 512, b);
  double worst = 0.0;
  for (const S2Point& x : sample_points(29, 200)) {
    if (distance_to_set(x, c.points) <= 0.05) continue;
    worst = std::max(worst, std::abs(sa.value(x) - sb.value(x)));
  }
  MESSAGE("max |Phi(0.9 pi) - Phi(0.75 pi)| = " << worst);
  CHECK(worst < 1e-8);
}

TEST_CASE("remainder: vanishes identically for m = 2 and decays quadratically for m = 3") {
  const LDSolution two = build_phi_closed_form(2);
  const PolarFrame f2(two.config().points[0].coords());
  for (double r : {1e-2, 1e-3, 2e-2})
    for (double th : {0.0, 1.0, 2.5}) CHECK(std::abs(phi_prime_eval(two, f2.point(r, th)).value) < 1e-8);

  const LDSolution three = build_phi_closed_form(3);
  const PolarFrame f(three.config().points[0].coords());
  const double delta = three.config().delta;
  std::vector<double> c_val, c_grad;
  for (double r : {delta / 2, delta / 4, delta / 8}) {
    double v = 0.0, g = 0.0;
    for (int i = 0; i < 16; ++i) {
      const Jet j = phi_prime_eval(three, f.point(r, 2 * pi * i / 16));
      v = std::max(v, std::abs(j.value));
      g = std::max(g, j.grad.norm());
    }
    c_val.push_back(v / (r * r));
    c_grad.push_back(g / r);
  }
  for (std::size_t i = 1; i < c_val.size(); ++i) {
    CHECK(c_val[i] == doctest::Approx(c_val[0]).epsilon(0.1));
    CHECK(c_grad[i] == doctest::Approx(c_grad[0]).epsilon(0.1));
  }
  MESSAGE("|Phi'| <= " << c_val[0] << " d^2, |grad Phi'| <= " << c_grad[0] << " d");
  CHECK_THROWS_AS(phi_prime_eval(three, S2Point(0, 0, 1)), std::domain_error);
}

TEST_CASE("boundedness of Phi - log d_L on shrinking circles") {
  const LDSolution s = build_phi_closed_form(3);
  const PolarFrame f(s.config().points[1].coords());
  std::vector<double> sup;
  for (double r : {1e-2, 1e-3, 1e-4}) {
    double worst = 0.0;
    for (int i = 0; i < 16; ++i)
      worst = std::max(worst, std::abs(s.value(f.point(r, 2 * pi * i / 16)) - std::log(r)));
    sup.push_back(worst);
  }
  for (double v : sup) CHECK(v == doctest::Approx(sup[0]).epsilon(0.1));
}

TEST_CASE("profile: c1 and the affine relation to Phi") {
  auto base = std::make_shared<const LDSolution>(build_phi_closed_form(2));
  const Profile p = build_profile(base, 1e-4, 0.5);
  CHECK(std::abs(p.c1() - kC1Tau4M2) < 1e-18);
  for (const S2Point& x : sample_points(31, 20)) {
    if (distance_to_set(x, base->config().points) < 1e-3) continue;
    CHECK(std::abs((p.value(x) - p.c1()) - 1e-4 * base->value(x)) < 1e-18);
    CHECK(std::abs(p.jet(x).value - p.value(x)) < 1e-17);
  }
}

TEST_CASE("admissibility: named violations") {
  CHECK(admissibility_violations(3, 1e-4, 0.5, Admissibility::strict).empty());
  const auto v = admissibility_violations(3, 1e-2, 0.5, Admissibility::strict);
  REQUIRE_FALSE(v.empty());
  CHECK(v[0].find("2τ^α ≥ 1/(10m)") != std::string::npos);
  auto base = std::make_shared<const LDSolution>(build_phi_closed_form(3));
  CHECK_THROWS_AS(build_profile(base, 1e-2, 0.5), AdmissibilityError);
  CHECK_NOTHROW(build_profile(base, 1e-4, 0.5));
  // the geometric mode keeps disjointness and the scale separation only
  CHECK(admissibility_violations(2, 1e-3, 0.5, Admissibility::geometric).empty());
  CHECK_FALSE(admissibility_violations(2, 1e-3, 0.5, Admissibility::strict).empty());
  CHECK_FALSE(admissibility_violations(2, 0.5, 0.9, Admissibility::geometric).empty());
}

TEST_CASE("artifact: round trip and checksum") {
  const LDSolution& s = solved(2, 256);
  const Json a = ld_artifact(s);
  CHECK(a["schema_version"] == kSchemaVersion);
  const LDSolution back = ld_from_artifact(a);
  CHECK(back.c0() == s.c0());
  CHECK(back.mode() == s.mode());
  CHECK(back.smooth_part().coefficients() == s.smooth_part().coefficients());
  const S2Point x(0.2, 0.5, 0.6);
  CHECK(back.value(x) == s.value(x));

  Json bad = a;
  bad["payload"]["c0"] = s.c0() + 1e-12;
  CHECK_THROWS_WITH_AS(ld_from_artifact(bad), doctest::Contains("checksum mismatch"), ArtifactError);
  Json malformed = a;
  malformed["payload"].erase("m");
  CHECK_THROWS_AS(ld_from_artifact(malformed), ArtifactError);

  const auto path = std::filesystem::temp_directory_path() / "canham_test_ld.json";
  save_ld_artifact(s, path);
  CHECK(load_ld_artifact(path).c0() == s.c0());
  std::filesystem::remove(path);
}
