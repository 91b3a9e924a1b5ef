#pragma once

#include "canham/foundation.hpp"

#include <array>
#include <functional>
#include <utility>
#include <vector>

namespace canham {

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

// Cached n-point Gauss-Legendre rule.
const GaussRule& gauss_legendre(int n);

struct Node {
  double x;
  double w;
};
// Appends the n-point rule mapped to [a, b].
void append_gauss(double a, double b, int n, std::vector<Node>& out);

struct QuadratureSpec {
  int radial_nodes = 20;          // Gauss nodes per radial panel
  int angular_nodes = 24;         // Gauss nodes per angular panel; 4x this for periodic trapezoid
  int transition_subpanels = 8;   // subdivisions of cutoff-transition intervals
  double log_panel_width = 0.5;   // max log(r1/r0) of an outer radial panel
  int bridge_s_nodes = 64;        // Gauss nodes in s on each half of a bridge
  int bridge_theta_nodes = 32;    // uniform nodes in the bridge angle
  int boundary_nodes = 64;        // nodes on each boundary circle
  bool estimate_error = true;     // repeat at doubled resolution and report the difference
  double nonconvergence_tol = 1e-9;  // doubling may not change a deficit by more than this

  QuadratureSpec doubled() const;
};

// Orthonormal frame (p, ea, eb) used for geodesic polar coordinates about p:
// q(rho, theta) = cos(rho) p + sin(rho) (cos(theta) ea + sin(theta) eb).
// For equatorial p, eb = e3 and ea = e3 x p.
struct PolarFrame {
  Vec3 p, ea, eb;
  explicit PolarFrame(const Vec3& center);
  Vec3 direction(double theta) const { return std::cos(theta) * ea + std::sin(theta) * eb; }
  S2Point point(double rho, double theta) const {
    return S2Point(std::cos(rho) * p + std::sin(rho) * direction(theta));
  }
  // Unit radial direction d/d rho at (rho, theta).
  Vec3 radial(double rho, double theta) const {
    return -std::sin(rho) * p + std::cos(rho) * direction(theta);
  }
};

// A region of S^2 described in geodesic polar coordinates about frame.p:
// rho_min <= rho <= rho_max(theta).
struct PolarCell {
  explicit PolarCell(const PolarFrame& f) : frame(f) {}
  PolarFrame frame;
  double rho_min = 0.0;
  std::function<double(double)> rho_max;
  // Gauss panels in theta; empty means periodic trapezoid on [0, 2 pi).
  std::vector<std::pair<double, double>> theta_panels;
  // Radial panel breaks (used when inside (rho_min, rho_max(theta))).
  std::vector<double> radial_breaks;
  // Radial intervals (between consecutive breaks) that are subdivided.
  std::vector<std::pair<double, double>> subdivided;
  // Outer panels longer than log_panel_width in log(rho) are split geometrically.
  bool log_outer = false;
};

// Boundary circle {d(center, x) = radius}; orientation +1 when the region lies
// inside the circle (outward conormal = +d/d rho), -1 when it lies outside.
struct BoundaryCircle {
  PolarFrame frame;
  double radius;
  int orientation;
};

struct Region {
  std::vector<PolarCell> cells;
  std::vector<BoundaryCircle> boundary;
  double area = 0.0;  // exact area

  static Region sphere();
  static Region annulus(const S2Point& center, double r0, double r1);
  // S^2 minus geodesic discs of radius `hole` about the points of an
  // equatorial configuration, split into one lune per point. `breaks` are
  // extra radial breaks (distances from the nearest point), `subdivided`
  // radial intervals to subdivide.
  static Region punctured(const std::vector<S2Point>& points, double hole, std::vector<double> breaks,
                          std::vector<std::pair<double, double>> subdivided);
};

constexpr int kSampleSize = 4;
using Sample = std::array<double, kSampleSize>;
using Integrand = std::function<Sample(const S2Point&)>;

struct IntegralResult {
  Sample value{};
  Sample abs_total{};  // sum of |weighted contributions| (rounding scale)
  std::size_t nodes = 0;
};

// Integrates the integrand against the area measure of the region.
IntegralResult integrate(const Region& region, const QuadratureSpec& spec, const Integrand& f);
// Integrates over the cells with a visitor receiving every node and weight
// (single-threaded, deterministic order); used by bookkeeping checks.
void visit_nodes(const Region& region, const QuadratureSpec& spec,
                 const std::function<void(const S2Point&, double)>& visitor);

}  // namespace canham
