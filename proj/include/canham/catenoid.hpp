#pragma once

#include "canham/foundation.hpp"
#include "canham/quadrature.hpp"

#include <array>
#include <vector>

namespace canham {

// phi_cat(r) = tau acosh(r / tau), the upper half of a catenoid of waist tau
// written as a radial graph.
struct CatenoidProfile {
  double tau;
  double value(double r) const;
  double d1(double r) const;
  double d2(double r) const;
  Derivs derivs(double r) const { return {value(r), d1(r), d2(r)}; }
};

// Christoffel symbols of the Fermi metric cos^2 z (dr^2 + sin^2 r dtheta^2) + dz^2.
// Index 0 = r, 1 = theta, 2 = z; gamma[k][i][j] = Gamma^k_{ij}.
struct ChristoffelTable {
  std::array<std::array<std::array<double, 3>, 3>, 3> gamma{};
  double operator()(int k, int i, int j) const { return gamma[k][i][j]; }
};

ChristoffelTable fermi_christoffels(double r, double z);

// Point of S^3 with Fermi coordinates (r, theta, z) about frame.p:
// cos z (cos r p + sin r (cos theta ea + sin theta eb)) + sin z e4.
Vec4 fermi_point(const PolarFrame& frame, double r, double theta, double z);

// The bridge K_{p,tau}: (r, theta, z) = (tau cosh s, vartheta, tau s), |s| <= s_max,
// with tau cosh s_max = tau^alpha.
class BridgeChart {
 public:
  BridgeChart(const S2Point& center, double tau, double alpha);

  const S2Point& center() const { return center_; }
  const PolarFrame& frame() const { return frame_; }
  double tau() const { return tau_; }
  double alpha() const { return alpha_; }
  double s_max() const { return s_max_; }
  double r(double s) const;
  double z(double s) const { return tau_ * s; }

  Vec4 position(double s, double vartheta) const;

  struct Metric {
    double g_ss, g_tt, g_st;
  };
  Metric metric(double s, double vartheta) const;

  struct SecondForm {
    double A_ss, A_tt, A_st, H;
  };
  // Closed-form second fundamental form in the Fermi chart; H assembled in a
  // rearranged form free of the 1/tau cancellation between its two terms.
  SecondForm second_fundamental_form(double s, double vartheta) const;

  // Mean curvature from the R^4 embedding: second derivatives of the position
  // contracted with the unit normal tangent to S^3 (same orientation: the
  // normal points towards the axis of the neck).
  double mean_curvature_embedded(double s, double vartheta) const;

 private:
  S2Point center_;
  PolarFrame frame_;
  double tau_;
  double alpha_;
  double s_max_;
};

struct RegionEnergy {
  double area = 0.0;
  double h2 = 0.0;        // integral of H^2
  double willmore = 0.0;  // area + h2 / 4
  double reference = 0.0; // reference area the deficit is measured against
  double deficit = 0.0;   // willmore - reference, accumulated cancellation-free
  double error = 0.0;     // |change under node doubling|
  double rounding = 0.0;  // rounding scale of the deficit accumulator
  std::size_t nodes = 0;
};

// Willmore energy of the bridge; deficit = W - 2 |D_p(tau^alpha)|.
RegionEnergy bridge_willmore(const BridgeChart& chart, const QuadratureSpec& spec = {});
// Deficit contribution of each uniform vartheta strip.
std::vector<double> bridge_strip_deficits(const BridgeChart& chart, const QuadratureSpec& spec = {});
// Visits every (s, vartheta) node of the bridge with its weighted deficit integrand.
void visit_bridge_deficit(const BridgeChart& chart, const QuadratureSpec& spec,
                          const std::function<void(double)>& visitor);

// 2 pi tau^2 log(2 tau^{alpha-1}) - pi tau^2.
double bridge_deficit_expansion(double tau, double alpha);
// max |H| over a sample grid of the chart.
double bridge_max_mean_curvature(const BridgeChart& chart, int samples = 400);

// |D_p(r)| = 4 pi sin^2(r/2).
double disc_area(double r);

}  // namespace canham
