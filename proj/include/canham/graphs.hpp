#pragma once

#include "canham/catenoid.hpp"
#include "canham/foundation.hpp"
#include "canham/ldsolutions.hpp"
#include "canham/quadrature.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace canham {

// Geometry of the normal graph E_u(x) = cos u(x) x + sin u(x) e4 at one point.
struct GraphPoint {
  Vec4 position;
  double density = 1.0;            // area density relative to the S^2 measure
  double density_minus_one = 0.0;  // density - 1 without cancellation
  double H = 0.0;                  // mean curvature, normal oriented towards +e4
};

// Evaluates the graph geometry from the jet of u at x. Throws std::domain_error
// for |u| >= pi/2 or a degenerate metric.
GraphPoint graph_point(const S2Point& x, const Jet& u);

// Deficit integrand (1 + H^2/4) density - 1, cancellation-free.
double graph_deficit_density(const GraphPoint& g);

struct GraphPatch {
  Region region;
  ScalarField u;

  Vec4 embed(const S2Point& x) const { return graph_point(x, u.jet(x)).position; }
  double area_form(const S2Point& x) const { return graph_point(x, u.jet(x)).density; }
  double mean_curvature(const S2Point& x) const { return graph_point(x, u.jet(x)).H; }
};

// W = area + (1/4) int H^2 over the patch; deficit = W - |Omega|.
RegionEnergy graph_willmore_exact(const GraphPatch& patch, const QuadratureSpec& spec = {});

struct LinearizedEnergy {
  double willmore = 0.0;  // |Omega| + interior + boundary
  double deficit = 0.0;   // interior + boundary
  double interior = 0.0;  // (1/4) int (Laplacian u)(L u)
  double boundary = 0.0;  // (1/2) sum over boundary circles of the integral of u du/d eta
};

LinearizedEnergy graph_willmore_linearized(const GraphPatch& patch, const QuadratureSpec& spec = {});

// Integral over a boundary circle of f(x, outward conormal) ds, by the periodic
// trapezoid rule with spec.boundary_nodes nodes.
double boundary_integral(const BoundaryCircle& circle, int nodes,
                         const std::function<double(const S2Point&, const Vec3&)>& f);

// phi_gl: phi away from L, the catenoid profile near L, blended over
// tau^alpha <= d_L <= 2 tau^alpha.
class GluedProfile {
 public:
  explicit GluedProfile(Profile profile);

  const Profile& profile() const { return profile_; }
  double tau() const { return profile_.tau(); }
  double alpha() const { return profile_.alpha(); }
  double inner_radius() const { return r_in_; }  // tau^alpha
  double outer_radius() const { return 2.0 * r_in_; }
  const std::vector<S2Point>& points() const { return profile_.base().config().points; }

  Jet jet(const S2Point& x) const;
  double value(const S2Point& x) const { return jet(x).value; }
  ScalarField field() const;
  // Graph of -phi_gl (the lower sheet).
  ScalarField lower_field() const;

  // Pieces of the annulus decomposition, valid on d_L < delta:
  // reference = tau G(d_L) - tau log(tau/2) cos d_L,
  // inner = phi_cat(d_L) - reference, outer = c1 (1 - cos d_L) + tau Phi'.
  Jet reference_jet(const S2Point& x) const;
  Jet inner_jet(const S2Point& x) const;
  Jet outer_jet(const S2Point& x) const;

  // Graph domain S^2 minus D_L(tau^alpha), with panels aligned to every
  // interface of phi_gl.
  Region domain() const;

 private:
  Profile profile_;
  double r_in_;
  CatenoidProfile cat_;
};

GluedProfile build_glued_profile(const Profile& profile);

struct ExteriorDiagnostics {
  double max_laplacian_annulus = 0.0;  // max |Laplacian phi_gl| on A_L
  double max_jacobi_annulus = 0.0;     // max |L phi_gl| on A_L
  double laplacian_constant = 0.0;     // the above over tau |log tau|
  double jacobi_constant = 0.0;
  double c2_norm = 0.0;                // max(|u|, |grad u|, |Hess u|) on Omega
  double c2_constant = 0.0;            // c2_norm / tau^(1 - 2 alpha)
  double energy_pairing = 0.0;         // int_Omega (Laplacian phi_gl)(L phi_gl)
  double flux_term = 0.0;              // 2 c1 tau * flux of Phi out of Omega \ A_L
  double pairing_error_constant = 0.0; // |pairing - flux| / (tau^(2+2 alpha) log^2 tau)
  double forcing_region_term = 0.0;    // m = 1: tau^2 int_{A_1} (L Phi)(Laplacian Phi)
  double lemma_bound = 0.0;            // -(11 m pi / 6) tau^2 |log tau|
};

struct ExteriorEnergy {
  RegionEnergy energy;
  ExteriorDiagnostics diagnostics;
};

ExteriorEnergy exterior_willmore(const GluedProfile& glued, const QuadratureSpec& spec = {},
                                 bool with_diagnostics = true);

}  // namespace canham
