#pragma once

#include "canham/catenoid.hpp"
#include "canham/graphs.hpp"
#include "canham/ldsolutions.hpp"
#include "canham/mesh.hpp"
#include "canham/quadrature.hpp"

#include <memory>
#include <string>
#include <vector>

namespace canham {

// Which realization of Phi[m] the surface is built on.
enum class PhiSource {
  exact,     // closed forms (cutoff for m = 1, exact superposition for m >= 2)
  spectral,  // the spherical-harmonic solve at the given lmax
};

struct MeshResolution {
  int angular = 64;  // vertices per ring; multiple of 4
  int radial = 0;    // rings per graph lune; 0 = match the angular spacing in log(rho)
  int bridge = 0;    // s-intervals per bridge; 0 = match the angular spacing in s
};

struct SurfaceSpec {
  int m = 2;
  double tau = 1e-4;
  double alpha = 0.5;
  int lmax = 256;
  PhiSource phi = PhiSource::exact;
  Admissibility admissibility = Admissibility::strict;
  QuadratureSpec quadrature;
  MeshResolution mesh;
};

struct BuiltSurface {
  SurfaceSpec spec;
  std::shared_ptr<const LDSolution> ld;
  GluedProfile glued;
  std::vector<BridgeChart> bridges;
  // max over bridges of |phi_gl at d_L = tau^alpha - tau s_max|.
  double interface_mismatch = 0.0;

  int genus_target() const { return spec.m - 1; }
};

BuiltSurface build_surface(const SurfaceSpec& spec);
// Builds on a given LD solution (e.g. loaded from an artifact).
BuiltSurface build_surface(const SurfaceSpec& spec, std::shared_ptr<const LDSolution> ld);

// Vertex classes of the surface mesh.
enum class VertexRole { upper, lower, bridge };

// Where a vertex lies on the exact surface: a point of S^2 on the upper
// (sign +1) or lower (sign -1) sheet and/or bridge coordinates (s, vartheta).
// Ring vertices at d_L = tau^alpha carry both.
struct VertexParam {
  bool on_sheet = false;
  Vec3 x = Vec3::Zero();
  int sign = 0;
  bool on_bridge = false;
  int bridge = -1;
  double s = 0.0;
  double theta = 0.0;
};

struct MeshedSurface {
  SurfaceMesh mesh;
  std::vector<VertexRole> roles;
  std::vector<VertexParam> params;
};

MeshedSurface mesh_surface(const BuiltSurface& surface, const MeshResolution& resolution);
inline MeshedSurface mesh_surface(const BuiltSurface& surface) { return mesh_surface(surface, surface.spec.mesh); }

// Conforming refinement by edge bisection: every edge whose stereographic image
// is longer than max(h_min, kappa |Y(midpoint) - focus|) is split, with the new
// vertex placed on the exact surface. Resolves the neighbourhood of a Moebius
// blow-up point on all scales.
struct FocusRefinement {
  Vec3 focus = Vec3::Zero();  // in R^3 (stereographic image)
  double kappa = 0.15;
  double h_min = 2e-6;
  std::size_t max_vertices = 2'000'000;
};
void refine_near(const BuiltSurface& surface, MeshedSurface& meshed, const FocusRefinement& refinement);
// The default mesh refined about `focus` (an R^3 point of the stereographic image).
MeshedSurface mesh_refined_near(const BuiltSurface& surface, const Vec3& focus);

struct EnergyReport {
  int m = 0;
  double tau = 0.0;
  double alpha = 0.0;
  std::vector<RegionEnergy> bridges;  // one per point of L
  ExteriorEnergy graph;               // one sheet; the other is its mirror image
  double bridge_deficit = 0.0;        // per bridge (mean over bridges)
  double graph_deficit = 0.0;
  double willmore = 0.0;              // W(Sigma)
  double margin = 0.0;                // W(Sigma) - 8 pi = m bridge + 2 graph
  double error_bound = 0.0;           // quadrature doubling differences plus rounding scale
  double single_pass = 0.0;           // the same margin from one accumulator over all regions
  double single_pass_difference = 0.0;
  double reference_scale = 0.0;       // m pi tau^2 |log tau|
  double margin_ratio = 0.0;          // |margin| / reference_scale
  double bridge_lemma_bound = 0.0;    // (8 pi / 3) tau^2 |log tau|
  double bridge_max_H = 0.0;
  double bridge_H_constant = 0.0;     // max |H| / (tau |log tau|)
  double interface_mismatch = 0.0;
  std::string verdict;                // "W<8π: certified" or "inconclusive"
  bool certified() const { return verdict == "W<8π: certified"; }
};

EnergyReport total_energy(const BuiltSurface& surface);
inline EnergyReport total_energy(const SurfaceSpec& spec) { return total_energy(build_surface(spec)); }

// Default points for the Moebius family in R^3: p_minus is the mid-gap point
// above the north pole of S^2, p_plus the south pole of the upper sheet.
struct MobiusPoints {
  Vec3 p_minus;
  Vec3 p_plus;
};
MobiusPoints default_mobius_points(const BuiltSurface& surface);

}  // namespace canham
