#pragma once

#include "canham/foundation.hpp"
#include "canham/mesh.hpp"

#include <optional>
#include <string>
#include <vector>

namespace canham {

// Stereographic projection from (0,0,0,1): Y(x) = (x1, x2, x3) / (1 - x4).
// Throws std::domain_error when 1 - x4 < 1e-6.
Vec3 stereographic(const Vec4& x);
Mesh3 stereographic_project(const SurfaceMesh& mesh);

struct AreaVolume {
  double area = 0.0;
  double volume = 0.0;  // unsigned enclosed volume
  double signed_volume = 0.0;
};

// Requires a watertight mesh.
AreaVolume mesh_area_volume(const Mesh3& mesh);

// 36 pi V^2 / A^3.
double isoperimetric_value(double area, double volume);

struct IsoperimetricReport {
  double area = 0.0;
  double volume = 0.0;
  double v = 0.0;
  int genus = 0;
  std::optional<double> willmore;  // discrete estimate, only when requested
};

IsoperimetricReport isoperimetric_ratio(const Mesh3& mesh, bool with_willmore = false);

// Discrete Willmore energy (1/4) sum H_v^2 A_v, with H_v from a least-squares
// quadric fitted over the two-ring of each vertex and A_v one third of the
// incident face areas.
double discrete_willmore(const Mesh3& mesh);

// F_lambda(x) = I(c + lambda (I(x) - c)), I(x) = p_minus + (x - p_minus)/|x - p_minus|^2,
// c = I(p_plus): dilation by lambda about c conjugated by the inversion about p_minus.
struct MobiusMap {
  Vec3 p_minus = Vec3::Zero();
  Vec3 p_plus = Vec3::Zero();
  double lambda = 1.0;

  Vec3 invert(const Vec3& x) const;
  Vec3 apply(const Vec3& x) const;
  std::string description() const;
};

// Vertex-wise application; throws when p_minus lies within 1e-6 of a vertex.
Mesh3 mobius_apply(const MobiusMap& map, const Mesh3& mesh);

struct VSolve {
  MobiusMap map;
  double achieved_v = 0.0;
  double lambda_lo = 1.0, lambda_hi = 1.0;
  double v_lo = 0.0, v_hi = 0.0;  // values at the final bracket endpoints
  int iterations = 0;
  Mesh3 mesh;  // the mapped mesh at the returned lambda
};

// Bisection on log lambda in [1, lambda_hi] (lambda_hi grown from 1e3 up to 1e6)
// until |v - target| < tol.
VSolve solve_for_v(const Mesh3& mesh, double target_v, const Vec3& p_minus, const Vec3& p_plus,
                   double tol = 1e-3);

// Icosahedron refined `subdivisions` times and projected to the unit sphere.
Mesh3 icosphere(int subdivisions);

// Largest distance of the points from their least-squares sphere / circle.
double sphere_fit_residual(const std::vector<Vec3>& points);
double circle_fit_residual(const std::vector<Vec3>& points);

}  // namespace canham
