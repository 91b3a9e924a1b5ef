#pragma once

#include "canham/foundation.hpp"

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace canham {

// G(r) = cos r log(2 tan(r/2)) + 1 - cos r, the radial Green's function of
// L = Laplacian + 2 with a unit logarithmic singularity at r = 0.
struct GreenFunction {
  static double value(double r);
  static double d1(double r);
  static double d2(double r);
  static Derivs derivs(double r);
};

// k-th radial derivative of G, k in {0, 1, 2}; domain error outside (0, pi).
double green_eval(double r, int k);

// k-th derivative in r of phi_cat(r) - tau G(r) + tau log(tau/2) cos r, evaluated
// without catastrophic cancellation. Domain: tau^alpha <= r <= 9 tau^alpha.
double catenoid_matching_gap(double tau, double alpha, double r, int k);

// Real orthonormal spherical-harmonic coefficients c_{l,mu}, |mu| <= l <= lmax.
// Y_{l,0} = Pbar_l^0(cos t); Y_{l,mu} = sqrt2 Pbar_l^mu cos(mu p); Y_{l,-mu} = sqrt2 Pbar_l^mu sin(mu p),
// with Pbar normalized to unit L2 norm on S^2 (no Condon-Shortley phase).
class HarmonicSeries {
 public:
  HarmonicSeries() = default;
  explicit HarmonicSeries(int lmax);

  int lmax() const { return lmax_; }
  static std::size_t index(int l, int mu) { return static_cast<std::size_t>(l * l + l + mu); }
  double& operator()(int l, int mu) { return c_[index(l, mu)]; }
  double operator()(int l, int mu) const { return c_[index(l, mu)]; }
  std::vector<double>& coefficients() { return c_; }
  const std::vector<double>& coefficients() const { return c_; }

 private:
  int lmax_ = 0;
  std::vector<double> c_;
};

// Gauss-Legendre nodes in cos(colatitude) times uniform longitudes.
struct SphereGrid {
  int nlat = 0;
  int nlon = 0;
  std::vector<double> cos_theta;
  std::vector<double> sin_theta;
  std::vector<double> weight;  // Gauss weights in cos(theta)

  S2Point point(int i, int j) const;
  double longitude(int j) const;
};

SphereGrid gauss_grid(int nlat, int nlon);
// Smallest grid that is exact for degree lmax, times `oversample`.
SphereGrid gauss_grid_for(int lmax, int oversample = 1);

// Row-major samples f[i * nlon + j].
std::vector<double> sample_on_grid(const SphereGrid& grid, const std::function<double(const S2Point&)>& f);

HarmonicSeries sht_forward(const SphereGrid& grid, const std::vector<double>& samples, int lmax);
std::vector<double> sht_inverse(const HarmonicSeries& series, const SphereGrid& grid);

double series_value(const HarmonicSeries& series, const S2Point& x);
// Value, gradient and Hessian; domain error within 1e-6 of the coordinate poles.
Jet series_jet(const HarmonicSeries& series, const S2Point& x);
// Real spherical harmonic Y_{l,mu} at x.
double spherical_harmonic(int l, int mu, const S2Point& x);

HarmonicSeries apply_laplacian(const HarmonicSeries& f);
HarmonicSeries apply_L(const HarmonicSeries& f);

class KernelObstruction : public std::runtime_error {
 public:
  KernelObstruction(const std::array<double, 3>& coefficients, double tol);
  // Degree-one coefficients ordered mu = -1, 0, 1.
  const std::array<double, 3>& coefficients() const { return coefficients_; }

 private:
  std::array<double, 3> coefficients_;
};

// Solves (Laplacian + 2) w = f with w_{1,mu} = 0; throws KernelObstruction
// when some |f_{1,mu}| exceeds tol_kernel.
HarmonicSeries solve_L(const HarmonicSeries& f, double tol_kernel = 1e-10);

}  // namespace canham
