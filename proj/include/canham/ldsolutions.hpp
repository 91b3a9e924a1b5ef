#pragma once

#include "canham/foundation.hpp"
#include "canham/linops.hpp"

#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace canham {

// m equally spaced points on the equator, p_k = (cos 2 pi k/m, sin 2 pi k/m, 0), k = 1..m.
struct Configuration {
  int m = 0;
  std::vector<S2Point> points;
  double delta = 0.0;  // 1/(10 m)

  static Configuration equatorial(int m);
  double min_pairwise_distance() const;
};

enum class PhiMode {
  solved,          // cutoff-extracted Green's functions plus a spectral smooth part
  closed_form_m2,  // 1 + cos d log tan(d/2)
  cutoff_m1,       // Psi[pi/3, pi/2; d_L](G o d_L, 0)
  superposition,   // m/2 + 1/2 sum_k u_k log(1 - u_k), u_k = p_k . x
};

std::string to_string(PhiMode mode);
PhiMode phi_mode_from_string(const std::string& name);

struct SolveOptions {
  double rho_ext = 0.9 * std::numbers::pi;  // cutoff chi_k = psi_cut[rho_ext, 0] o d_{p_k}
  int oversample = 2;
  double tol_kernel = 1e-10;
};

class LDSolution {
 public:
  const Configuration& config() const { return config_; }
  PhiMode mode() const { return mode_; }
  double extraction_radius() const { return rho_ext_; }
  const HarmonicSeries& smooth_part() const { return w_; }
  double c0() const { return c0_; }

  Jet jet(const S2Point& x) const;
  double value(const S2Point& x) const;
  ScalarField field() const;

  // Distance bands from L where Phi switches between analytic expressions.
  std::vector<std::pair<double, double>> transition_bands() const;

  static LDSolution from_parts(Configuration config, PhiMode mode, double rho_ext, HarmonicSeries w, double c0);

 private:
  friend LDSolution build_phi(int m, int lmax, const SolveOptions& options);
  friend LDSolution build_phi_closed_form(int m);
  friend LDSolution build_phi_solved(const Configuration& config, int lmax, const SolveOptions& options);

  Configuration config_;
  PhiMode mode_ = PhiMode::superposition;
  double rho_ext_ = 0.0;
  HarmonicSeries w_;
  double c0_ = 0.0;
};

// m = 1: the cutoff definition; m >= 2: the spectral solve.
LDSolution build_phi(int m, int lmax = 256, const SolveOptions& options = {});
// m = 1: cutoff; m = 2: closed form; m >= 3: exact superposition.
LDSolution build_phi_closed_form(int m);
LDSolution build_phi_solved(const Configuration& config, int lmax, const SolveOptions& options = {});

// Forcing -sum_k L(chi_k G o d_{p_k}) of the spectral solve.
double extraction_forcing(const Configuration& config, double rho_ext, const S2Point& x);

double c0_closed_form(int m);
// lim_{q -> p} [Phi(q) - G(d_L(q))] at p = L[index] by directional averaging and
// Richardson extrapolation over radii delta/4, delta/8, delta/16.
double compute_c0(const LDSolution& sol, std::size_t index = 0);

// Phi' = Phi - G o d_L - c0 cos d_L on D_L(delta) \ L.
Jet phi_prime_eval(const LDSolution& sol, const S2Point& x);

enum class Admissibility {
  strict,     // 2 tau^alpha < 1/(10m), tau^alpha > 10 tau, D_L(2 tau^alpha) disjoint
  geometric,  // drops 2 tau^alpha < 1/(10m); requires 2 tau^alpha < pi/4 instead
};

class AdmissibilityError : public std::invalid_argument {
 public:
  explicit AdmissibilityError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

std::vector<std::string> admissibility_violations(int m, double tau, double alpha, Admissibility mode);
void check_admissibility(int m, double tau, double alpha, Admissibility mode);

class Profile {
 public:
  Profile(std::shared_ptr<const LDSolution> base, double tau, double alpha);

  double tau() const { return tau_; }
  double alpha() const { return alpha_; }
  double c1() const { return c1_; }
  const LDSolution& base() const { return *base_; }
  std::shared_ptr<const LDSolution> base_ptr() const { return base_; }

  Jet jet(const S2Point& x) const;
  double value(const S2Point& x) const { return c1_ + tau_ * base_->value(x); }

 private:
  std::shared_ptr<const LDSolution> base_;
  double tau_;
  double alpha_;
  double c1_;
};

Profile build_profile(std::shared_ptr<const LDSolution> sol, double tau, double alpha,
                      Admissibility mode = Admissibility::strict);

}  // namespace canham
