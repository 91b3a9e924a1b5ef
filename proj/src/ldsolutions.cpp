#include "canham/ldsolutions.hpp"

#include "canham/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace canham {

namespace {

constexpr double kPi = std::numbers::pi;

// Cutoff of the m = 1 definition: weight of G o d_L is psi_cut[pi/2, pi/3](d_L).
const CutoffSpec& m1_cutoff() {
  static const CutoffSpec spec(kPi / 3, kPi / 2);
  return spec;
}

// 1 - p.x computed as |x - p|^2 / 2.
double one_minus_dot(const Vec3& p, const Vec3& x) { return 0.5 * (x - p).squaredNorm(); }

Jet superposition_jet(const Configuration& c, const S2Point& x) {
  Jet total = constant_jet(0.5 * c.m);
  for (const auto& pk : c.points) {
    const Vec3& p = pk.coords();
    const double w = one_minus_dot(p, x.coords());
    const double u = 1.0 - w;
    const double lw = std::log(w);
    const Derivs f{0.5 * u * lw, 0.5 * lw - 0.5 * u / w, -0.5 / w - 0.5 / (w * w)};
    total = total + restricted_jet(p, x, u, f);
  }
  return total;
}

double superposition_value(const Configuration& c, const S2Point& x) {
  KahanSum total;
  total.add(0.5 * c.m);
  for (const auto& pk : c.points) {
    const double w = one_minus_dot(pk.coords(), x.coords());
    total.add(0.5 * (1.0 - w) * std::log(w));
  }
  return total.value();
}

Derivs closed_form_m2(double d) {
  const double s = std::sin(d), c = std::cos(d);
  const double l = std::log(std::tan(0.5 * d));
  return {1.0 + c * l, -s * l + c / s, -c * l - 1.0 - 1.0 / (s * s)};
}

CutoffSpec extraction_cutoff(double rho_ext) { return CutoffSpec(rho_ext, 0.0); }

}  // namespace

Configuration Configuration::equatorial(int m) {
  if (m < 1) throw std::invalid_argument("configuration: m must be >= 1");
  Configuration c;
  c.m = m;
  for (int k = 1; k <= m; ++k) {
    const double a = 2.0 * kPi * k / m;
    c.points.emplace_back(Vec3(std::cos(a), std::sin(a), 0.0));
  }
  c.delta = 1.0 / (10.0 * m);
  return c;
}

double Configuration::min_pairwise_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) best = std::min(best, geodesic_distance(points[i], points[j]));
  return best;
}

std::string to_string(PhiMode mode) {
  switch (mode) {
    case PhiMode::solved: return "solved";
    case PhiMode::closed_form_m2: return "closed_form_m2";
    case PhiMode::cutoff_m1: return "cutoff_m1";
    case PhiMode::superposition: return "superposition";
  }
  return "unknown";
}

PhiMode phi_mode_from_string(const std::string& name) {
  for (PhiMode m : {PhiMode::solved, PhiMode::closed_form_m2, PhiMode::cutoff_m1, PhiMode::superposition})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown LD solution mode: " + name);
}

LDSolution LDSolution::from_parts(Configuration config, PhiMode mode, double rho_ext, HarmonicSeries w, double c0) {
  LDSolution s;
  s.config_ = std::move(config);
  s.mode_ = mode;
  s.rho_ext_ = rho_ext;
  s.w_ = std::move(w);
  s.c0_ = c0;
  return s;
}

Jet LDSolution::jet(const S2Point& x) const {
  switch (mode_) {
    case PhiMode::superposition: return superposition_jet(config_, x);
    case PhiMode::closed_form_m2: {
      const Jet d = distance_jet(config_.points[nearest_index(x, config_.points)], x);
      return compose(closed_form_m2(d.value), d);
    }
    case PhiMode::cutoff_m1: {
      // Identically zero beyond pi/2 (including the antipode, where d is not smooth).
      if (geodesic_distance(config_.points[0], x) >= kPi / 2) return constant_jet(0.0);
      const Jet d = distance_jet(config_.points[0], x);
      return blend_jet(m1_cutoff(), d, [&] { return compose(GreenFunction::derivs(d.value), d); },
                       [] { return constant_jet(0.0); });
    }
    case PhiMode::solved: {
      Jet total = series_jet(w_, x);
      const CutoffSpec cut = extraction_cutoff(rho_ext_);
      for (const auto& p : config_.points) {
        if (geodesic_distance(p, x) >= 2.0 * rho_ext_ / 3.0) continue;
        const Jet d = distance_jet(p, x);
        total = total + product(compose(psi_cut_derivs(cut, d.value), d), compose(GreenFunction::derivs(d.value), d));
      }
      return total;
    }
  }
  throw std::logic_error("unreachable");
}

double LDSolution::value(const S2Point& x) const {
  switch (mode_) {
    case PhiMode::superposition: return superposition_value(config_, x);
    case PhiMode::solved: {
      double total = series_value(w_, x);
      const CutoffSpec cut = extraction_cutoff(rho_ext_);
      for (const auto& p : config_.points) {
        const double d = geodesic_distance(p, x);
        const double chi = psi_cut(cut, d);
        if (chi != 0.0) total += chi * GreenFunction::value(d);
      }
      return total;
    }
    default: return jet(x).value;
  }
}

ScalarField LDSolution::field() const {
  auto self = std::make_shared<const LDSolution>(*this);
  return ScalarField([self](const S2Point& x) { return self->jet(x); });
}

std::vector<std::pair<double, double>> LDSolution::transition_bands() const {
  switch (mode_) {
    case PhiMode::cutoff_m1: return {{kPi / 3 + kPi / 18, kPi / 2 - kPi / 18}};
    case PhiMode::solved: return {{rho_ext_ / 3, 2 * rho_ext_ / 3}};
    default: return {};
  }
}

double extraction_forcing(const Configuration& config, double rho_ext, const S2Point& x) {
  const CutoffSpec cut = extraction_cutoff(rho_ext);
  double f = 0.0;
  for (const auto& p : config.points) {
    const double d = geodesic_distance(p, x);
    if (d <= rho_ext / 3.0 || d >= 2.0 * rho_ext / 3.0) continue;
    const Derivs chi = psi_cut_derivs(cut, d);
    const Derivs g = GreenFunction::derivs(d);
    // L(chi G) = chi L G + G Lap(chi) + 2 chi' G', with L G = 0.
    const double lap_chi = chi[2] + std::cos(d) / std::sin(d) * chi[1];
    f -= g[0] * lap_chi + 2.0 * chi[1] * g[1];
  }
  return f;
}

LDSolution build_phi_solved(const Configuration& config, int lmax, const SolveOptions& options) {
  if (config.m < 1) throw std::invalid_argument("build_phi: m must be >= 1");
  if (!(options.rho_ext > 0.0 && options.rho_ext < kPi))
    throw std::invalid_argument("build_phi: extraction radius must lie in (0, pi)");
  const SphereGrid grid = gauss_grid_for(lmax, options.oversample);
  const double rho = options.rho_ext;
  const std::vector<double> f =
      sample_on_grid(grid, [&](const S2Point& x) { return extraction_forcing(config, rho, x); });
  const HarmonicSeries fs = sht_forward(grid, f, lmax);
  LDSolution sol;
  sol.config_ = config;
  sol.mode_ = PhiMode::solved;
  sol.rho_ext_ = rho;
  sol.w_ = solve_L(fs, options.tol_kernel);
  sol.c0_ = compute_c0(sol);
  return sol;
}

LDSolution build_phi_closed_form(int m) {
  LDSolution sol;
  sol.config_ = Configuration::equatorial(m);
  sol.mode_ = m == 1 ? PhiMode::cutoff_m1 : (m == 2 ? PhiMode::closed_form_m2 : PhiMode::superposition);
  sol.rho_ext_ = m == 1 ? kPi / 3 : 0.0;
  sol.c0_ = compute_c0(sol);
  return sol;
}

LDSolution build_phi(int m, int lmax, const SolveOptions& options) {
  if (m < 1) throw std::invalid_argument("build_phi: m must be >= 1");
  if (m == 1) return build_phi_closed_form(1);
  return build_phi_solved(Configuration::equatorial(m), lmax, options);
}

double c0_closed_form(int m) {
  if (m < 1) throw std::invalid_argument("c0: m must be >= 1");
  if (m == 1) return 0.0;
  double s = 0.5 * m - 0.5 * std::log(2.0);
  for (int j = 1; j < m; ++j) {
    const double c = std::cos(2.0 * kPi * j / m);
    const double h = std::sin(kPi * j / m);
    s += 0.5 * c * std::log(2.0 * h * h);
  }
  return s;
}

double compute_c0(const LDSolution& sol, std::size_t index) {
  const Configuration& c = sol.config();
  if (index >= c.points.size()) throw std::out_of_range("compute_c0: point index out of range");
  const S2Point& p = c.points[index];
  const PolarFrame frame(p.coords());
  auto g = [&](double r) {
    KahanSum acc;
    for (int j = 0; j < 8; ++j) {
      const S2Point q = frame.point(r, 2.0 * kPi * j / 8.0);
      const double d = distance_jet(p, q).value;
      acc.add(sol.value(q) - GreenFunction::value(d));
    }
    return acc.value() / 8.0;
  };
  const double r1 = c.delta / 4, r2 = c.delta / 8, r3 = c.delta / 16;
  const double g1 = g(r1), g2 = g(r2), g3 = g(r3);
  const double e1 = (4.0 * g2 - g1) / 3.0;
  const double e2 = (4.0 * g3 - g2) / 3.0;
  if (std::abs(e1 - e2) > 1e-6) {
    std::ostringstream msg;
    msg << "c0 extrapolation did not converge: successive estimates " << e1 << " and " << e2;
    throw std::runtime_error(msg.str());
  }
  return (16.0 * e2 - e1) / 15.0;
}

Jet phi_prime_eval(const LDSolution& sol, const S2Point& x) {
  const Configuration& c = sol.config();
  const std::size_t k = nearest_index(x, c.points);
  const Jet d = distance_jet(c.points[k], x);
  if (!(d.value < c.delta)) throw std::domain_error("phi_prime_eval: point outside D_L(delta)");
  return sol.jet(x) - compose(GreenFunction::derivs(d.value), d) - sol.c0() * linear_jet(c.points[k].coords(), x);
}

AdmissibilityError::AdmissibilityError(std::vector<std::string> violations)
    : std::invalid_argument([&] {
        std::string msg = "admissibility:";
        for (std::size_t i = 0; i < violations.size(); ++i) msg += (i ? "; " : " ") + violations[i];
        return msg;
      }()),
      violations_(std::move(violations)) {}

std::vector<std::string> admissibility_violations(int m, double tau, double alpha, Admissibility mode) {
  std::vector<std::string> v;
  if (m < 1) v.push_back("m < 1");
  if (!(tau > 0.0 && tau < 1.0)) v.push_back("τ outside (0,1)");
  if (!(alpha > 0.0 && alpha < 1.0)) v.push_back("α outside (0,1)");
  if (!v.empty()) return v;
  const double ta = std::pow(tau, alpha);
  const double delta = 1.0 / (10.0 * m);
  std::ostringstream num;
  if (mode == Admissibility::strict && !(2.0 * ta < delta)) {
    num << "2τ^α ≥ 1/(10m) [2τ^α ≥ δ: " << 2.0 * ta << " ≥ " << delta << "]";
    v.push_back(num.str());
  }
  if (mode == Admissibility::geometric && !(2.0 * ta < kPi / 4)) v.push_back("2τ^α ≥ π/4");
  if (!(ta > 10.0 * tau)) v.push_back("τ^α ≤ 10τ");
  if (m >= 2) {
    const double dmin = Configuration::equatorial(m).min_pairwise_distance();
    if (!(4.0 * ta < dmin)) v.push_back("D_L(2τ^α) not pairwise disjoint");
  }
  return v;
}

void check_admissibility(int m, double tau, double alpha, Admissibility mode) {
  auto v = admissibility_violations(m, tau, alpha, mode);
  if (!v.empty()) throw AdmissibilityError(std::move(v));
}

Profile::Profile(std::shared_ptr<const LDSolution> base, double tau, double alpha)
    : base_(std::move(base)), tau_(tau), alpha_(alpha) {
  if (!base_) throw std::invalid_argument("profile: missing LD solution");
  c1_ = tau_ * std::log(2.0 / tau_) - tau_ * base_->c0();
}

Jet Profile::jet(const S2Point& x) const {
  Jet j = tau_ * base_->jet(x);
  j.value += c1_;
  return j;
}

Profile build_profile(std::shared_ptr<const LDSolution> sol, double tau, double alpha, Admissibility mode) {
  if (!sol) throw std::invalid_argument("profile: missing LD solution");
  check_admissibility(sol->config().m, tau, alpha, mode);
  return Profile(std::move(sol), tau, alpha);
}

}  // namespace canham
