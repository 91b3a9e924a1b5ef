#include "canham/graphs.hpp"

#include "canham/linops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace canham {

namespace {

constexpr double kPi = std::numbers::pi;

Vec4 lift(const Vec3& v, double w) {
  Vec4 x;
  x << v, w;
  return x;
}

}  // namespace

GraphPoint graph_point(const S2Point& x, const Jet& u) {
  const double c = std::cos(u.value), s = std::sin(u.value);
  if (!(std::abs(u.value) < kPi / 2)) {
    std::ostringstream os;
    os << "graph: |u| = " << std::abs(u.value) << " >= pi/2, embedding undefined";
    throw std::domain_error(os.str());
  }
  const Vec3& p = x.coords();
  const auto t = tangent_basis(p);
  const double du[2] = {u.grad.dot(t[0]), u.grad.dot(t[1])};
  double ddu[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) ddu[i][j] = t[i].dot(u.hess * t[j]);

  // E(y) = cos u(y) P(y) + sin u(y) e4 in normal coordinates y about x, where
  // P_i = t_i and P_ij = -delta_ij x at y = 0.
  const Vec4 X = lift(c * p, s);
  Vec4 E[2];
  for (int i = 0; i < 2; ++i) E[i] = lift(-s * du[i] * p + c * t[i], c * du[i]);
  Vec4 EE[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double dij = i == j ? 1.0 : 0.0;
      const Vec3 v = (-c * du[i] * du[j] - s * ddu[i][j] - c * dij) * p - s * (du[i] * t[j] + du[j] * t[i]);
      EE[i][j] = lift(v, -s * du[i] * du[j] + c * ddu[i][j]);
    }

  Vec4 n = cross4(X, E[0], E[1]);
  const double nn = n.norm();
  const double g00 = c * c + du[0] * du[0], g11 = c * c + du[1] * du[1], g01 = du[0] * du[1];
  const double det = g00 * g11 - g01 * g01;
  if (!(nn > 0.0) || !(det > 0.0)) throw std::domain_error("graph: degenerate metric");
  n /= nn;
  if (n.dot(lift(-s * p, c)) < 0.0) n = -n;

  GraphPoint g;
  g.position = X;
  const double grad2 = du[0] * du[0] + du[1] * du[1];
  const double q = grad2 / (c * c);
  const double root = std::sqrt(1.0 + q);
  g.density = c * c * root;
  g.density_minus_one = c * c * q / (root + 1.0) - s * s;
  const double a00 = EE[0][0].dot(n), a11 = EE[1][1].dot(n), a01 = EE[0][1].dot(n);
  g.H = (g11 * a00 - 2.0 * g01 * a01 + g00 * a11) / det;
  return g;
}

double graph_deficit_density(const GraphPoint& g) { return g.density_minus_one + 0.25 * g.H * g.H * g.density; }

namespace {

IntegralResult graph_sums(const GraphPatch& patch, const QuadratureSpec& spec) {
  return integrate(patch.region, spec, [&](const S2Point& x) {
    const GraphPoint g = graph_point(x, patch.u.jet(x));
    return Sample{g.density, g.H * g.H * g.density, graph_deficit_density(g), 0.0};
  });
}

}  // namespace

RegionEnergy graph_willmore_exact(const GraphPatch& patch, const QuadratureSpec& spec) {
  const IntegralResult r = graph_sums(patch, spec);
  RegionEnergy e;
  e.area = r.value[0];
  e.h2 = r.value[1];
  e.willmore = e.area + 0.25 * e.h2;
  e.reference = patch.region.area;
  e.deficit = r.value[2];
  e.rounding = r.abs_total[2] * 1e-16;
  e.nodes = r.nodes;
  if (spec.estimate_error) {
    QuadratureSpec fine = spec.doubled();
    fine.estimate_error = false;
    const IntegralResult f = graph_sums(patch, fine);
    e.error = std::abs(f.value[2] - e.deficit);
    if (e.error > spec.nonconvergence_tol) {
      std::ostringstream os;
      os.precision(17);
      os << "graph quadrature not converged: deficit " << e.deficit << " vs " << f.value[2]
         << " at doubled resolution";
      throw std::runtime_error(os.str());
    }
  }
  return e;
}

double boundary_integral(const BoundaryCircle& circle, int nodes,
                         const std::function<double(const S2Point&, const Vec3&)>& f) {
  KahanSum sum;
  const double ds = 2.0 * kPi / nodes * std::sin(circle.radius);
  for (int i = 0; i < nodes; ++i) {
    const double theta = 2.0 * kPi * (i + 0.5) / nodes;
    const S2Point x = circle.frame.point(circle.radius, theta);
    const Vec3 eta = static_cast<double>(circle.orientation) * circle.frame.radial(circle.radius, theta);
    sum.add(ds * f(x, eta));
  }
  return sum.value();
}

LinearizedEnergy graph_willmore_linearized(const GraphPatch& patch, const QuadratureSpec& spec) {
  const IntegralResult r = integrate(patch.region, spec, [&](const S2Point& x) {
    const Jet j = patch.u.jet(x);
    return Sample{j.laplacian() * j.jacobi(), 0.0, 0.0, 0.0};
  });
  LinearizedEnergy e;
  e.interior = 0.25 * r.value[0];
  KahanSum b;
  for (const BoundaryCircle& c : patch.region.boundary)
    b.add(0.5 * boundary_integral(c, spec.boundary_nodes, [&](const S2Point& x, const Vec3& eta) {
      const Jet j = patch.u.jet(x);
      return j.value * j.grad.dot(eta);
    }));
  e.boundary = b.value();
  e.deficit = e.interior + e.boundary;
  e.willmore = patch.region.area + e.deficit;
  return e;
}

GluedProfile::GluedProfile(Profile profile)
    : profile_(std::move(profile)), r_in_(std::pow(profile_.tau(), profile_.alpha())), cat_{profile_.tau()} {}

Jet GluedProfile::jet(const S2Point& x) const {
  const auto& pts = points();
  const std::size_t k = nearest_index(x, pts);
  const double d = geodesic_distance(pts[k], x);
  if (d >= outer_radius()) return profile_.jet(x);
  const Jet dj = distance_jet(pts[k], x);
  return blend_jet(CutoffSpec(r_in_, outer_radius()), dj, [&] { return compose(cat_.derivs(dj.value), dj); },
                   [&] { return profile_.jet(x); });
}

ScalarField GluedProfile::field() const {
  auto self = std::make_shared<const GluedProfile>(*this);
  return ScalarField([self](const S2Point& x) { return self->jet(x); });
}

ScalarField GluedProfile::lower_field() const {
  auto self = std::make_shared<const GluedProfile>(*this);
  return ScalarField([self](const S2Point& x) { return -1.0 * self->jet(x); });
}

Jet GluedProfile::reference_jet(const S2Point& x) const {
  const auto& pts = points();
  const std::size_t k = nearest_index(x, pts);
  const Jet dj = distance_jet(pts[k], x);
  const double t = tau();
  return t * compose(GreenFunction::derivs(dj.value), dj) -
         t * std::log(0.5 * t) * linear_jet(pts[k].coords(), x);
}

Jet GluedProfile::inner_jet(const S2Point& x) const {
  const auto& pts = points();
  const Jet dj = distance_jet(pts[nearest_index(x, pts)], x);
  return compose(cat_.derivs(dj.value), dj) - reference_jet(x);
}

Jet GluedProfile::outer_jet(const S2Point& x) const {
  const auto& pts = points();
  const std::size_t k = nearest_index(x, pts);
  Jet one_minus_cos = -1.0 * linear_jet(pts[k].coords(), x);
  one_minus_cos.value += 1.0;
  return profile_.c1() * one_minus_cos + tau() * phi_prime_eval(profile_.base(), x);
}

Region GluedProfile::domain() const {
  std::vector<double> breaks{r_in_ * 4.0 / 3.0, r_in_ * 5.0 / 3.0, outer_radius()};
  std::vector<std::pair<double, double>> sub{{r_in_ * 4.0 / 3.0, r_in_ * 5.0 / 3.0}};
  for (const auto& [a, b] : profile_.base().transition_bands()) {
    breaks.push_back(a);
    breaks.push_back(b);
    sub.push_back({a, b});
  }
  return Region::punctured(points(), r_in_, breaks, sub);
}

GluedProfile build_glued_profile(const Profile& profile) {
  const int m = profile.base().config().m;
  // Strict or geometric admissibility was checked when the profile was built;
  // here only what the gluing itself needs is re-checked.
  const double ta = std::pow(profile.tau(), profile.alpha());
  std::vector<std::string> v;
  if (!(ta > profile.tau())) v.push_back("τ^α ≤ τ");
  if (m >= 2 && !(4.0 * ta < profile.base().config().min_pairwise_distance()))
    v.push_back("D_L(2τ^α) not pairwise disjoint");
  if (!v.empty()) throw AdmissibilityError(std::move(v));
  return GluedProfile(profile);
}

ExteriorEnergy exterior_willmore(const GluedProfile& glued, const QuadratureSpec& spec, bool with_diagnostics) {
  ExteriorEnergy out;
  GraphPatch patch{glued.domain(), glued.field()};
  out.energy = graph_willmore_exact(patch, spec);
  if (!with_diagnostics) return out;

  ExteriorDiagnostics& d = out.diagnostics;
  const double tau = glued.tau();
  const double alpha = glued.alpha();
  const double ltau = std::abs(std::log(tau));
  const int m = glued.profile().base().config().m;
  const double r_out = glued.outer_radius();

  QuadratureSpec coarse = spec;
  coarse.estimate_error = false;
  const Region& region = patch.region;
  const IntegralResult pairing = integrate(region, coarse, [&](const S2Point& x) {
    const Jet j = glued.jet(x);
    return Sample{j.laplacian() * j.jacobi(), 0.0, 0.0, 0.0};
  });
  d.energy_pairing = pairing.value[0];

  visit_nodes(region, coarse, [&](const S2Point& x, double) {
    const Jet j = glued.jet(x);
    const double hess = j.hess.norm();
    d.c2_norm = std::max({d.c2_norm, std::abs(j.value), j.grad.norm(), hess});
    if (distance_to_set(x, glued.points()) <= r_out) {
      d.max_laplacian_annulus = std::max(d.max_laplacian_annulus, std::abs(j.laplacian()));
      d.max_jacobi_annulus = std::max(d.max_jacobi_annulus, std::abs(j.jacobi()));
    }
  });
  d.laplacian_constant = d.max_laplacian_annulus / (tau * ltau);
  d.jacobi_constant = d.max_jacobi_annulus / (tau * ltau);
  d.c2_constant = d.c2_norm / std::pow(tau, 1.0 - 2.0 * alpha);

  // Flux of Phi out of Omega \ A_L through the circles d_L = 2 tau^alpha
  // (outward = towards L).
  KahanSum flux;
  const LDSolution& base = glued.profile().base();
  for (const auto& p : glued.points()) {
    const BoundaryCircle circle{PolarFrame(p.coords()), r_out, -1};
    flux.add(boundary_integral(circle, spec.boundary_nodes,
                               [&](const S2Point& x, const Vec3& eta) { return base.jet(x).grad.dot(eta); }));
  }
  d.flux_term = 2.0 * glued.profile().c1() * tau * flux.value();
  d.pairing_error_constant =
      std::abs(d.energy_pairing - d.flux_term) / (std::pow(tau, 2.0 + 2.0 * alpha) * ltau * ltau);

  if (base.mode() == PhiMode::cutoff_m1) {
    Region band = Region::annulus(base.config().points[0], kPi / 3, kPi / 2);
    for (const auto& [a0, b0] : base.transition_bands()) {
      band.cells[0].radial_breaks.insert(band.cells[0].radial_breaks.end(), {a0, b0});
      band.cells[0].subdivided.push_back({a0, b0});
    }
    const IntegralResult a = integrate(band, coarse, [&](const S2Point& x) {
      const Jet j = base.jet(x);
      return Sample{j.jacobi() * j.laplacian(), 0.0, 0.0, 0.0};
    });
    d.forcing_region_term = tau * tau * a.value[0];
  }
  d.lemma_bound = -(11.0 * m * kPi / 6.0) * tau * tau * ltau;
  return out;
}

}  // namespace canham
