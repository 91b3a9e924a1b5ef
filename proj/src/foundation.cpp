#include "canham/foundation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace canham {

S2Point::S2Point(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("S2Point: zero or non-finite vector");
  v_ = v / n;
}

S3Point::S3Point(const Vec4& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("S3Point: zero or non-finite vector");
  v_ = v / n;
}

CutoffSpec::CutoffSpec(double a_, double b_) : a(a_), b(b_) {
  if (a == b) throw std::invalid_argument("cutoff: transition endpoints must differ (a = b)");
}

namespace {

// e(x) = exp(-1/x) for x > 0, else 0, with its first two derivatives.
// Below x = 1e-3 the exponential is already 0 in double precision; returning
// zeros avoids 0 * inf from the polynomial factors.
Derivs bump(double x) {
  if (x < 1e-3) return {0.0, 0.0, 0.0};
  const double e = std::exp(-1.0 / x);
  const double ix = 1.0 / x;
  const double ix2 = ix * ix;
  return {e, e * ix2, e * (ix2 * ix2 - 2.0 * ix2 * ix)};
}

}  // namespace

Derivs psi_derivs(double t) {
  if (t <= -1.0) return {0.0, 0.0, 0.0};
  if (t >= 1.0) return {1.0, 0.0, 0.0};
  const Derivs A = bump(1.0 + t);
  const Derivs B = bump(1.0 - t);
  const double a = A[0], b = B[0];
  const double a1 = A[1], b1 = -B[1];
  const double a2 = A[2], b2 = B[2];
  const double s = a + b;
  const double n = a1 * b - a * b1;
  const double n1 = a2 * b - a * b2;
  const double s1 = a1 + b1;
  return {a / s, n / (s * s), n1 / (s * s) - 2.0 * n * s1 / (s * s * s)};
}

double psi(double t) { return psi_derivs(t)[0]; }

Derivs psi_cut_derivs(const CutoffSpec& spec, double x) {
  const double k = spec.slope();
  const Derivs d = psi_derivs(spec.affine(x));
  return {d[0], d[1] * k, d[2] * k * k};
}

double psi_cut(const CutoffSpec& spec, double x) { return psi(spec.affine(x)); }

double geodesic_distance(const S2Point& p, const S2Point& q) {
  const Vec3& a = p.coords();
  const Vec3& b = q.coords();
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

std::size_t nearest_index(const S2Point& p, const std::vector<S2Point>& set) {
  if (set.empty()) throw std::invalid_argument("empty point set");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < set.size(); ++k) {
    const double d = geodesic_distance(p, set[k]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

double distance_to_set(const S2Point& p, const std::vector<S2Point>& set) {
  return geodesic_distance(p, set[nearest_index(p, set)]);
}

Jet operator+(const Jet& a, const Jet& b) { return {a.value + b.value, a.grad + b.grad, a.hess + b.hess}; }
Jet operator-(const Jet& a, const Jet& b) { return {a.value - b.value, a.grad - b.grad, a.hess - b.hess}; }
Jet operator*(double s, const Jet& a) { return {s * a.value, s * a.grad, s * a.hess}; }

Jet product(const Jet& a, const Jet& b) {
  Jet r;
  r.value = a.value * b.value;
  r.grad = a.value * b.grad + b.value * a.grad;
  r.hess = a.value * b.hess + b.value * a.hess + a.grad * b.grad.transpose() + b.grad * a.grad.transpose();
  return r;
}

Jet compose(const Derivs& h, const Jet& f) {
  Jet r;
  r.value = h[0];
  r.grad = h[1] * f.grad;
  r.hess = h[1] * f.hess + h[2] * f.grad * f.grad.transpose();
  return r;
}

Jet constant_jet(double c) {
  Jet j;
  j.value = c;
  return j;
}

Mat3 tangent_projector(const Vec3& x) { return Mat3::Identity() - x * x.transpose(); }

std::array<Vec3, 2> tangent_basis(const Vec3& x) {
  const Vec3 a = std::abs(x.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 t1 = (a - a.dot(x) * x).normalized();
  return {t1, x.cross(t1)};
}

Jet distance_jet(const S2Point& center, const S2Point& x) {
  const Vec3& c = center.coords();
  const Vec3& y = x.coords();
  const double cc = y.dot(c);
  const double s = y.cross(c).norm();
  if (!(s > 0.0)) throw std::domain_error("distance jet undefined at the center and its antipode");
  const Vec3 pc = c - cc * y;
  const Vec3 g = -pc / pc.norm();
  Jet j;
  j.value = std::atan2(s, cc);
  j.grad = g;
  j.hess = (cc / s) * (tangent_projector(y) - g * g.transpose());
  return j;
}

Jet restricted_jet(const Vec3& p, const S2Point& x, double u, const Derivs& f) {
  const Vec3& y = x.coords();
  const Vec3 pp = p - u * y;
  Jet j;
  j.value = f[0];
  j.grad = f[1] * pp;
  j.hess = f[2] * pp * pp.transpose() - u * f[1] * tangent_projector(y);
  return j;
}

Jet linear_jet(const Vec3& a, const S2Point& x) {
  const double u = a.dot(x.coords());
  return restricted_jet(a, x, u, {u, 1.0, 0.0});
}

Vec4 cross4(const Vec4& a, const Vec4& b, const Vec4& c) {
  Vec4 n;
  for (int i = 0; i < 4; ++i) {
    Eigen::Matrix3d minor;
    int row = 0;
    for (int k = 0; k < 4; ++k) {
      if (k == i) continue;
      minor.row(row++) << a[k], b[k], c[k];
    }
    n[i] = ((i % 2 == 0) ? -1.0 : 1.0) * minor.determinant();
  }
  return n;
}

S2Point exp_map(const S2Point& p, const Vec3& e, double r) {
  return S2Point(std::cos(r) * p.coords() + std::sin(r) * e);
}

ScalarField ScalarField::constant(double c) {
  return ScalarField([c](const S2Point&) { return constant_jet(c); });
}

ScalarField ScalarField::linear(const Vec3& a) {
  return ScalarField([a](const S2Point& x) { return linear_jet(a, x); });
}

ScalarField ScalarField::radial(const S2Point& center, std::function<Derivs(double)> h) {
  return ScalarField([center, h = std::move(h)](const S2Point& x) {
    const Jet d = distance_jet(center, x);
    return compose(h(d.value), d);
  });
}

ScalarField ScalarField::distance_to(std::vector<S2Point> set) {
  if (set.empty()) throw std::invalid_argument("empty point set");
  return ScalarField([set = std::move(set)](const S2Point& x) {
    return distance_jet(set[nearest_index(x, set)], x);
  });
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return ScalarField([a, b](const S2Point& x) { return a.jet(x) + b.jet(x); });
}

ScalarField operator*(double s, const ScalarField& a) {
  return ScalarField([s, a](const S2Point& x) { return s * a.jet(x); });
}

Jet blend_jet(const CutoffSpec& spec, const Jet& rho, const std::function<Jet()>& f0,
              const std::function<Jet()>& f1) {
  const Jet w1 = compose(psi_cut_derivs(spec, rho.value), rho);
  const Jet w0 = compose(psi_cut_derivs(CutoffSpec(spec.b, spec.a), rho.value), rho);
  const bool off1 = w1.value == 0.0 && w1.grad.isZero(0.0) && w1.hess.isZero(0.0);
  const bool off0 = w0.value == 0.0 && w0.grad.isZero(0.0) && w0.hess.isZero(0.0);
  if (off1) return product(w0, f0());
  if (off0) return product(w1, f1());
  return product(w1, f1()) + product(w0, f0());
}

ScalarField blend(double a, double b, const ScalarField& rho, const ScalarField& f0, const ScalarField& f1) {
  const CutoffSpec spec(a, b);
  return ScalarField([spec, rho, f0, f1](const S2Point& x) {
    return blend_jet(spec, rho.jet(x), [&] { return f0.jet(x); }, [&] { return f1.jet(x); });
  });
}

void KahanSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
  abs_ += std::abs(x);
}

void KahanSum::merge(const KahanSum& other) {
  const double abs_before = abs_;
  add(other.sum_);
  add(other.comp_);
  abs_ = abs_before + other.abs_;
}

}  // namespace canham
