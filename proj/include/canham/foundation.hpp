#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <vector>

namespace canham {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;

// Point on the equatorial unit 2-sphere {x4 = 0} of S^3.
class S2Point {
 public:
  S2Point() : v_(0.0, 0.0, 1.0) {}
  // Normalizes; throws std::invalid_argument for the zero vector.
  explicit S2Point(const Vec3& v);
  S2Point(double x, double y, double z) : S2Point(Vec3(x, y, z)) {}

  const Vec3& coords() const { return v_; }
  Vec4 ambient() const { return Vec4(v_.x(), v_.y(), v_.z(), 0.0); }
  double operator[](int i) const { return v_[i]; }

 private:
  Vec3 v_;
};

class S3Point {
 public:
  S3Point() : v_(0.0, 0.0, 0.0, 1.0) {}
  explicit S3Point(const Vec4& v);
  const Vec4& coords() const { return v_; }

 private:
  Vec4 v_;
};

// Affine-rescaled cutoff: psi_cut[a,b](x) = psi(L(x)), L(a) = -3, L(b) = 3.
struct CutoffSpec {
  double a;
  double b;
  CutoffSpec(double a_, double b_);
  double affine(double x) const { return -3.0 + 6.0 * (x - a) / (b - a); }
  double slope() const { return 6.0 / (b - a); }
};

// Value and first two derivatives of a scalar function of one variable.
using Derivs = std::array<double, 3>;

double psi(double t);
Derivs psi_derivs(double t);
double psi_cut(const CutoffSpec& spec, double x);
Derivs psi_cut_derivs(const CutoffSpec& spec, double x);

double geodesic_distance(const S2Point& p, const S2Point& q);
double distance_to_set(const S2Point& p, const std::vector<S2Point>& set);
// Index of the nearest point of `set` (first one on ties).
std::size_t nearest_index(const S2Point& p, const std::vector<S2Point>& set);

// Second-order jet of a function on S^2 at a point x, with the gradient and
// Hessian represented as tangent objects in R^3 (Hessian = P H P, P = I - x x^T).
struct Jet {
  double value = 0.0;
  Vec3 grad = Vec3::Zero();
  Mat3 hess = Mat3::Zero();

  double laplacian() const { return hess.trace(); }
  // L = Laplacian + 2, the area-Jacobi operator of the equator.
  double jacobi() const { return hess.trace() + 2.0 * value; }
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(double s, const Jet& a);
Jet product(const Jet& a, const Jet& b);
// h o f for a scalar function h with derivatives (h, h', h'') at f(x).
Jet compose(const Derivs& h, const Jet& f);
Jet constant_jet(double c);

// Tangent projector at x.
Mat3 tangent_projector(const Vec3& x);
// Orthonormal tangent basis (t1, t2) at x.
std::array<Vec3, 2> tangent_basis(const Vec3& x);

// Jet of x -> d(center, x). Throws std::domain_error when x = +-center.
Jet distance_jet(const S2Point& center, const S2Point& x);
// Jet of x -> center . x (a degree-one harmonic).
Jet linear_jet(const Vec3& a, const S2Point& x);
// Jet of x -> f(p . x) given f, f', f'' at u = p . x.
Jet restricted_jet(const Vec3& p, const S2Point& x, double u, const Derivs& f);

// Generalized cross product in R^4: orthogonal to a, b, c, with
// det[a b c n] = |n|^2 > 0 for independent inputs.
Vec4 cross4(const Vec4& a, const Vec4& b, const Vec4& c);

// Exponential map of S^2: the point at distance r from p along unit tangent e.
S2Point exp_map(const S2Point& p, const Vec3& e, double r);

class ScalarField {
 public:
  using JetFn = std::function<Jet(const S2Point&)>;

  ScalarField() = default;
  explicit ScalarField(JetFn fn) : fn_(std::move(fn)) {}

  Jet jet(const S2Point& p) const { return fn_(p); }
  Jet operator()(const S2Point& p) const { return fn_(p); }
  double value(const S2Point& p) const { return fn_(p).value; }
  Vec3 gradient(const S2Point& p) const { return fn_(p).grad; }
  Mat3 hessian(const S2Point& p) const { return fn_(p).hess; }
  double laplacian(const S2Point& p) const { return fn_(p).laplacian(); }
  explicit operator bool() const { return static_cast<bool>(fn_); }

  static ScalarField constant(double c);
  static ScalarField linear(const Vec3& a);
  // x -> h(d(center, x)); h receives the distance and returns (h, h', h'').
  static ScalarField radial(const S2Point& center, std::function<Derivs(double)> h);
  // x -> d_L(x), the distance to the nearest point of `set`.
  static ScalarField distance_to(std::vector<S2Point> set);

 private:
  JetFn fn_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);

// Psi[a,b; rho](f0, f1) = psi_cut[a,b](rho) f1 + psi_cut[b,a](rho) f0.
// A branch whose weight vanishes identically at the point is not evaluated, so
// f0/f1 may be singular where they are switched off.
ScalarField blend(double a, double b, const ScalarField& rho, const ScalarField& f0,
                  const ScalarField& f1);
Jet blend_jet(const CutoffSpec& spec, const Jet& rho, const std::function<Jet()>& f0,
              const std::function<Jet()>& f1);

// Neumaier-compensated accumulator.
class KahanSum {
 public:
  void add(double x);
  KahanSum& operator+=(double x) {
    add(x);
    return *this;
  }
  void merge(const KahanSum& other);
  double value() const { return sum_ + comp_; }
  double abs_total() const { return abs_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  double abs_ = 0.0;
};

}  // namespace canham
