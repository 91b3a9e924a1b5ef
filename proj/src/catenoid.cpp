#include "canham/catenoid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace canham {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 1/r - cot r without cancellation for small r.
double inv_minus_cot(double r) {
  if (r < 1e-2) {
    const double r2 = r * r;
    return r * (1.0 / 3.0 + r2 * (1.0 / 45.0 + r2 * (2.0 / 945.0 + r2 / 4725.0)));
  }
  return 1.0 / r - std::cos(r) / std::sin(r);
}

struct BridgeDensity {
  double area;     // area density per unit (s, vartheta)
  double h2;       // H^2 times area density
  double deficit;  // (area density - reference density) + H^2 area / 4
};

}  // namespace

double CatenoidProfile::value(double r) const { return tau * std::acosh(r / tau); }

double CatenoidProfile::d1(double r) const {
  // r^2 - tau^2 = (r - tau)(r + tau) avoids cancellation near the waist.
  return tau / std::sqrt((r - tau) * (r + tau));
}

double CatenoidProfile::d2(double r) const {
  const double w = (r - tau) * (r + tau);
  return -tau * r / (w * std::sqrt(w));
}

ChristoffelTable fermi_christoffels(double r, double z) {
  if (!(r > 0.0 && r < kPi) || !(std::abs(z) < kPi / 2)) {
    std::ostringstream os;
    os << "fermi_christoffels: (r, z) = (" << r << ", " << z << ") outside 0 < r < pi, |z| < pi/2";
    throw std::domain_error(os.str());
  }
  ChristoffelTable t;
  auto& g = t.gamma;
  const double tz = std::tan(z);
  g[0][1][1] = -std::sin(r) * std::cos(r);
  g[0][0][2] = g[0][2][0] = -tz;
  g[1][0][1] = g[1][1][0] = std::cos(r) / std::sin(r);
  g[1][1][2] = g[1][2][1] = -tz;
  g[2][0][0] = std::sin(z) * std::cos(z);
  g[2][1][1] = std::sin(z) * std::cos(z) * std::sin(r) * std::sin(r);
  return t;
}

Vec4 fermi_point(const PolarFrame& frame, double r, double theta, double z) {
  const Vec3 q = std::cos(r) * frame.p + std::sin(r) * frame.direction(theta);
  Vec4 x;
  x << std::cos(z) * q, std::sin(z);
  return x;
}

BridgeChart::BridgeChart(const S2Point& center, double tau, double alpha)
    : center_(center), frame_(center.coords()), tau_(tau), alpha_(alpha) {
  if (!(tau > 0.0) || !(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream os;
    os << "bridge: need tau > 0 and 0 < alpha < 1 (tau = " << tau << ", alpha = " << alpha << ")";
    throw std::invalid_argument(os.str());
  }
  s_max_ = std::acosh(std::pow(tau, alpha - 1.0));
}

double BridgeChart::r(double s) const { return tau_ * std::cosh(s); }

Vec4 BridgeChart::position(double s, double vartheta) const { return fermi_point(frame_, r(s), vartheta, z(s)); }

BridgeChart::Metric BridgeChart::metric(double s, double) const {
  const double zz = z(s);
  const double q = std::cos(zz) * std::sinh(s);
  const double sr = std::sin(r(s));
  return {tau_ * tau_ * (1.0 + q * q), std::cos(zz) * std::cos(zz) * sr * sr, 0.0};
}

BridgeChart::SecondForm BridgeChart::second_fundamental_form(double s, double) const {
  const double zz = z(s);
  const double rr = r(s);
  const double ch = std::cosh(s), sh = std::sinh(s), th = std::tanh(s);
  const double cz = std::cos(zz), sz = std::sin(zz), tz = std::tan(zz);
  const double q = cz * sh;
  const double N = std::sqrt(1.0 + tz * tz / (ch * ch));
  const double sin2z = 2.0 * sz * cz;
  const double bracket = th * (2.0 * tz + 0.5 * sh * sh * sin2z);
  const double sr = std::sin(rr);

  SecondForm f;
  f.A_ss = (tau_ * tau_ * bracket - tau_) / N;
  f.A_tt = 0.5 * (std::sin(2.0 * rr) / ch + sr * sr * sin2z * th) / N;
  f.A_st = 0.0;
  // H = A_ss / g_ss + A_tt / g_tt, with the 1/tau terms of both combined
  // analytically: 1 + q^2 - cosh^2 s cos^2 z = sin^2 z.
  const double one_q2 = 1.0 + q * q;
  const double t1 = bracket / one_q2;
  const double t2 = sz * sz / (tau_ * ch * ch * cz * cz * one_q2);
  const double t3 = -inv_minus_cot(rr) / (ch * cz * cz);
  const double t4 = tz * th;
  f.H = (t1 + t2 + t3 + t4) / N;
  return f;
}

double BridgeChart::mean_curvature_embedded(double s, double vartheta) const {
  // Evaluated in extended precision: the two principal curvatures are ~1/r
  // while H ~ tau |log tau|, so in double the sum would lose ~log10(1/(r tau))
  // digits at the waist.
  using Real = long double;
  using V3 = Eigen::Matrix<Real, 3, 1>;
  using V4 = Eigen::Matrix<Real, 4, 1>;
  const Real ss = s, th = vartheta, tau = tau_;
  const Real rr = tau * std::cosh(ss), zz = tau * ss;
  const Real r1 = tau * std::sinh(ss), r2 = rr, z1 = tau;
  const Real cr = std::cos(rr), sr = std::sin(rr), cz = std::cos(zz), sz = std::sin(zz);
  const V3 p = frame_.p.cast<Real>(), ea = frame_.ea.cast<Real>(), eb = frame_.eb.cast<Real>();
  const V3 d = std::cos(th) * ea + std::sin(th) * eb;
  const V3 dp = -std::sin(th) * ea + std::cos(th) * eb;
  auto lift = [](const V3& v, Real w) {
    V4 x;
    x << v, w;
    return x;
  };
  const V3 radial = cr * p + sr * d;      // point of S^2
  const V3 radial_r = -sr * p + cr * d;   // d/dr of it
  const V4 X = lift(cz * radial, sz);
  const V4 F_r = lift(cz * radial_r, 0);
  const V4 F_t = lift(cz * sr * dp, 0);
  const V4 F_z = lift(-sz * radial, cz);
  const V4 F_rr = lift(-cz * radial, 0);
  const V4 F_tt = lift(-cz * sr * d, 0);
  const V4 F_zz = lift(-cz * radial, -sz);
  const V4 F_rz = lift(-sz * radial_r, 0);

  const V4 X_s = r1 * F_r + z1 * F_z;
  const V4 X_t = F_t;
  const V4 X_ss = r1 * r1 * F_rr + 2 * r1 * z1 * F_rz + z1 * z1 * F_zz + r2 * F_r;
  const V4 X_tt = F_tt;

  // normal: cofactor expansion of det[X X_s X_t e_i]
  V4 n;
  for (int i = 0; i < 4; ++i) {
    Eigen::Matrix<Real, 3, 3> m;
    for (int row = 0, k = 0; k < 4; ++k) {
      if (k == i) continue;
      m.row(row++) << X[k], X_s[k], X_t[k];
    }
    n[i] = ((i % 2) ? 1 : -1) * m.determinant();
  }
  n.normalize();
  if (n.dot(F_r) > 0) n = -n;
  const Real g_ss = X_s.squaredNorm(), g_tt = X_t.squaredNorm();
  return static_cast<double>(X_ss.dot(n) / g_ss + X_tt.dot(n) / g_tt);
}

namespace {

BridgeDensity bridge_density(const BridgeChart& chart, double s) {
  const double tau = chart.tau();
  const double zz = chart.z(s);
  const double sr = std::sin(chart.r(s));
  const double sh = std::sinh(s);
  const double cz = std::cos(zz), sz = std::sin(zz);
  const double q = cz * sh;
  const double root = std::sqrt(1.0 + q * q);
  const double area = tau * root * cz * sr;
  const double H = chart.second_fundamental_form(s, 0.0).H;
  const double h2 = H * H * area;
  // area density minus the disc density tau sinh s sin r, rearranged:
  // cos z sqrt(1+q^2) - sinh s = cos z / (sqrt(1+q^2) + q) - sinh s sin^2 z.
  const double excess = tau * sr * (cz / (root + q) - sh * sz * sz);
  return {area, h2, excess + 0.25 * h2};
}

struct BridgeSums {
  KahanSum area, h2, deficit;
  std::size_t nodes = 0;
};

// Integrates the (vartheta-independent) densities over one half s in [0, s_max]
// for every uniform vartheta node, doubling for the mirror half s < 0.
BridgeSums bridge_sums(const BridgeChart& chart, const QuadratureSpec& spec,
                       const std::function<void(double)>* visitor) {
  std::vector<Node> nodes;
  append_gauss(0.0, chart.s_max(), spec.bridge_s_nodes, nodes);
  std::vector<BridgeDensity> dens;
  dens.reserve(nodes.size());
  for (const Node& nd : nodes) dens.push_back(bridge_density(chart, nd.x));
  const int nt = spec.bridge_theta_nodes;
  const double dt = 2.0 * kPi / nt;
  BridgeSums out;
  for (int j = 0; j < nt; ++j) {
    for (int half = 0; half < 2; ++half) {
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double w = nodes[i].w * dt;
        out.area.add(w * dens[i].area);
        out.h2.add(w * dens[i].h2);
        out.deficit.add(w * dens[i].deficit);
        if (visitor) (*visitor)(w * dens[i].deficit);
        ++out.nodes;
      }
    }
  }
  // The two half-bridges start at r = tau; the reference discs start at r = 0.
  const double inner = -2.0 * disc_area(chart.tau());
  out.deficit.add(inner);
  if (visitor) (*visitor)(inner);
  return out;
}

}  // namespace

double disc_area(double r) {
  const double s = std::sin(0.5 * r);
  return 4.0 * kPi * s * s;
}

RegionEnergy bridge_willmore(const BridgeChart& chart, const QuadratureSpec& spec) {
  const BridgeSums b = bridge_sums(chart, spec, nullptr);
  RegionEnergy e;
  e.area = b.area.value();
  e.h2 = b.h2.value();
  e.willmore = e.area + 0.25 * e.h2;
  e.reference = 2.0 * disc_area(chart.s_max() > 0 ? chart.r(chart.s_max()) : chart.tau());
  e.deficit = b.deficit.value();
  e.rounding = b.deficit.abs_total() * 1e-16;
  e.nodes = b.nodes;
  if (spec.estimate_error) {
    QuadratureSpec fine = spec.doubled();
    fine.estimate_error = false;
    const BridgeSums f = bridge_sums(chart, fine, nullptr);
    e.error = std::abs(f.deficit.value() - e.deficit);
    if (e.error > spec.nonconvergence_tol) {
      std::ostringstream os;
      os.precision(17);
      os << "bridge quadrature not converged: deficit " << e.deficit << " vs " << f.deficit.value()
         << " at doubled resolution";
      throw std::runtime_error(os.str());
    }
  }
  return e;
}

std::vector<double> bridge_strip_deficits(const BridgeChart& chart, const QuadratureSpec& spec) {
  std::vector<Node> nodes;
  append_gauss(0.0, chart.s_max(), spec.bridge_s_nodes, nodes);
  const int nt = spec.bridge_theta_nodes;
  const double dt = 2.0 * kPi / nt;
  const double inner = -2.0 * disc_area(chart.tau()) / nt;
  std::vector<double> strips(nt);
  for (int j = 0; j < nt; ++j) {
    KahanSum k;
    for (const Node& nd : nodes) k.add(2.0 * nd.w * dt * bridge_density(chart, nd.x).deficit);
    k.add(inner);
    strips[j] = k.value();
  }
  return strips;
}

void visit_bridge_deficit(const BridgeChart& chart, const QuadratureSpec& spec,
                          const std::function<void(double)>& visitor) {
  bridge_sums(chart, spec, &visitor);
}

double bridge_deficit_expansion(double tau, double alpha) {
  return 2.0 * kPi * tau * tau * (std::log(2.0) + (alpha - 1.0) * std::log(tau)) - kPi * tau * tau;
}

double bridge_max_mean_curvature(const BridgeChart& chart, int samples) {
  double best = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double s = -chart.s_max() + 2.0 * chart.s_max() * i / samples;
    best = std::max(best, std::abs(chart.second_fundamental_form(s, 0.0).H));
  }
  return best;
}

}  // namespace canham
