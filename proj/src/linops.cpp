#include "canham/linops.hpp"

#include "canham/parallel.hpp"
#include "canham/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace canham {

namespace {

constexpr double kPi = std::numbers::pi;

void check_green_domain(double r) {
  if (!(r > 0.0 && r < kPi)) throw std::domain_error("Green's function evaluated outside (0, pi)");
}

// log(2 tan(r/2))
double green_log(double r) { return std::log(2.0 * std::tan(0.5 * r)); }

// 1/r - cot r
double inv_minus_cot(double r) {
  if (r < 0.1) {
    const double r2 = r * r;
    return r * (1.0 / 3 + r2 * (1.0 / 45 + r2 * (2.0 / 945 + r2 * (1.0 / 4725 + r2 * 2.0 / 93555))));
  }
  return 1.0 / r - std::cos(r) / std::sin(r);
}

// csc^2 r - 1/r^2
double csc2_minus_inv2(double r) {
  if (r < 0.1) {
    const double r2 = r * r;
    return 1.0 / 3 + r2 * (1.0 / 15 + r2 * (2.0 / 189 + r2 * (1.0 / 675 + r2 * 2.0 / 10395)));
  }
  const double s = std::sin(r);
  return 1.0 / (s * s) - 1.0 / (r * r);
}

}  // namespace

double GreenFunction::value(double r) {
  check_green_domain(r);
  const double h = std::sin(0.5 * r);
  return std::cos(r) * green_log(r) + 2.0 * h * h;
}

double GreenFunction::d1(double r) {
  check_green_domain(r);
  const double s = std::sin(r);
  return -s * green_log(r) + std::cos(r) / s + s;
}

double GreenFunction::d2(double r) {
  check_green_domain(r);
  const double s = std::sin(r);
  const double c = std::cos(r);
  return -c * green_log(r) - 1.0 - 1.0 / (s * s) + c;
}

Derivs GreenFunction::derivs(double r) { return {value(r), d1(r), d2(r)}; }

double green_eval(double r, int k) {
  switch (k) {
    case 0: return GreenFunction::value(r);
    case 1: return GreenFunction::d1(r);
    case 2: return GreenFunction::d2(r);
    default: throw std::invalid_argument("green_eval: derivative order must be 0, 1 or 2");
  }
}

double catenoid_matching_gap(double tau, double alpha, double r, int k) {
  if (!(tau > 0.0 && alpha > 0.0 && alpha < 1.0)) throw std::domain_error("matching gap: need tau > 0, 0 < alpha < 1");
  const double ta = std::pow(tau, alpha);
  if (!(r >= ta && r <= 9.0 * ta)) throw std::domain_error("matching gap: r outside [tau^alpha, 9 tau^alpha]");
  const double eps = (tau / r) * (tau / r);
  const double root = std::sqrt(1.0 - eps);
  const double h = std::sin(0.5 * r);
  const double one_minus_cos = 2.0 * h * h;
  // log(4 tan(r/2) / tau) and log(2 tan(r/2) / r)
  const double log_ratio = std::log1p(2.0 * std::tan(0.5 * r) / r - 1.0);
  const double big_log = std::log(4.0 * r / tau) + log_ratio - std::log(2.0);
  switch (k) {
    case 0: {
      const double lam = std::log1p(-eps / (2.0 * (1.0 + root)));  // acosh(r/tau) - log(2r/tau)
      return tau * (std::log(2.0 * r / tau) * one_minus_cos - std::cos(r) * log_ratio + lam - one_minus_cos);
    }
    case 1: {
      const double a = eps / (r * root * (1.0 + root));  // 1/sqrt(r^2 - tau^2) - 1/r
      return tau * (a + inv_minus_cot(r) + std::sin(r) * (big_log - 1.0));
    }
    case 2: {
      const double d = -std::expm1(-1.5 * std::log1p(-eps)) / (r * r);  // 1/r^2 - r/(r^2-tau^2)^{3/2}
      return tau * (d + csc2_minus_inv2(r) + std::cos(r) * big_log + one_minus_cos);
    }
    default: throw std::invalid_argument("matching gap: derivative order must be 0, 1 or 2");
  }
}

HarmonicSeries::HarmonicSeries(int lmax) : lmax_(lmax) {
  if (lmax < 0) throw std::invalid_argument("HarmonicSeries: lmax must be >= 0");
  c_.assign(static_cast<std::size_t>(lmax + 1) * (lmax + 1), 0.0);
}

S2Point SphereGrid::point(int i, int j) const {
  const double phi = longitude(j);
  return S2Point(Vec3(sin_theta[i] * std::cos(phi), sin_theta[i] * std::sin(phi), cos_theta[i]));
}

double SphereGrid::longitude(int j) const { return 2.0 * kPi * j / nlon; }

SphereGrid gauss_grid(int nlat, int nlon) {
  if (nlat < 1 || nlon < 1) throw std::invalid_argument("gauss_grid: sizes must be positive");
  SphereGrid g;
  g.nlat = nlat;
  g.nlon = nlon;
  const GaussRule& rule = gauss_legendre(nlat);
  for (int i = 0; i < nlat; ++i) {
    const double x = rule.x[i];
    g.cos_theta.push_back(x);
    g.sin_theta.push_back(std::sqrt((1.0 - x) * (1.0 + x)));
    g.weight.push_back(rule.w[i]);
  }
  return g;
}

SphereGrid gauss_grid_for(int lmax, int oversample) {
  return gauss_grid(oversample * (lmax + 1), oversample * (2 * lmax + 1));
}

std::vector<double> sample_on_grid(const SphereGrid& grid, const std::function<double(const S2Point&)>& f) {
  std::vector<double> out(static_cast<std::size_t>(grid.nlat) * grid.nlon);
  parallel_for(static_cast<std::size_t>(grid.nlat), [&](std::size_t i) {
    for (int j = 0; j < grid.nlon; ++j) out[i * grid.nlon + j] = f(grid.point(static_cast<int>(i), j));
  });
  return out;
}

namespace {

inline std::size_t tri(int l, int m) { return static_cast<std::size_t>(l) * (l + 1) / 2 + m; }

// Recurrence coefficients for fully normalized associated Legendre functions.
struct LegendreTables {
  int lmax;
  std::vector<double> a, b, diag;
  explicit LegendreTables(int L) : lmax(L), a(tri(L, L) + 1, 0.0), b(tri(L, L) + 1, 0.0), diag(L + 1, 0.0) {
    for (int m = 1; m <= L; ++m) diag[m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    for (int m = 0; m <= L; ++m)
      for (int l = m + 2; l <= L; ++l) {
        const double l2 = static_cast<double>(l) * l;
        const double m2 = static_cast<double>(m) * m;
        const double lm1 = static_cast<double>(l - 1) * (l - 1);
        a[tri(l, m)] = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
        b[tri(l, m)] = std::sqrt((lm1 - m2) / (4.0 * lm1 - 1.0));
      }
  }

  // Fills P[tri(l, m)] = Pbar_l^m(x) with x = cos t, s = sin t.
  void fill(double x, double s, std::vector<double>& P) const {
    P.assign(tri(lmax, lmax) + 1, 0.0);
    double pmm = 1.0 / std::sqrt(4.0 * kPi);
    for (int m = 0; m <= lmax; ++m) {
      if (m > 0) pmm *= diag[m] * s;
      P[tri(m, m)] = pmm;
      if (m + 1 <= lmax) P[tri(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * pmm;
      for (int l = m + 2; l <= lmax; ++l)
        P[tri(l, m)] = a[tri(l, m)] * (x * P[tri(l - 1, m)] - b[tri(l, m)] * P[tri(l - 2, m)]);
    }
  }
};

const LegendreTables& cached_tables(int lmax) {
  thread_local std::unique_ptr<LegendreTables> cache;
  if (!cache || cache->lmax != lmax) cache = std::make_unique<LegendreTables>(lmax);
  return *cache;
}

void check_resolution(const SphereGrid& grid, int lmax) {
  if (grid.nlat < lmax + 1 || grid.nlon < 2 * lmax + 1) {
    std::ostringstream msg;
    msg << "under-resolved grid: need nlat >= " << lmax + 1 << " and nlon >= " << 2 * lmax + 1 << ", got " << grid.nlat
        << " x " << grid.nlon;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

HarmonicSeries sht_forward(const SphereGrid& grid, const std::vector<double>& samples, int lmax) {
  check_resolution(grid, lmax);
  if (samples.size() != static_cast<std::size_t>(grid.nlat) * grid.nlon)
    throw std::invalid_argument("sht_forward: sample count does not match grid");
  const LegendreTables tables(lmax);
  const int nlon = grid.nlon;
  std::vector<double> cos_t(static_cast<std::size_t>(lmax + 1) * nlon), sin_t(cos_t.size());
  for (int mu = 0; mu <= lmax; ++mu)
    for (int j = 0; j < nlon; ++j) {
      const double ang = 2.0 * kPi * static_cast<double>((static_cast<long long>(mu) * j) % nlon) / nlon;
      cos_t[static_cast<std::size_t>(mu) * nlon + j] = std::cos(ang);
      sin_t[static_cast<std::size_t>(mu) * nlon + j] = std::sin(ang);
    }
  // Fixed chunking of rings keeps the summation order thread-independent.
  const int chunks = std::min(grid.nlat, 32);
  std::vector<HarmonicSeries> partial(chunks, HarmonicSeries(lmax));
  const double dphi = 2.0 * kPi / nlon;
  const double sqrt2 = std::numbers::sqrt2;
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    std::vector<double> P, A(lmax + 1), B(lmax + 1);
    HarmonicSeries& acc = partial[c];
    for (int i = static_cast<int>(c); i < grid.nlat; i += chunks) {
      const double* f = &samples[static_cast<std::size_t>(i) * nlon];
      for (int mu = 0; mu <= lmax; ++mu) {
        const double* ct = &cos_t[static_cast<std::size_t>(mu) * nlon];
        const double* st = &sin_t[static_cast<std::size_t>(mu) * nlon];
        double sa = 0.0, sb = 0.0;
        for (int j = 0; j < nlon; ++j) {
          sa += f[j] * ct[j];
          sb += f[j] * st[j];
        }
        A[mu] = sa * dphi * grid.weight[i];
        B[mu] = sb * dphi * grid.weight[i];
      }
      tables.fill(grid.cos_theta[i], grid.sin_theta[i], P);
      for (int l = 0; l <= lmax; ++l) {
        acc(l, 0) += A[0] * P[tri(l, 0)];
        for (int mu = 1; mu <= l; ++mu) {
          const double p = sqrt2 * P[tri(l, mu)];
          acc(l, mu) += A[mu] * p;
          acc(l, -mu) += B[mu] * p;
        }
      }
    }
  });
  HarmonicSeries out(lmax);
  for (const auto& part : partial)
    for (std::size_t k = 0; k < out.coefficients().size(); ++k) out.coefficients()[k] += part.coefficients()[k];
  return out;
}

std::vector<double> sht_inverse(const HarmonicSeries& series, const SphereGrid& grid) {
  const int lmax = series.lmax();
  check_resolution(grid, lmax);
  const LegendreTables tables(lmax);
  const int nlon = grid.nlon;
  std::vector<double> out(static_cast<std::size_t>(grid.nlat) * nlon);
  const double sqrt2 = std::numbers::sqrt2;
  parallel_for(static_cast<std::size_t>(grid.nlat), [&](std::size_t i) {
    std::vector<double> P, C(lmax + 1, 0.0), S(lmax + 1, 0.0);
    tables.fill(grid.cos_theta[i], grid.sin_theta[i], P);
    for (int mu = 0; mu <= lmax; ++mu) {
      double c = 0.0, s = 0.0;
      for (int l = mu; l <= lmax; ++l) {
        const double p = P[tri(l, mu)];
        c += series(l, mu) * p;
        if (mu > 0) s += series(l, -mu) * p;
      }
      C[mu] = mu == 0 ? c : sqrt2 * c;
      S[mu] = sqrt2 * s;
    }
    for (int j = 0; j < nlon; ++j) {
      double v = C[0];
      for (int mu = 1; mu <= lmax; ++mu) {
        const double ang = 2.0 * kPi * static_cast<double>((static_cast<long long>(mu) * j) % nlon) / nlon;
        v += C[mu] * std::cos(ang) + S[mu] * std::sin(ang);
      }
      out[i * nlon + j] = v;
    }
  });
  return out;
}

namespace {

struct SeriesPoint {
  double x, s, phi;
};

SeriesPoint spherical_coords(const S2Point& p) {
  const Vec3& v = p.coords();
  return {v.z(), std::hypot(v.x(), v.y()), std::atan2(v.y(), v.x())};
}

}  // namespace

double series_value(const HarmonicSeries& series, const S2Point& x) {
  const int lmax = series.lmax();
  const LegendreTables& tables = cached_tables(lmax);
  const SeriesPoint sp = spherical_coords(x);
  std::vector<double> P;
  tables.fill(sp.x, sp.s, P);
  KahanSum total;
  for (int mu = 0; mu <= lmax; ++mu) {
    double c = 0.0, s = 0.0;
    for (int l = mu; l <= lmax; ++l) {
      c += series(l, mu) * P[tri(l, mu)];
      if (mu > 0) s += series(l, -mu) * P[tri(l, mu)];
    }
    if (mu == 0)
      total.add(c);
    else
      total.add(std::numbers::sqrt2 * (c * std::cos(mu * sp.phi) + s * std::sin(mu * sp.phi)));
  }
  return total.value();
}

double spherical_harmonic(int l, int mu, const S2Point& x) {
  if (l < 0 || std::abs(mu) > l) throw std::invalid_argument("spherical_harmonic: need |mu| <= l");
  HarmonicSeries s(l);
  s(l, mu) = 1.0;
  return series_value(s, x);
}

Jet series_jet(const HarmonicSeries& series, const S2Point& x) {
  const int lmax = series.lmax();
  const SeriesPoint sp = spherical_coords(x);
  if (sp.s < 1e-6) throw std::domain_error("series jet undefined within 1e-6 of the coordinate poles");
  const LegendreTables& tables = cached_tables(lmax);
  std::vector<double> P;
  tables.fill(sp.x, sp.s, P);
  const double cot = sp.x / sp.s;
  // f, f_t, f_tt, f_p, f_tp, f_pp in spherical coordinates (t = colatitude, p = longitude)
  double f = 0, ft = 0, ftt = 0, fp = 0, ftp = 0, fpp = 0;
  for (int mu = 0; mu <= lmax; ++mu) {
    double c0 = 0, c1 = 0, c2 = 0, s0 = 0, s1 = 0, s2 = 0;
    for (int l = mu; l <= lmax; ++l) {
      const double p = P[tri(l, mu)];
      const double prev = l > mu ? P[tri(l - 1, mu)] : 0.0;
      const double cl = l > mu ? std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) * (static_cast<double>(l) * l - static_cast<double>(mu) * mu)) : 0.0;
      const double dp = -(l * sp.x * p - cl * prev) / sp.s;
      const double ddp = -cot * dp - (l * (l + 1.0) - mu * mu / (sp.s * sp.s)) * p;
      const double a = series(l, mu);
      c0 += a * p;
      c1 += a * dp;
      c2 += a * ddp;
      if (mu > 0) {
        const double b = series(l, -mu);
        s0 += b * p;
        s1 += b * dp;
        s2 += b * ddp;
      }
    }
    if (mu == 0) {
      f += c0;
      ft += c1;
      ftt += c2;
      continue;
    }
    const double k = std::numbers::sqrt2;
    const double cm = std::cos(mu * sp.phi), sm = std::sin(mu * sp.phi);
    f += k * (c0 * cm + s0 * sm);
    ft += k * (c1 * cm + s1 * sm);
    ftt += k * (c2 * cm + s2 * sm);
    fp += k * mu * (-c0 * sm + s0 * cm);
    ftp += k * mu * (-c1 * sm + s1 * cm);
    fpp += -k * mu * mu * (c0 * cm + s0 * sm);
  }
  const double cp = std::cos(sp.phi), spp = std::sin(sp.phi);
  const Vec3 et(sp.x * cp, sp.x * spp, -sp.s);
  const Vec3 ep(-spp, cp, 0.0);
  const double htt = ftt;
  const double htp = (ftp - cot * fp) / sp.s;
  const double hpp = (fpp + sp.s * sp.x * ft) / (sp.s * sp.s);
  Jet j;
  j.value = f;
  j.grad = ft * et + (fp / sp.s) * ep;
  j.hess = htt * et * et.transpose() + htp * (et * ep.transpose() + ep * et.transpose()) + hpp * ep * ep.transpose();
  return j;
}

HarmonicSeries apply_laplacian(const HarmonicSeries& f) {
  HarmonicSeries out = f;
  for (int l = 0; l <= f.lmax(); ++l)
    for (int mu = -l; mu <= l; ++mu) out(l, mu) *= -static_cast<double>(l) * (l + 1);
  return out;
}

HarmonicSeries apply_L(const HarmonicSeries& f) {
  HarmonicSeries out = f;
  for (int l = 0; l <= f.lmax(); ++l)
    for (int mu = -l; mu <= l; ++mu) out(l, mu) *= 2.0 - static_cast<double>(l) * (l + 1);
  return out;
}

KernelObstruction::KernelObstruction(const std::array<double, 3>& coefficients, double tol)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg.precision(3);
        msg << "kernel obstruction: degree-one coefficients (" << coefficients[0] << ", " << coefficients[1] << ", "
            << coefficients[2] << ") exceed tolerance " << tol;
        return msg.str();
      }()),
      coefficients_(coefficients) {}

HarmonicSeries solve_L(const HarmonicSeries& f, double tol_kernel) {
  if (f.lmax() >= 1) {
    const std::array<double, 3> k1{f(1, -1), f(1, 0), f(1, 1)};
    for (double c : k1)
      if (std::abs(c) > tol_kernel) throw KernelObstruction(k1, tol_kernel);
  }
  HarmonicSeries w(f.lmax());
  for (int l = 0; l <= f.lmax(); ++l) {
    if (l == 1) continue;
    const double eig = 2.0 - static_cast<double>(l) * (l + 1);
    for (int mu = -l; mu <= l; ++mu) w(l, mu) = f(l, mu) / eig;
  }
  return w;
}

}  // namespace canham
