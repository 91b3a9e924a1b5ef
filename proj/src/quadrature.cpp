#include "canham/quadrature.hpp"

#include "canham/parallel.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace canham {

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    auto rule = std::make_unique<GaussRule>();
    gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
    rule->x.resize(n);
    rule->w.resize(n);
    for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &rule->x[i], &rule->w[i], table);
    gsl_integration_glfixed_table_free(table);
    // The library rule drifts by ~1e-10 at a few hundred nodes; polish each
    // node with Newton steps on the three-term recurrence and mirror the rule
    // so it is exactly symmetric.
    for (int i = 0; i < n; ++i) {
      if (rule->x[i] < 0.0) continue;
      double x = rule->x[i], dp = 0.0;
      for (int iter = 0; iter < 3; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        x -= p1 / dp;
      }
      rule->x[i] = x;
      rule->w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
      rule->x[n - 1 - i] = -x;
      rule->w[n - 1 - i] = rule->w[i];
    }
    if (n % 2 == 1) rule->x[n / 2] = 0.0;
    slot = std::move(rule);
  }
  return *slot;
}

void append_gauss(double a, double b, int n, std::vector<Node>& out) {
  const GaussRule& g = gauss_legendre(n);
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) out.push_back({c + h * g.x[i], h * g.w[i]});
}

QuadratureSpec QuadratureSpec::doubled() const {
  QuadratureSpec d = *this;
  d.radial_nodes *= 2;
  d.angular_nodes *= 2;
  d.transition_subpanels *= 2;
  d.bridge_s_nodes *= 2;
  d.bridge_theta_nodes *= 2;
  d.boundary_nodes *= 2;
  return d;
}

PolarFrame::PolarFrame(const Vec3& center) : p(center.normalized()) {
  Vec3 up = Vec3::UnitZ() - p.z() * p;
  if (up.norm() < 1e-8) up = Vec3::UnitX() - p.x() * p;
  eb = up.normalized();
  ea = eb.cross(p);
}

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Node> theta_nodes(const PolarCell& cell, const QuadratureSpec& spec) {
  std::vector<Node> nodes;
  if (cell.theta_panels.empty()) {
    const int n = 4 * spec.angular_nodes;
    for (int i = 0; i < n; ++i) nodes.push_back({2.0 * kPi * (i + 0.5) / n, 2.0 * kPi / n});
  } else {
    for (const auto& [a, b] : cell.theta_panels) append_gauss(a, b, spec.angular_nodes, nodes);
  }
  return nodes;
}

std::vector<Node> radial_nodes(const PolarCell& cell, const QuadratureSpec& spec, double rho_max) {
  std::vector<double> breaks{cell.rho_min};
  for (double b : cell.radial_breaks)
    if (b > cell.rho_min && b < rho_max) breaks.push_back(b);
  breaks.push_back(rho_max);
  std::sort(breaks.begin(), breaks.end());
  std::vector<Node> nodes;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double r0 = breaks[i];
    const double r1 = breaks[i + 1];
    if (!(r1 > r0)) continue;
    int pieces = 1;
    bool geometric = false;
    for (const auto& [a, b] : cell.subdivided)
      if (std::abs(a - r0) <= 1e-14 * std::max(1.0, std::abs(a)) && std::abs(b - r1) <= 1e-14 * std::max(1.0, std::abs(b)))
        pieces = spec.transition_subpanels;
    if (pieces == 1 && cell.log_outer && r0 > 0.0) {
      const double span = std::log(r1 / r0);
      if (span > spec.log_panel_width) {
        pieces = static_cast<int>(std::ceil(span / spec.log_panel_width));
        geometric = true;
      }
    }
    for (int k = 0; k < pieces; ++k) {
      double a, b;
      if (geometric) {
        a = r0 * std::pow(r1 / r0, static_cast<double>(k) / pieces);
        b = k + 1 == pieces ? r1 : r0 * std::pow(r1 / r0, static_cast<double>(k + 1) / pieces);
      } else {
        a = r0 + (r1 - r0) * k / pieces;
        b = k + 1 == pieces ? r1 : r0 + (r1 - r0) * (k + 1) / pieces;
      }
      append_gauss(a, b, spec.radial_nodes, nodes);
    }
  }
  return nodes;
}

struct WorkItem {
  const PolarCell* cell;
  Node theta;
};

std::vector<WorkItem> work_items(const Region& region, const QuadratureSpec& spec) {
  std::vector<WorkItem> items;
  for (const auto& cell : region.cells)
    for (const Node& t : theta_nodes(cell, spec)) items.push_back({&cell, t});
  return items;
}

}  // namespace

IntegralResult integrate(const Region& region, const QuadratureSpec& spec, const Integrand& f) {
  const std::vector<WorkItem> items = work_items(region, spec);
  std::vector<std::array<KahanSum, kSampleSize>> partial(items.size());
  std::vector<std::size_t> counts(items.size(), 0);
  parallel_for(items.size(), [&](std::size_t i) {
    const WorkItem& item = items[i];
    const double theta = item.theta.x;
    const double rmax = item.cell->rho_max(theta);
    for (const Node& r : radial_nodes(*item.cell, spec, rmax)) {
      const double w = item.theta.w * r.w * std::sin(r.x);
      const Sample s = f(item.cell->frame.point(r.x, theta));
      for (int k = 0; k < kSampleSize; ++k) partial[i][k].add(w * s[k]);
      ++counts[i];
    }
  });
  IntegralResult out;
  std::array<KahanSum, kSampleSize> total;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (int k = 0; k < kSampleSize; ++k) total[k].merge(partial[i][k]);
    out.nodes += counts[i];
  }
  for (int k = 0; k < kSampleSize; ++k) {
    out.value[k] = total[k].value();
    out.abs_total[k] = total[k].abs_total();
  }
  return out;
}

void visit_nodes(const Region& region, const QuadratureSpec& spec,
                 const std::function<void(const S2Point&, double)>& visitor) {
  for (const WorkItem& item : work_items(region, spec)) {
    const double theta = item.theta.x;
    const double rmax = item.cell->rho_max(theta);
    for (const Node& r : radial_nodes(*item.cell, spec, rmax))
      visitor(item.cell->frame.point(r.x, theta), item.theta.w * r.w * std::sin(r.x));
  }
}

Region Region::sphere() {
  Region region;
  PolarCell cell(PolarFrame(Vec3::UnitZ()));
  cell.rho_min = 0.0;
  cell.rho_max = [](double) { return kPi; };
  cell.radial_breaks = {kPi / 4, kPi / 2, 3 * kPi / 4};
  region.cells.push_back(cell);
  region.area = 4.0 * kPi;
  return region;
}

Region Region::annulus(const S2Point& center, double r0, double r1) {
  if (!(0.0 <= r0 && r0 < r1 && r1 <= kPi)) throw std::invalid_argument("annulus: need 0 <= r0 < r1 <= pi");
  Region region;
  PolarCell cell(PolarFrame(center.coords()));
  cell.rho_min = r0;
  cell.rho_max = [r1](double) { return r1; };
  region.cells.push_back(cell);
  if (r1 < kPi) region.boundary.push_back({cell.frame, r1, +1});
  if (r0 > 0.0) region.boundary.push_back({cell.frame, r0, -1});
  region.area = 4.0 * kPi * std::sin(0.5 * (r1 + r0)) * std::sin(0.5 * (r1 - r0));
  return region;
}

Region Region::punctured(const std::vector<S2Point>& points, double hole, std::vector<double> breaks,
                         std::vector<std::pair<double, double>> subdivided) {
  const std::size_t m = points.size();
  if (m == 0) throw std::invalid_argument("empty point set");
  Region region;
  const double beta = kPi / static_cast<double>(m);
  for (const auto& p : points) {
    PolarCell cell(PolarFrame(p.coords()));
    cell.rho_min = hole;
    cell.radial_breaks = breaks;
    cell.subdivided = subdivided;
    cell.log_outer = true;
    if (m == 1) {
      cell.rho_max = [](double) { return kPi; };
    } else if (m == 2) {
      cell.rho_max = [](double) { return kPi / 2; };
    } else {
      const double tb = std::tan(beta);
      cell.rho_max = [tb](double theta) {
        const double c = std::abs(std::cos(theta));
        return std::atan2(tb, c);
      };
      cell.theta_panels = {{-kPi / 2, 0.0}, {0.0, kPi / 2}, {kPi / 2, kPi}, {kPi, 3 * kPi / 2}};
    }
    region.boundary.push_back({cell.frame, hole, -1});
    region.cells.push_back(std::move(cell));
  }
  const double sh = std::sin(0.5 * hole);
  region.area = 4.0 * kPi - static_cast<double>(m) * 4.0 * kPi * sh * sh;
  return region;
}

}  // namespace canham
