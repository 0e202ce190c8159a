#include "tracekit/window.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <string>

#include "tracekit/errors.hpp"
#include "tracekit/quadrature.hpp"

namespace tracekit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxPanels = 4096;

struct Nodes {
  std::vector<double> t, wt;  // wt = weight * rho_hat(t) / pi
  double abs_weight = 0.0;    // sum |wt|
};

// Panels of equal width over [0, eps]; the plateau edge is always a panel
// boundary so the integrand is smooth on every panel.
Nodes make_nodes(const WindowSpec& spec, int transition_panels) {
  const double a = spec.plateau_fraction * spec.epsilon;
  const double width = (spec.epsilon - a) / transition_panels;
  const int plateau_panels = std::max(1, static_cast<int>(std::ceil(a / width)));
  Nodes n;
  auto add = [&](const CompositeRule& r) {
    for (size_t i = 0; i < r.nodes.size(); ++i) {
      double v = r.weights[i] * plateau_profile(spec, r.nodes[i]) / kPi;
      n.t.push_back(r.nodes[i]);
      n.wt.push_back(v);
      n.abs_weight += std::abs(v);
    }
  };
  add(composite_gauss_legendre(0.0, a, plateau_panels, spec.quadrature_order));
  add(composite_gauss_legendre(a, spec.epsilon, transition_panels, spec.quadrature_order));
  return n;
}

struct Triple {
  double f0, f1, f2;
};

// rho, rho', rho'' at s.
Triple integrate(const Nodes& n, double s) {
  CompensatedSum s0, s1, s2;
  for (size_t i = 0; i < n.t.size(); ++i) {
    const double t = n.t[i];
    const double c = std::cos(s * t), sn = std::sin(s * t);
    s0.add(n.wt[i] * c);
    s1.add(-n.wt[i] * t * sn);
    s2.add(-n.wt[i] * t * t * c);
  }
  return {s0.value(), s1.value(), s2.value()};
}

double integrate_rho(const std::vector<double>& t, const std::vector<double>& wt, double s) {
  CompensatedSum acc;
  for (size_t i = 0; i < t.size(); ++i) acc.add(wt[i] * std::cos(s * t[i]));
  return acc.value();
}

}  // namespace

void WindowSpec::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw ConfigError("window.epsilon: must be positive");
  if (!(plateau_fraction > 0.0 && plateau_fraction < 1.0))
    throw ConfigError("window.plateau_fraction: must lie in (0, 1)");
  if (quadrature_order < 4 || quadrature_order > 128)
    throw ConfigError("window.quadrature_order: must lie in [4, 128]");
  if (!(tail_tolerance > 0.0 && tail_tolerance < 1.0))
    throw ConfigError("window.tail_tolerance: must lie in (0, 1)");
}

double smooth_step(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  // e^{-1/(1-s)} / (e^{-1/(1-s)} + e^{-1/s}) without under/overflow trouble.
  return 1.0 / (1.0 + std::exp(1.0 / (1.0 - s) - 1.0 / s));
}

double plateau_profile(const WindowSpec& spec, double t) {
  const double at = std::abs(t);
  const double a = spec.plateau_fraction * spec.epsilon;
  if (at <= a) return 1.0;
  if (at >= spec.epsilon) return 0.0;
  return smooth_step((at - a) / (spec.epsilon - a));
}

double Window::hermite(double s) const {
  // Quintic Hermite on the cell containing s (s >= 0, inside the extent).
  const double x = s / step_;
  size_t i = static_cast<size_t>(x);
  if (i + 1 >= c0_.size()) i = c0_.size() - 2;
  const double u = x - static_cast<double>(i);
  const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
  const double h = step_, hh = h * h;
  const double H0 = 1 - 10 * u3 + 15 * u4 - 6 * u5;
  const double H1 = u - 6 * u3 + 8 * u4 - 3 * u5;
  const double H2 = 0.5 * (u2 - 3 * u3 + 3 * u4 - u5);
  const double H3 = 0.5 * (u3 - 2 * u4 + u5);
  const double H4 = -4 * u3 + 7 * u4 - 3 * u5;
  const double H5 = 10 * u3 - 15 * u4 + 6 * u5;
  return c0_[i] * H0 + h * c1_[i] * H1 + hh * c2_[i] * H2 + c0_[i + 1] * H5 +
         h * c1_[i + 1] * H4 + hh * c2_[i + 1] * H3;
}

double Window::rho(double s) const {
  const double a = std::abs(s);
  if (a > tail_radius_) return 0.0;
  return hermite(a);
}

double Window::rho_untruncated(double s) const {
  const double a = std::abs(s);
  if (a <= cache_extent()) return hermite(a);
  return rho_quadrature(a);
}

double Window::rho_quadrature(double s) const {
  return integrate_rho(t_, wt_, std::abs(s));
}

Window build_window(const WindowSpec& spec) {
  spec.validate();
  const double eps = spec.epsilon;
  const double s_max = 1000.0 / eps;
  const double probes[] = {0.0, 1.0, 7.3, 31.0, 113.0, 401.0, s_max};

  // Double the panel count until successive results agree to rounding level.
  int panels = 4;
  Nodes cur = make_nodes(spec, panels);
  for (;;) {
    if (2 * panels > kMaxPanels)
      throw ConfigError("window: quadrature did not converge under panel doubling");
    Nodes next = make_nodes(spec, 2 * panels);
    bool ok = true;
    for (double s : probes) {
      double scale = 0.0;
      for (size_t i = 0; i < next.t.size(); ++i)
        scale += std::abs(next.wt[i]) * std::max(1.0, s * next.t[i]);
      if (std::abs(integrate_rho(cur.t, cur.wt, s) - integrate_rho(next.t, next.wt, s)) > 10.0 * DBL_EPSILON * scale) {
        ok = false;
        break;
      }
    }
    panels *= 2;
    cur = std::move(next);
    if (ok) break;
  }

  Window w;
  w.spec_ = spec;
  w.panels_ = panels;
  w.t_ = cur.t;
  w.wt_ = cur.wt;
  w.step_ = std::min(0.05, 0.075 / eps);

  // Outward scan on the cache grid. The radius is the first grid point past
  // the last exceedance; the scan continues until a stretch at least as long
  // as the radius (plus one oscillation period) is clean.
  const double period = 2.0 * kPi / eps;
  const double threshold = spec.tail_tolerance / 1.05;  // margin for inter-node peaks
  double last = 0.0;
  for (size_t i = 0;; ++i) {
    const double s = w.step_ * static_cast<double>(i);
    if (s > s_max)
      throw ConfigError("window: tail tolerance " + std::to_string(spec.tail_tolerance) +
                        " not reached within |s| <= " + std::to_string(s_max));
    Triple v = integrate(cur, s);
    w.c0_.push_back(v.f0);
    w.c1_.push_back(v.f1);
    w.c2_.push_back(v.f2);
    if (std::abs(v.f0) > threshold) last = s;
    if (s >= 2.0 * (last + w.step_) + period) break;
  }
  w.tail_radius_ = last + w.step_;

  double dc = 0.0;
  for (size_t i = 0; i < w.c0_.size(); ++i) {
    const double s = w.step_ * static_cast<double>(i);
    if (s >= w.tail_radius_ && s <= 2.0 * w.tail_radius_)
      dc = std::max(dc, std::abs(w.c0_[i]) * s * s * s * s);
  }
  w.decay_constant_ = dc;
  return w;
}

WindowSum window_sum(const Window& w, std::span<const double> centers,
                     std::span<const double> weights, double lambda) {
  WindowSum out;
  if (centers.size() != weights.size())
    throw ConfigError("window_sum: centers and weights differ in length");
  if (centers.empty()) return out;
  const double R = w.tail_radius();
  auto lo = std::lower_bound(centers.begin(), centers.end(), lambda - R);
  auto hi = std::upper_bound(centers.begin(), centers.end(), lambda + R);
  CompensatedSum acc;
  double max_w = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const size_t j = static_cast<size_t>(it - centers.begin());
    acc.add(weights[j] * w.rho(lambda - *it));
    ++out.terms;
  }
  out.value = acc.value();

  // Omitted centres that still lie within a doubled radius.
  auto plo = std::lower_bound(centers.begin(), centers.end(), lambda - 2.0 * R);
  auto phi = std::upper_bound(centers.begin(), centers.end(), lambda + 2.0 * R);
  size_t omitted = 0;
  for (auto it = plo; it != phi; ++it) {
    const size_t j = static_cast<size_t>(it - centers.begin());
    max_w = std::max(max_w, std::abs(weights[j]));
    if (it < lo || it >= hi) ++omitted;
  }
  out.truncation_bound = w.spec().tail_tolerance * static_cast<double>(omitted) * max_w;

  double neg = 0.0;
  for (auto it = centers.begin(); it != hi; ++it) {
    const size_t j = static_cast<size_t>(it - centers.begin());
    neg += std::abs(weights[j] * w.rho_untruncated(lambda + *it));
  }
  out.negative_root_mass = neg;
  return out;
}

double forward_transform(const Window& w, double t) {
  // Cell-wise 8-point Gauss on the cached interpolant.
  const auto& g = gauss_legendre(8);
  const double h = w.grid_step();
  const size_t cells = static_cast<size_t>(std::floor(w.cache_extent() / h));
  CompensatedSum acc;
  for (size_t c = 0; c < cells; ++c) {
    const double mid = (static_cast<double>(c) + 0.5) * h;
    for (size_t i = 0; i < g.nodes.size(); ++i) {
      const double s = mid + 0.5 * h * g.nodes[i];
      acc.add(0.5 * h * g.weights[i] * w.rho_untruncated(s) * std::cos(s * t));
    }
  }
  return 2.0 * acc.value();
}

}  // namespace tracekit
