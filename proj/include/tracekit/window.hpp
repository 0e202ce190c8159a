#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tracekit {

// Plateau window: rho_hat == 1 on |t| <= p*eps, 0 on |t| >= eps, smooth step
// in between. rho(s) = (1/pi) int_0^eps rho_hat(t) cos(st) dt, so that
// rho_hat(t) = int rho(s) e^{-ist} ds and int rho = 1.
struct WindowSpec {
  double epsilon = 0.5;
  double plateau_fraction = 0.05;
  int quadrature_order = 32;  // Gauss-Legendre points per panel
  double tail_tolerance = 1e-10;

  void validate() const;  // throws ConfigError
};

// C-infinity step falling from 1 (s <= 0) to 0 (s >= 1).
double smooth_step(double s);
double plateau_profile(const WindowSpec& spec, double t);

class Window {
 public:
  const WindowSpec& spec() const { return spec_; }
  // |rho(s)| <= tail_tolerance for |s| >= tail_radius.
  double tail_radius() const { return tail_radius_; }
  // max |rho(s)| s^4 over the scanned samples in [tail_radius, 2 tail_radius].
  double decay_constant() const { return decay_constant_; }
  int panels() const { return panels_; }
  double grid_step() const { return step_; }
  // Extent of the cached grid (>= 2 * tail_radius).
  double cache_extent() const { return step_ * static_cast<double>(c0_.size() - 1); }

  // Cached evaluation; exactly even, returns 0 beyond the tail radius.
  double rho(double s) const;
  // No truncation: cache inside its extent, quadrature beyond.
  double rho_untruncated(double s) const;
  // Direct quadrature of the defining integral.
  double rho_quadrature(double s) const;
  double rho_hat(double t) const { return plateau_profile(spec_, t); }

 private:
  friend Window build_window(const WindowSpec& spec);
  double hermite(double s) const;

  WindowSpec spec_;
  double tail_radius_ = 0.0;
  double decay_constant_ = 0.0;
  int panels_ = 0;
  double step_ = 0.0;
  std::vector<double> t_, wt_;       // nodes on [0, eps]; weight * rho_hat / pi
  std::vector<double> c0_, c1_, c2_;  // rho, rho', rho'' on the uniform grid
};

Window build_window(const WindowSpec& spec);

inline double eval_rho(const Window& w, double s) { return w.rho(s); }

struct WindowSum {
  double value = 0.0;
  // tail_tolerance * (#omitted centres within 2 tail radii) * max|weight|
  double truncation_bound = 0.0;
  // sum |w_j rho(lambda + c_j)| over centres up to lambda + tail radius; these
  // mirror-image terms are not part of the sum.
  double negative_root_mass = 0.0;
  std::size_t terms = 0;
};

// sum_j weights[j] * rho(lambda - centers[j]) over |lambda - c_j| <= tail radius.
// `centers` must be ascending.
WindowSum window_sum(const Window& w, std::span<const double> centers,
                     std::span<const double> weights, double lambda);

// 2 int_0^extent rho(s) cos(st) ds from the cached samples.
double forward_transform(const Window& w, double t);

}  // namespace tracekit
