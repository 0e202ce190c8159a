#include "tracekit/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "tracekit/errors.hpp"

namespace tracekit {

double CurvatureData::dirichlet_coefficient() const {
  const double n1 = dim_n - 1.0;
  return 0.25 * n1 * n1 * mean_H * mean_H - 0.5 * trace_II_sq;
}

double CurvatureData::neumann_coefficient() const {
  const double n1 = dim_n - 1.0, n2 = dim_n - 2.0;
  return -0.75 * n1 * n1 * mean_H * mean_H + 0.5 * n1 * n2 * scalar_K;
}

double CurvatureData::trace_identity_residual() const {
  const double n1 = dim_n - 1.0, n2 = dim_n - 2.0;
  return trace_II_sq - (n1 * n1 * mean_H * mean_H - n1 * n2 * scalar_K);
}

std::string shape_name(const Shape& s) {
  switch (s.index()) {
    case 0: return "sphere";
    case 1: return "circle";
    default: return "cylinder";
  }
}

namespace {

// Build from principal curvatures; K solves the trace identity.
CurvatureData from_principal(int n, const std::vector<double>& kappa) {
  CurvatureData c;
  c.dim_n = n;
  double sum = 0.0, sq = 0.0;
  for (double k : kappa) sum += k, sq += k * k;
  c.mean_H = sum / (n - 1.0);
  c.trace_II_sq = sq;
  const double n1 = n - 1.0, n2 = n - 2.0;
  c.scalar_K = n > 2 ? (n1 * n1 * c.mean_H * c.mean_H - sq) / (n1 * n2) : 0.0;
  return c;
}

double check_radius(double R) {
  if (!(R > 0.0)) throw ConfigError("shape.radius: must be positive");
  return R;
}

}  // namespace

CurvatureData shape_curvature(const Shape& s) {
  if (auto* sp = std::get_if<SphereBoundary>(&s)) {
    const double R = check_radius(sp->radius);
    if (sp->dim_n < 2) throw ConfigError("shape.dim: must be >= 2");
    return from_principal(sp->dim_n, std::vector<double>(sp->dim_n - 1, 1.0 / R));
  }
  if (auto* c = std::get_if<Circle>(&s)) return from_principal(2, {1.0 / check_radius(c->radius)});
  const auto& cy = std::get<Cylinder>(s);
  return from_principal(3, {1.0 / check_radius(cy.radius), 0.0});
}

FermiProfile FermiProfile::power_law(double c, double R, double alpha) {
  if (!(c > 0.0)) throw ConfigError("profile: k(0) must be positive");
  FermiProfile p;
  p.power = PowerLaw{c, R, alpha};
  p.k_fn = [c, R, alpha](double r) { return c * std::pow(1.0 - r / R, alpha); };
  p.r_max = 0.5 * R;
  return p;
}

FermiProfile FermiProfile::sampled(std::function<double(double)> fn, double r_max, double step) {
  if (!(step > 0.0 && step <= 1e-4)) throw ConfigError("profile.step: must lie in (0, 1e-4]");
  if (!(r_max > 0.0)) throw ConfigError("profile.r_max: must be positive");
  FermiProfile p;
  p.k_fn = std::move(fn);
  p.r_max = r_max;
  p.step = step;
  if (!(p.k_fn(0.0) > 0.0)) throw ConfigError("profile: k(0) must be positive");
  return p;
}

FermiProfile fermi_profile_for(const Shape& s) {
  if (auto* sp = std::get_if<SphereBoundary>(&s))
    return FermiProfile::power_law(1.0, check_radius(sp->radius), 0.5 * (sp->dim_n - 1));
  if (auto* c = std::get_if<Circle>(&s)) return FermiProfile::power_law(1.0, check_radius(c->radius), 0.5);
  return FermiProfile::power_law(1.0, check_radius(std::get<Cylinder>(s).radius), 0.5);
}

FermiCoefficients fermi_coefficients(const FermiProfile& p) {
  double k0, k1, k2;
  if (p.power) {
    const auto& q = *p.power;
    k0 = q.c;
    k1 = -q.c * q.alpha / q.R;
    k2 = q.c * q.alpha * (q.alpha - 1.0) / (q.R * q.R);
  } else {
    // Central stencils straddle r = 0, so the profile is evaluated slightly
    // outside the domain; smooth profiles extend naturally.
    auto d = [&](double h, double* d1, double* d2) {
      const double fm2 = p.k_fn(-2 * h), fm1 = p.k_fn(-h), f0 = p.k_fn(0.0), f1 = p.k_fn(h),
                   f2 = p.k_fn(2 * h);
      *d1 = (-f2 + 8 * f1 - 8 * fm1 + fm2) / (12 * h);
      *d2 = (-f2 + 16 * f1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h);
    };
    double a1, a2, b1, b2;
    d(p.step, &a1, &a2);
    d(2 * p.step, &b1, &b2);
    if (std::abs(a1 - b1) > 1e-6 * (1 + std::abs(a1)) || std::abs(a2 - b2) > 1e-6 * (1 + std::abs(a2)))
      throw DataError("profile samples are not smooth at r = 0 (difference stencils disagree)");
    k0 = p.k_fn(0.0);
    k1 = a1;
    k2 = a2;
  }
  if (!(k0 > 0.0)) throw DataError("profile: k(0) must be positive");
  return {k2 / k0, (k0 * k2 - 2 * k1 * k1) / (k0 * k0)};
}

CoefficientMatch coefficients_match(const Shape& s, const FermiProfile& p) {
  CoefficientMatch m;
  m.geometry = shape_curvature(s);
  m.fermi = fermi_coefficients(p);
  m.delta_dirichlet = m.fermi.dirichlet - m.geometry.dirichlet_coefficient();
  m.delta_neumann = m.fermi.neumann - m.geometry.neumann_coefficient();
  m.tolerance = p.power ? 1e-10 : 1e-6;
  m.passed = std::abs(m.delta_dirichlet) <= m.tolerance && std::abs(m.delta_neumann) <= m.tolerance &&
             std::abs(m.geometry.trace_identity_residual()) <= 1e-12;
  return m;
}

// --- radial ansatz ---------------------------------------------------------

namespace {

// Second derivative, central inside, one-sided O(h^2) at the ends.
std::vector<double> second_diff(const std::vector<double>& f, double h) {
  const size_t n = f.size();
  std::vector<double> d(n);
  const double hh = h * h;
  for (size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2 * f[i] + f[i - 1]) / hh;
  d[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / hh;
  d[n - 1] = (2 * f[n - 1] - 5 * f[n - 2] + 4 * f[n - 3] - f[n - 4]) / hh;
  return d;
}

// Cumulative integral from 0: Simpson on even nodes, a three-point panel
// rule for the odd ones.
std::vector<double> cumulative_simpson(const std::vector<double>& f, double h) {
  const size_t n = f.size();
  std::vector<double> I(n, 0.0);
  for (size_t i = 2; i < n; i += 2) I[i] = I[i - 2] + h / 3.0 * (f[i - 2] + 4 * f[i - 1] + f[i]);
  for (size_t i = 1; i < n; i += 2) {
    if (i + 1 < n)
      I[i] = I[i - 1] + h / 12.0 * (5 * f[i - 1] + 8 * f[i] - f[i + 1]);
    else
      I[i] = I[i - 1] + h / 12.0 * (-f[i - 2] + 8 * f[i - 1] + 5 * f[i]);
  }
  return I;
}

double d_at_zero(const std::vector<double>& f, double h) {
  return (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
}

}  // namespace

namespace {
AnsatzGrid build_grid(int m, int N, Boundary bc, double step, double r_max = 0.5);
}

AnsatzGrid build_ansatz(int m, int N, Boundary bc, double step, double r_max) {
  if (!(step > 0.0 && step <= 1e-3)) throw ConfigError("ansatz.step: must lie in (0, 1e-3]");
  return build_grid(m, N, bc, step, r_max);
}

namespace {
// No step cap: the accuracy check also needs the doubled step.
AnsatzGrid build_grid(int m, int N, Boundary bc, double step, double r_max) {
  if (!(r_max > 0.0 && r_max <= 0.5)) throw ConfigError("ansatz.r_max: must lie in (0, 0.5]");
  if (N < 1 || N > 3) throw ConfigError("ansatz.N: must lie in [1, 3]");
  if (bc == Boundary::Neumann && N < 2) throw ConfigError("ansatz.N: Neumann ansatz needs N >= 2");
  AnsatzGrid g;
  g.step = step;
  g.m = m;
  g.order = N;
  g.bc = bc;
  const size_t n = static_cast<size_t>(std::llround(r_max / step)) + 1;
  if (n < 8) throw ConfigError("ansatz: grid too small");
  const double am = std::abs(m);
  const double vcoef = am * am - 0.25;
  g.r.resize(n);
  g.potential.resize(n);
  for (size_t i = 0; i < n; ++i) {
    g.r[i] = step * static_cast<double>(i);
    const double q = 1.0 - g.r[i];
    g.potential[i] = vcoef / (q * q);
  }
  auto apply_P = [&](const std::vector<double>& b) {
    auto d2 = second_diff(b, step);
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = -d2[i] + g.potential[i] * b[i];
    return out;
  };
  g.b.assign(N + 1, std::vector<double>(n, 0.0));
  g.Pb.assign(N + 1, std::vector<double>(n, 0.0));

  if (bc == Boundary::Dirichlet) {
    // b_0 = kw - (kw)(0), kw = (1 - r)^{|m| + 1/2}.
    for (size_t i = 0; i < n; ++i) g.b[0][i] = std::pow(1.0 - g.r[i], am + 0.5) - 1.0;
    g.Pb[0] = apply_P(g.b[0]);
    for (int j = 1; j <= N; ++j) {
      auto I = cumulative_simpson(g.Pb[j - 1], step);
      for (size_t i = 0; i < n; ++i) g.b[j][i] = -I[i] / (2.0 * j);
      g.Pb[j] = apply_P(g.b[j]);
    }
  } else {
    // k(0) = 1, k'(0)/k(0) = -1/2, w'(0) = -|m|. b_0 is unused (zero).
    const double dk_over_k = -0.5;
    for (size_t i = 0; i < n; ++i) g.b[1][i] = -am;
    g.Pb[1] = apply_P(g.b[1]);
    for (int j = 2; j <= N; ++j) {
      const double at0 = (d_at_zero(g.b[j - 1], step) - dk_over_k * g.b[j - 1][0]) / j;
      auto I = cumulative_simpson(g.Pb[j - 1], step);
      for (size_t i = 0; i < n; ++i) g.b[j][i] = at0 - I[i] / (2.0 * j);
      g.Pb[j] = apply_P(g.b[j]);
    }
  }
  return g;
}
}  // namespace

double AnsatzGrid::coefficient() const {
  if (bc == Boundary::Dirichlet) return d_at_zero(b[1], step);  // k(0) = 1
  if (order < 3) throw ConfigError("ansatz: the Neumann coefficient needs N = 3");
  if (m == 0) throw ConfigError("ansatz: the Neumann coefficient needs m != 0 (phi = |m| w-derivative)");
  return 6.0 * b[3][0] / std::abs(m);
}

double AnsatzGrid::recurrence_residual() const {
  double worst = 0.0;
  for (size_t i = 1; i + 1 < r.size(); ++i) {
    const double d1 = (b[1][i + 1] - b[1][i - 1]) / (2 * step);
    worst = std::max(worst, std::abs(d1 + 0.5 * Pb[0][i]));
  }
  return worst;
}

double ansatz_expected(int m, Boundary bc) {
  const double mm = static_cast<double>(m) * m;
  return bc == Boundary::Dirichlet ? 0.5 * (mm - 0.25) : 0.5 * (mm - 0.75);
}

double ansatz_coefficient(int m, Boundary bc, double step) {
  const int N = bc == Boundary::Dirichlet ? 1 : 3;
  const double fine = build_ansatz(m, N, bc, step).coefficient();
  const double coarse = build_grid(m, N, bc, 2 * step).coefficient();
  // Both are O(h^2); their difference estimates three times the fine error.
  if (std::abs(fine - coarse) > 1e-3 * (1.0 + std::abs(fine)))
    throw AccuracyError("ansatz: step " + std::to_string(step) +
                        " too coarse (coefficient changes by " + std::to_string(fine - coarse) +
                        " under step doubling)");
  return fine;
}

RichardsonResult recurrence_convergence(int m, double step, int halvings) {
  RichardsonResult out;
  double h = step;
  for (int i = 0; i <= halvings; ++i, h *= 0.5) {
    out.steps.push_back(h);
    out.residuals.push_back(build_ansatz(m, 1, Boundary::Dirichlet, h).recurrence_residual());
  }
  out.observed_order = INFINITY;
  for (size_t i = 1; i < out.residuals.size(); ++i)
    out.observed_order = std::min(out.observed_order, std::log2(out.residuals[i - 1] / out.residuals[i]));
  return out;
}

}  // namespace tracekit
