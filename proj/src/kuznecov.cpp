#include "tracekit/kuznecov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tracekit/errors.hpp"
#include "tracekit/quadrature.hpp"

namespace tracekit {

namespace {

constexpr double kPi = std::numbers::pi;

std::complex<double> coef(const BoundarySignal& phi, int k) {
  auto it = phi.coefficients.find(k);
  return it == phi.coefficients.end() ? std::complex<double>(0.0) : it->second;
}

double amplitude(const TraceMode& m, PairingKind p) {
  return p == PairingKind::NormalDerivative ? m.neumann_data : m.dirichlet_data;
}

double pairing_weight(const TraceMode& m, PairingKind p) {
  return p == PairingKind::NormalDerivative ? 1.0 / (m.frequency * m.frequency) : 1.0;
}

}  // namespace

PairingKind default_pairing(const ModeCatalog& c) {
  return c.bc == Boundary::Dirichlet ? PairingKind::NormalDerivative : PairingKind::Value;
}

double signal_norm_sq(const BoundarySignal& phi) {
  double s = 0.0;
  for (const auto& [k, v] : phi.coefficients) s += std::norm(v);
  if (std::holds_alternative<Disc>(phi.geometry)) return 2.0 * kPi * s;
  if (auto* r = std::get_if<RectangleLine>(&phi.geometry)) return 0.5 * r->a * s;
  return s;
}

std::vector<KuznecovTerm> kuznecov_terms(const ModeCatalog& c, const BoundarySignal& phi,
                                         PairingKind pairing) {
  if (phi.geometry.index() != c.geometry.index())
    throw ConfigError("kuznecov: signal and catalog geometries differ");
  std::vector<KuznecovTerm> out;
  auto push = [&](const TraceMode& m, double pair_sq) {
    if (pair_sq == 0.0) return;
    if (pairing == PairingKind::NormalDerivative && m.frequency == 0.0) return;
    out.push_back({m.frequency, pairing_weight(m, pairing) * pair_sq});
  };

  if (std::holds_alternative<Interval>(c.geometry)) {
    const auto p0 = coef(phi, 0), p1 = coef(phi, 1);
    for (const auto& m : c.group(0).modes) {
      const double a = amplitude(m, pairing);
      push(m, std::norm(p0 * a + p1 * (m.far_sign * a)));
    }
  } else if (auto* r = std::get_if<RectangleLine>(&c.geometry)) {
    for (const auto& [k, v] : phi.coefficients) {
      if (v == 0.0) continue;
      for (const auto& m : c.group(k).modes) {
        const double pair = amplitude(m, pairing) * 0.5 * r->a;
        push(m, std::norm(v) * pair * pair);
      }
    }
  } else {
    // e^{ik theta} and e^{-ik theta} share the frequency list of order |k|.
    std::map<int, double> weight_by_order;
    for (const auto& [k, v] : phi.coefficients) weight_by_order[std::abs(k)] += std::norm(v);
    for (const auto& [k, w2] : weight_by_order) {
      if (w2 == 0.0) continue;
      for (const auto& m : c.group(k).modes) {
        const double pair = 2.0 * kPi * amplitude(m, pairing);
        push(m, w2 * pair * pair);
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const KuznecovTerm& a, const KuznecovTerm& b) { return a.frequency < b.frequency; });
  return out;
}

PartialSumSeries kuznecov_series(const ModeCatalog& c, const BoundarySignal& phi,
                                 const std::vector<double>& grid, PairingKind pairing) {
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ConfigError("kuznecov: lambda grid must be ascending");
  if (!grid.empty() && grid.back() > c.upper_bound)
    throw RangeError("kuznecov: catalog reaches " + std::to_string(c.upper_bound) +
                     " but the grid needs " + std::to_string(grid.back()));
  auto terms = kuznecov_terms(c, phi, pairing);
  PartialSumSeries s;
  s.lambda_grid = grid;
  s.pairing = pairing;
  size_t j = 0;
  CompensatedSum acc;
  for (double lam : grid) {
    while (j < terms.size() && terms[j].frequency < lam) acc.add(terms[j++].value);
    s.values.push_back(acc.value());
  }
  return s;
}

PartialSumSeries kuznecov_series(const ModeCatalog& c, const BoundarySignal& phi,
                                 const std::vector<double>& grid) {
  return kuznecov_series(c, phi, grid, default_pairing(c));
}

FitResult fit_linear(const PartialSumSeries& s, double c_expected, double phi_norm_sq) {
  const auto& x = s.lambda_grid;
  const auto& y = s.values;
  if (x.size() < 10 || x.size() != y.size())
    throw ConfigError("fit_linear: degenerate grid (need >= 10 points)");
  if (!(x.front() > 0.0) || x.back() < 3.0 * x.front() * (1.0 - 1e-12))
    throw ConfigError("fit_linear: degenerate grid (need a 3x lambda range)");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  FitResult f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (size_t i = 0; i < x.size(); ++i)
    f.sup_residual = std::max(f.sup_residual, std::abs(y[i] - f.slope * x[i] - f.intercept));
  const double denom = c_expected * phi_norm_sq;
  f.slope_ratio = denom != 0.0 ? f.slope / denom : 0.0;
  return f;
}

std::pair<double, double> residual_quarters(const PartialSumSeries& s, const FitResult& f) {
  const size_t n = s.lambda_grid.size();
  double q3 = 0.0, q4 = 0.0;
  for (size_t i = n / 2; i < n; ++i) {
    const double r = std::abs(s.values[i] - f.slope * s.lambda_grid[i] - f.intercept);
    if (i < (3 * n) / 4)
      q3 = std::max(q3, r);
    else
      q4 = std::max(q4, r);
  }
  return {q3, q4};
}

double windowed_density(const ModeCatalog& c, const BoundarySignal& phi, const Window& w,
                        double lambda) {
  if (c.upper_bound < lambda + w.tail_radius())
    throw RangeError("windowed_density: catalog does not reach lambda + tail radius");
  auto terms = kuznecov_terms(c, phi, default_pairing(c));
  std::vector<double> centers, weights;
  for (const auto& t : terms) centers.push_back(t.frequency), weights.push_back(t.value);
  return window_sum(w, centers, weights, lambda).value;
}

std::size_t weyl_count(const ModeCatalog& c, double lambda) { return c.count_below(lambda); }

std::function<double(double)> truncated_quadratic(double s0) {
  return [s0](double s) {
    const double q = s / s0;
    return q < 1.0 ? 1.0 - q * q : 0.0;
  };
}

WeylResult local_weyl(const ModeCatalog& c, const std::function<double(double)>& symbol,
                      double support_max, double lambda) {
  if (!std::holds_alternative<Disc>(c.geometry)) throw ConfigError("local_weyl: disc only");
  if (!(support_max > 0.0 && support_max < 1.0))
    throw ConfigError("local_weyl: symbol support must end strictly below 1");
  for (int i = 0; i <= 1000; ++i) {
    const double s = support_max + (1.0 - support_max) * i / 1000.0;
    if (symbol(s) != 0.0) throw ConfigError("local_weyl: symbol does not vanish beyond its support");
  }
  if (c.upper_bound < lambda) throw RangeError("local_weyl: catalog does not reach lambda");
  for (int k = 0; k < lambda; ++k)
    if (!c.has_group(k))
      throw RangeError("local_weyl: catalog lacks angular order " + std::to_string(k));

  const bool dirichlet = c.bc == Boundary::Dirichlet;
  WeylResult out;
  CompensatedSum acc;
  for (const auto& [k, g] : c.groups) {
    for (const auto& m : g.modes) {
      if (m.frequency >= lambda) break;
      const int mult = multiplicity(c.geometry, m);
      out.count += static_cast<std::size_t>(mult);
      const double eta = m.frequency > 0.0 ? k / m.frequency : 0.0;
      const double a = symbol(eta);
      if (a == 0.0) continue;
      // h^2 |psi|^2 = 2 (Dirichlet); |omega|^2 = 2 lambda'^2/(lambda'^2 - k^2).
      const double norm = dirichlet ? 2.0 : 2.0 * kPi * m.dirichlet_data * m.dirichlet_data;
      acc.add(mult * norm * a);
    }
  }
  if (out.count == 0) throw RangeError("local_weyl: no eigenvalues below lambda");
  out.lhs = acc.value() / static_cast<double>(out.count);

  const auto rule = composite_gauss_legendre(0.0, support_max, 64, 32);
  CompensatedSum q;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double e = rule.nodes[i];
    const double wgt = dirichlet ? std::sqrt(1.0 - e * e) : 1.0 / std::sqrt(1.0 - e * e);
    q.add(rule.weights[i] * symbol(e) * wgt);
  }
  out.rhs = 8.0 / kPi * q.value();
  return out;
}

}  // namespace tracekit
