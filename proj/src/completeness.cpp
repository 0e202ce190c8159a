#include "tracekit/completeness.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tracekit/errors.hpp"

namespace tracekit {

namespace {

constexpr double kPi = std::numbers::pi;

bool boundary_kind(OperatorKind k) { return k == OperatorKind::KD || k == OperatorKind::KN; }

// Per-mode weight: pairing amplitude squared, with lambda^{-2} on normal derivatives.
double mode_weight(OperatorKind kind, const TraceMode& m) {
  switch (kind) {
    case OperatorKind::KD:
    case OperatorKind::CN:
      return m.neumann_data * m.neumann_data / (m.frequency * m.frequency);
    case OperatorKind::KN:
    case OperatorKind::CD:
      return m.dirichlet_data * m.dirichlet_data;
  }
  return 0.0;
}

void check_compatible(OperatorKind kind, const ModeCatalog& c) {
  const bool rect = std::holds_alternative<RectangleLine>(c.geometry);
  if (boundary_kind(kind)) {
    if (rect)
      throw ConfigError(std::string("operator ") + to_string(kind) +
                        " acts on boundary traces; the rectangle models an interior line");
    const Boundary need = kind == OperatorKind::KD ? Boundary::Dirichlet : Boundary::Neumann;
    if (c.bc != need)
      throw ConfigError(std::string("operator ") + to_string(kind) + " needs a " + to_string(need) +
                        " catalog");
  } else if (!rect) {
    throw ConfigError(std::string("operator ") + to_string(kind) +
                      " needs the rectangle interior-line geometry");
  }
}

void check_interior_window(const RectangleLine& r, const Window& w) {
  const double bound = 2.0 * std::min(r.y0, r.b - r.y0) * 0.9;
  if (!(w.spec().epsilon < bound))
    throw ConfigError("window.epsilon: " + std::to_string(w.spec().epsilon) +
                      " is not below the returning-geodesic bound " + std::to_string(bound) +
                      " for this line");
}

// Transverse-mode normalisation |mode|^2 on the boundary / line.
double transverse_norm_sq(const Geometry& g) {
  if (std::holds_alternative<Disc>(g)) return 2.0 * kPi;
  if (auto* r = std::get_if<RectangleLine>(&g)) return 0.5 * r->a;
  return 1.0;
}

}  // namespace

const char* to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::KD: return "KD";
    case OperatorKind::KN: return "KN";
    case OperatorKind::CD: return "CD";
    case OperatorKind::CN: return "CN";
  }
  return "?";
}

double BoundarySignal::laplacian_eigenvalue(int index) const {
  if (std::holds_alternative<Disc>(geometry)) return static_cast<double>(index) * index;
  if (auto* r = std::get_if<RectangleLine>(&geometry)) {
    const double k = index * kPi / r->a;
    return k * k;
  }
  return 0.0;
}

std::complex<double> BoundarySignal::evaluate(double x) const {
  std::complex<double> v = 0.0;
  if (std::holds_alternative<Interval>(geometry)) {
    auto it = coefficients.find(x < 0.5 ? 0 : 1);
    return it == coefficients.end() ? v : it->second;
  }
  const auto* r = std::get_if<RectangleLine>(&geometry);
  for (const auto& [k, c] : coefficients) {
    if (r)
      v += c * std::sin(k * kPi * x / r->a);
    else
      v += c * std::polar(1.0, k * x);
  }
  return v;
}

MultiplierValue multiplier(OperatorKind kind, const ModeCatalog& c, const Window& w, int index,
                           double lambda, double prefactor) {
  check_compatible(kind, c);
  if (std::holds_alternative<Interval>(c.geometry))
    throw ConfigError("interval operators are 2x2 matrices; use interval_matrix");
  if (auto* r = std::get_if<RectangleLine>(&c.geometry)) check_interior_window(*r, w);
  if (prefactor == 0.0) prefactor = boundary_kind(kind) ? kBoundaryPrefactor : kInteriorPrefactor;
  // e^{-ik theta} shares the radial spectrum of e^{ik theta}
  if (std::holds_alternative<Disc>(c.geometry)) index = std::abs(index);

  auto modes = modes_in_window(c, index, lambda, w);
  const ModeGroup& g = c.group(index);
  std::vector<double> weights;
  weights.reserve(g.modes.size());
  for (const auto& m : g.modes) weights.push_back(mode_weight(kind, m));
  WindowSum s = window_sum(w, g.frequencies, weights, lambda);
  const double scale = prefactor * transverse_norm_sq(c.geometry);
  MultiplierValue out;
  out.value = scale * s.value;
  out.truncation_bound = scale * s.truncation_bound;
  out.negative_root_mass = scale * s.negative_root_mass;
  out.terms = modes.size();
  return out;
}

double multiplier_KD(const ModeCatalog& c, const Window& w, int k, double lambda) {
  return multiplier(OperatorKind::KD, c, w, k, lambda).value;
}

double multiplier_KN(const ModeCatalog& c, const Window& w, int k, double lambda) {
  return multiplier(OperatorKind::KN, c, w, k, lambda).value;
}

double multiplier_interior(const ModeCatalog& c, const Window& w, DataKind data, int m,
                           double lambda, double prefactor) {
  const auto kind = data == DataKind::DirichletData ? OperatorKind::CD : OperatorKind::CN;
  return multiplier(kind, c, w, m, lambda, prefactor).value;
}

std::array<double, 4> interval_matrix(OperatorKind kind, const ModeCatalog& c, const Window& w,
                                      double lambda) {
  check_compatible(kind, c);
  if (!std::holds_alternative<Interval>(c.geometry))
    throw ConfigError("interval_matrix needs the interval geometry");
  modes_in_window(c, 0, lambda, w);  // range check
  const ModeGroup& g = c.group(0);
  std::vector<double> same, cross;
  for (const auto& m : g.modes) {
    const double wt = mode_weight(kind, m);
    same.push_back(wt);
    cross.push_back(wt * m.far_sign);
  }
  const double d = kBoundaryPrefactor * window_sum(w, g.frequencies, same, lambda).value;
  const double x = kBoundaryPrefactor * window_sum(w, g.frequencies, cross, lambda).value;
  return {d, x, x, d};
}

AppliedSignal apply_operator(OperatorKind kind, const ModeCatalog& c, const BoundarySignal& phi,
                             double lambda, const Window& w) {
  if (phi.geometry.index() != c.geometry.index())
    throw ConfigError("apply_operator: signal geometry " + geometry_name(phi.geometry) +
                      " does not match catalog geometry " + geometry_name(c.geometry));
  check_compatible(kind, c);
  AppliedSignal out;
  out.signal.geometry = phi.geometry;

  if (std::holds_alternative<Interval>(c.geometry)) {
    for (const auto& [k, v] : phi.coefficients)
      if (k != 0 && k != 1) throw ConfigError("interval signals have keys 0 and 1 only");
    auto M = interval_matrix(kind, c, w, lambda);
    auto get = [&](int k) {
      auto it = phi.coefficients.find(k);
      return it == phi.coefficients.end() ? std::complex<double>(0.0) : it->second;
    };
    const auto p0 = get(0), p1 = get(1);
    out.signal.coefficients[0] = M[0] * p0 + M[1] * p1;
    out.signal.coefficients[1] = M[2] * p0 + M[3] * p1;
    out.sup_distance = std::max(std::abs(out.signal.coefficients[0] - p0),
                                std::abs(out.signal.coefficients[1] - p1));
    return out;
  }

  int top = 0;
  for (const auto& [k, v] : phi.coefficients) {
    MultiplierValue m = multiplier(kind, c, w, k, lambda);
    out.signal.coefficients[k] = m.value * v;
    out.truncation_bound += m.truncation_bound * std::abs(v);
    top = std::max(top, std::abs(k));
  }
  // Sup of the difference on a grid fine enough for the highest mode.
  const int n = std::max(256, 16 * (top + 1));
  const double span =
      std::holds_alternative<Disc>(c.geometry) ? 2.0 * kPi : std::get<RectangleLine>(c.geometry).a;
  for (int i = 0; i < n; ++i) {
    const double x = span * i / n;
    out.sup_distance = std::max(out.sup_distance, std::abs(out.signal.evaluate(x) - phi.evaluate(x)));
  }
  return out;
}

MultiplierSample make_sample(OperatorKind kind, int k, double lambda, double value) {
  MultiplierSample s;
  s.k = k;
  s.lambda = lambda;
  s.value = value;
  s.expected_leading = 1.0;
  const double kk = static_cast<double>(k) * k;
  if (kind == OperatorKind::KD)
    s.expected_second_order = -(4.0 * kk - 1.0) / 8.0;
  else if (kind == OperatorKind::KN)
    s.expected_second_order = (4.0 * kk - 3.0) / 8.0;
  s.residual = value - s.expected_leading - s.expected_second_order / (lambda * lambda);
  return s;
}

SecondOrderFit second_order_check(const std::vector<MultiplierSample>& samples,
                                  double curvature_coeff, OperatorKind kind) {
  if (kind != OperatorKind::KD && kind != OperatorKind::KN)
    throw ConfigError("second_order_check: only boundary operators carry a curvature term");
  if (samples.empty()) throw ConfigError("second_order_check: degenerate lambda set (no samples)");
  std::vector<MultiplierSample> s = samples;
  std::sort(s.begin(), s.end(),
            [](const MultiplierSample& a, const MultiplierSample& b) { return a.lambda < b.lambda; });
  for (const auto& x : s)
    if (x.k != s.front().k) throw ConfigError("second_order_check: samples mix transverse indices");
  for (size_t i = 1; i < s.size(); ++i)
    if (!(s[i].lambda > s[i - 1].lambda))
      throw ConfigError("second_order_check: degenerate lambda set (repeated lambda)");
  if (s.size() < 3) throw ConfigError("second_order_check: degenerate lambda set (need >= 3 values)");

  SecondOrderFit f;
  f.k = s.front().k;
  const double kk = static_cast<double>(f.k) * f.k;
  f.target = (kind == OperatorKind::KD ? -0.5 : 0.5) * (kk + curvature_coeff);
  for (const auto& x : s) {
    const double scaled = x.lambda * x.lambda * (x.value - 1.0);
    f.lambdas.push_back(x.lambda);
    f.scaled.push_back(scaled);
    f.deviations.push_back(scaled - f.target);
    f.sup_deviation = std::max(f.sup_deviation, std::abs(scaled - f.target));
  }
  // Least-squares slope of log|dev| against log(lambda).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    const double x = std::log(f.lambdas[i]);
    const double y = std::log(std::max(std::abs(f.deviations[i]), 1e-300));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  f.decay_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.min_shrink = INFINITY;
  for (size_t i = 1; i < s.size(); ++i) {
    const double ratio = std::abs(f.deviations[i - 1]) / std::abs(f.deviations[i]);
    const double doublings = std::log2(f.lambdas[i] / f.lambdas[i - 1]);
    f.min_shrink = std::min(f.min_shrink, std::pow(ratio, 1.0 / doublings));
  }
  return f;
}

double symbol_expected(OperatorKind kind, double eta) {
  const double q = 1.0 - eta * eta;
  // Boundary-value pairings (KN, CD) see (1 - eta^2)^{-1/2}; normal
  // derivatives (KD, CN) see (1 - eta^2)^{1/2}.
  if (kind == OperatorKind::KD || kind == OperatorKind::CN) return std::sqrt(q);
  return 1.0 / std::sqrt(q);
}

std::vector<SymbolPoint> symbol_scan(OperatorKind kind, const ModeCatalog& c, const Window& w,
                                     const std::vector<double>& eta_grid, double lambda) {
  if (lambda < 200.0) throw ConfigError("symbol_scan: lambda must be >= 200");
  std::vector<SymbolPoint> out;
  for (double eta : eta_grid) {
    if (!(eta >= 0.0 && eta <= 0.75))
      throw ConfigError("symbol_scan: eta " + std::to_string(eta) + " outside [0, 0.75]");
    SymbolPoint p;
    p.eta = eta;
    if (auto* r = std::get_if<RectangleLine>(&c.geometry)) {
      p.index = static_cast<int>(std::lround(eta * lambda * r->a / kPi));
      p.eta_quantized = p.index * kPi / (r->a * lambda);
    } else {
      p.index = static_cast<int>(std::lround(eta * lambda));
      p.eta_quantized = p.index / lambda;
    }
    if (!c.has_group(p.index))
      throw RangeError("symbol_scan: catalog lacks transverse index " + std::to_string(p.index) +
                       "; build it with indices up to ceil(0.8 lambda)");
    p.value = multiplier(kind, c, w, p.index, lambda).value;
    p.expected = symbol_expected(kind, eta);
    p.deviation = p.value - p.expected;
    out.push_back(p);
  }
  return out;
}

}  // namespace tracekit
