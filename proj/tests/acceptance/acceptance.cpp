// Acceptance checks 1-11. `acceptance N` runs one criterion, `acceptance` runs
// all; one PASS/FAIL line per criterion, exit status 0 iff every one passed.
#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "tracekit/bessel.hpp"
#include "tracekit/completeness.hpp"
#include "tracekit/curvature.hpp"
#include "tracekit/kuznecov.hpp"
#include "tracekit/quadrature.hpp"

using namespace tracekit;

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kEpsilon = 0.5;
constexpr double kCalibrationMax = 50.0;          // 1, 2
constexpr double kIntervalTol = 1e-8;             // 3
constexpr double kUnsafeEpsilon = 1.5;            // 3
constexpr double kUnsafeMinDeviation = 1e-3;      // 3
constexpr double kShrinkPerDoubling = 1.7;        // 4
constexpr double kSymbolTolKD = 0.05;             // 5
constexpr double kSymbolTolKN = 0.08;             // 5
constexpr double kSymbolTolInterior = 0.05;       // 5
constexpr double kRectEpsilon = 0.4;              // 5, 6
constexpr double kInteriorTol = 0.02;             // 6
constexpr double kSlopeTol = 0.03;                // 7
constexpr double kTrendSlack = 0.05;              // 7: q4 <= (1 + slack) q3
constexpr double kWeylLo = 0.97, kWeylHi = 1.03;  // 8
constexpr double kExactTol = 1e-10;               // 9
constexpr double kSampledTol = 1e-6;              // 9
constexpr double kRichardsonOrder = 1.8;          // 10
constexpr double kCrossTol = 1e-2;                // 10
constexpr double kNormalisationTol = 1e-6;        // 11
constexpr double kRoundTripTol = 1e-8;            // 11

const std::vector<double> kLambdas = {100.0, 200.0, 400.0};

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

const Window& window(double eps = kEpsilon) {
  static std::map<double, Window> built;
  auto it = built.find(eps);
  if (it != built.end()) return it->second;
  WindowSpec s;
  s.epsilon = eps;
  return built.emplace(eps, build_window(s)).first->second;
}

double upper(double lam, const Window& w) { return std::ceil(lam + w.tail_radius()) + 1.0; }

Outcome poisson(Boundary bc) {
  const OperatorKind kind = bc == Boundary::Dirichlet ? OperatorKind::KD : OperatorKind::KN;
  const auto& w = window();
  auto cat = build_catalog(Disc{}, bc, 3, upper(400.0, w));
  const double C = std::abs(make_sample(kind, 0, 100.0, multiplier(kind, cat, w, 0, 100.0).value).residual) * 1e6;
  double worst = 0.0;
  int bad = 0;
  std::string where;
  for (int k = 0; k <= 3; ++k)
    for (double lam : kLambdas) {
      const double r = std::abs(make_sample(kind, k, lam, multiplier(kind, cat, w, k, lam).value).residual);
      const double ratio = r * lam * lam * lam / C;
      if (ratio > 1.0) ++bad, where += fmt(" (k=%d,lambda=%g: %.3f)", k, lam, ratio);
      worst = std::max(worst, ratio);
    }
  return {C <= kCalibrationMax && bad == 0,
          fmt("C=%.4g (<= %g); max |res| lambda^3 / C = %.4g (<= 1); %d of 12 points above", C, kCalibrationMax,
              worst, bad) +
              where};
}

Outcome interval_completeness() {
  auto cat = build_catalog(Interval{1.0}, Boundary::Dirichlet, 0,
                           std::max(upper(200.0, window()), upper(200.0, window(kUnsafeEpsilon))));
  const std::pair<double, double> phis[] = {{1, 0}, {0, 1}, {1, 1}};
  double worst = 0.0, unsafe_min = INFINITY;
  for (double lam : {60.0, 100.0, 200.0})
    for (auto [a, b] : phis) {
      BoundarySignal phi{Interval{1.0}, {{0, a}, {1, b}}};
      worst = std::max(worst, apply_operator(OperatorKind::KD, cat, phi, lam, window()).sup_distance);
      unsafe_min =
          std::min(unsafe_min, apply_operator(OperatorKind::KD, cat, phi, lam, window(kUnsafeEpsilon)).sup_distance);
    }
  return {worst <= kIntervalTol && unsafe_min >= kUnsafeMinDeviation,
          fmt("safe eps=%g: max sup|K phi - phi| = %.4g (<= %g); unsafe eps=%g: min deviation = %.4g (>= %g)",
              kEpsilon, worst, kIntervalTol, kUnsafeEpsilon, unsafe_min, kUnsafeMinDeviation)};
}

Outcome second_order() {
  const auto& w = window();
  double min_shrink = INFINITY;
  std::string parts;
  for (Boundary bc : {Boundary::Dirichlet, Boundary::Neumann}) {
    const OperatorKind kind = bc == Boundary::Dirichlet ? OperatorKind::KD : OperatorKind::KN;
    auto cat = build_catalog(Disc{}, bc, 3, upper(400.0, w));
    for (int k = 0; k <= 3; ++k) {
      std::vector<MultiplierSample> s;
      for (double lam : kLambdas) s.push_back(make_sample(kind, k, lam, multiplier(kind, cat, w, k, lam).value));
      auto f = second_order_check(s, bc == Boundary::Dirichlet ? -0.25 : -0.75, kind);
      min_shrink = std::min(min_shrink, f.min_shrink);
      parts += fmt(" %s%d:%.3g", to_string(kind), k, f.scaled.back());
    }
  }
  return {min_shrink >= kShrinkPerDoubling,
          fmt("min shrink per doubling = %.4g (>= %g); lambda^2(m-1) at 400:", min_shrink, kShrinkPerDoubling) + parts};
}

Outcome symbols() {
  const double lam = 300.0;
  std::vector<double> etas;
  for (int i = 1; i <= 7; ++i) etas.push_back(0.1 * i);
  // k = round(eta lambda) on the disc; m = round(eta lambda a / pi) = the same for a = pi
  std::vector<int> orders;
  for (double e : etas) orders.push_back(static_cast<int>(std::lround(e * lam)));
  struct Case {
    OperatorKind kind;
    const ModeCatalog* cat;
    const Window* w;
    double tol;
  };
  auto dd = build_catalog(Disc{}, Boundary::Dirichlet, orders, upper(lam, window()));
  auto dn = build_catalog(Disc{}, Boundary::Neumann, orders, upper(lam, window()));
  auto rc = build_catalog(RectangleLine{kPi, kPi, 0.37 * kPi}, Boundary::Dirichlet, orders,
                          upper(lam, window(kRectEpsilon)));
  const Case cases[] = {{OperatorKind::KD, &dd, &window(), kSymbolTolKD},
                        {OperatorKind::KN, &dn, &window(), kSymbolTolKN},
                        {OperatorKind::CD, &rc, &window(kRectEpsilon), kSymbolTolInterior},
                        {OperatorKind::CN, &rc, &window(kRectEpsilon), kSymbolTolInterior}};
  bool ok = true;
  std::string parts;
  for (const auto& c : cases) {
    double worst = 0.0;
    for (const auto& p : symbol_scan(c.kind, *c.cat, *c.w, etas, lam)) worst = std::max(worst, std::abs(p.deviation));
    ok = ok && worst <= c.tol;
    parts += fmt(" %s %.3g (<= %g);", to_string(c.kind), worst, c.tol);
  }
  return {ok, "max |m - symbol| at lambda=300:" + parts};
}

Outcome interior() {
  const auto& w = window(kRectEpsilon);
  auto cat = build_catalog(RectangleLine{kPi, kPi, 0.37 * kPi}, Boundary::Dirichlet, std::vector<int>{3},
                           upper(200.0, w));
  const double d = multiplier_interior(cat, w, DataKind::DirichletData, 3, 200.0);
  const double n = multiplier_interior(cat, w, DataKind::NeumannData, 3, 200.0);
  const double md = multiplier_interior(cat, w, DataKind::DirichletData, 3, 200.0, kPi / 2);
  const double mn = multiplier_interior(cat, w, DataKind::NeumannData, 3, 200.0, kPi / 2);
  const bool ok = std::abs(d - 1) <= kInteriorTol && std::abs(n - 1) <= kInteriorTol &&
                  std::abs(md - 0.5) <= kInteriorTol && std::abs(mn - 0.5) <= kInteriorTol;
  return {ok, fmt("C^D=%.6f C^N=%.6f (|.-1| <= %g); pi/2 mutant %.6f %.6f (|.-0.5| <= %g)", d, n, kInteriorTol, md,
                  mn, kInteriorTol)};
}

Outcome kuznecov() {
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(100.0 + 0.5 * i);
  auto disc = build_catalog(Disc{}, Boundary::Dirichlet, std::vector<int>{3}, 301.0);
  auto iv = build_catalog(Interval{1.0}, Boundary::Dirichlet, 0, 301.0);
  const std::pair<const ModeCatalog*, BoundarySignal> cases[] = {
      {&disc, BoundarySignal{Disc{}, {{3, 1.0}}}}, {&iv, BoundarySignal{Interval{1.0}, {{0, 1.0}, {1, 0.0}}}}};
  bool ok = true;
  std::string parts;
  for (const auto& [cat, phi] : cases) {
    auto s = kuznecov_series(*cat, phi, grid);
    auto f = fit_linear(s, kKuznecovBoundaryConstant, signal_norm_sq(phi));
    auto [q3, q4] = residual_quarters(s, f);
    ok = ok && std::abs(f.slope_ratio - 1) <= kSlopeTol && q4 <= (1 + kTrendSlack) * q3;
    parts += fmt(" %s: slope/expected=%.4f, sup residual q3=%.4g q4=%.4g;", geometry_name(cat->geometry).c_str(),
                 f.slope_ratio, q3, q4);
  }
  return {ok, fmt("|ratio-1| <= %g, q4 <= %.2f q3:", kSlopeTol, 1 + kTrendSlack) + parts};
}

Outcome weyl() {
  bool ok = true;
  std::string parts;
  for (Boundary bc : {Boundary::Dirichlet, Boundary::Neumann}) {
    auto cat = build_catalog(Disc{}, bc, 200, 201.0);
    auto r = local_weyl(cat, truncated_quadratic(0.7), 0.7, 200.0);
    const double q = r.lhs / r.rhs;
    ok = ok && q >= kWeylLo && q <= kWeylHi;
    parts += fmt(" %s lhs/rhs=%.4f;", to_string(bc), q);
  }
  return {ok, fmt("in [%g, %g]:", kWeylLo, kWeylHi) + parts};
}

Outcome curvature() {
  double exact = 0.0, sampled = 0.0;
  for (const Shape& sh : {Shape{Circle{1.0}}, Shape{SphereBoundary{1.0, 3}}, Shape{Cylinder{1.0}}}) {
    auto p = fermi_profile_for(sh);
    auto e = coefficients_match(sh, p);
    auto s = coefficients_match(sh, FermiProfile::sampled(p.k_fn, p.r_max));
    exact = std::max({exact, std::abs(e.delta_dirichlet), std::abs(e.delta_neumann)});
    sampled = std::max({sampled, std::abs(s.delta_dirichlet), std::abs(s.delta_neumann)});
  }
  return {exact <= kExactTol && sampled <= kSampledTol,
          fmt("exact max delta = %.3g (<= %g); sampled max delta = %.3g (<= %g)", exact, kExactTol, sampled,
              kSampledTol)};
}

Outcome ansatz() {
  const auto& w = window();
  auto cat = build_catalog(Disc{}, Boundary::Dirichlet, 3, upper(400.0, w));
  double min_order = INFINITY, worst = 0.0;
  for (int m = 0; m <= 3; ++m) {
    min_order = std::min(min_order, recurrence_convergence(m, 1e-3, 2).observed_order);
    const double coeff = ansatz_coefficient(m, Boundary::Dirichlet, 1e-3);
    const double scaled = 400.0 * 400.0 * (multiplier(OperatorKind::KD, cat, w, m, 400.0).value - 1.0);
    worst = std::max(worst, std::abs(scaled + coeff));
  }
  return {min_order >= kRichardsonOrder && worst <= kCrossTol,
          fmt("Richardson order min = %.4f (>= %g); max |lambda^2(m_D-1) + ansatz coeff| at 400 = %.3g (<= %g)",
              min_order, kRichardsonOrder, worst, kCrossTol)};
}

Outcome invariants() {
  int violations = 0;
  std::string parts;
  auto note = [&](const std::string& what, int v) {
    violations += v;
    parts += fmt(" %s:%d", what.c_str(), v);
  };
  const auto& w = window();

  int v = 0;
  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> us(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double s = us(rng);
    v += eval_rho(w, s) != eval_rho(w, -s);
  }
  note("evenness", v);

  {
    const double R = w.tail_radius();
    const long n = std::lround(2 * R / 1e-3);
    CompensatedSum acc;
    for (long i = 0; i <= n; ++i) acc.add((i == 0 || i == n ? 0.5 : 1.0) * eval_rho(w, -R + i * (2 * R / n)));
    note("normalisation", std::abs(acc.value() * (2 * R / n) - 1.0) > kNormalisationTol);
  }

  v = 0;
  for (int i = -50; i <= 50; ++i) {
    const double t = kEpsilon * i / 50.0;
    v += std::abs(forward_transform(w, t) - w.rho_hat(t)) > kRoundTripTol;
  }
  note("round-trip", v);

  v = 0;
  for (int k = 0; k <= 20; ++k) {
    try {
      verify_interlacing(find_zeros(k, ZeroKind::Dirichlet, 500), find_zeros(k, ZeroKind::Neumann, 500));
    } catch (const std::exception&) {
      ++v;
    }
  }
  note("interlacing", v);

  v = 0;
  {
    RectangleLine r{kPi, 2.0, 0.74};
    auto cat = build_catalog(r, Boundary::Dirichlet, 30, 90.0);
    for (int m = 1; m <= 30; ++m) {
      size_t brute = 0;
      for (int n = 1; n < 200; ++n) brute += std::hypot(m * kPi / r.a, n * kPi / r.b) <= 90.0;
      v += cat.has_group(m) ? cat.group(m).modes.size() != brute : brute != 0;
    }
    auto disc = build_catalog(Disc{}, Boundary::Dirichlet, 20, 300.0);
    for (int k = 0; k <= 20; ++k)
      v += std::abs(static_cast<double>(disc.group(k).modes.size()) - std::floor(300.0 / kPi - k / 2.0 + 0.25)) > 1.0;
  }
  note("catalog", v);

  v = 0;
  {
    auto cat = build_catalog(Disc{}, Boundary::Dirichlet, 4, upper(150.0, w));
    BoundarySignal a{Disc{}, {{1, {0.5, -1.0}}, {4, 0.25}}}, b{Disc{}, {{-2, 2.0}, {0, 1.0}, {1, 1.0}}};
    BoundarySignal ab{Disc{}, {{1, {1.5, -1.0}}, {4, 0.25}, {-2, 2.0}, {0, 1.0}}};
    for (double lam : {60.0, 150.0}) {
      auto ka = apply_operator(OperatorKind::KD, cat, a, lam, w).signal;
      auto kb = apply_operator(OperatorKind::KD, cat, b, lam, w).signal;
      auto kab = apply_operator(OperatorKind::KD, cat, ab, lam, w).signal;
      for (double th = 0.0; th < 2 * kPi; th += 0.05)
        v += std::abs(kab.evaluate(th) - ka.evaluate(th) - kb.evaluate(th)) > 1e-13;
      for (int k = 0; k <= 4; ++k) v += multiplier(OperatorKind::KD, cat, w, k, lam).value < 0.0;
    }
  }
  note("linearity/positivity", v);

  return {violations == 0, fmt("%d violations;", violations) + parts};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> c = {
      {"poisson-bessel dirichlet", [] { return poisson(Boundary::Dirichlet); }},
      {"poisson-bessel neumann", [] { return poisson(Boundary::Neumann); }},
      {"interval completeness", interval_completeness},
      {"second-order coefficients", second_order},
      {"semiclassical symbols", symbols},
      {"interior prefactor", interior},
      {"kuznecov slope", kuznecov},
      {"local weyl law", weyl},
      {"curvature identities", curvature},
      {"ansatz recurrence", ansatz},
      {"invariant suites", invariants}};
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (int i = 1; i <= static_cast<int>(criteria().size()); ++i) which.push_back(i);
  bool all = true;
  for (int n : which) {
    if (n < 1 || n > static_cast<int>(criteria().size())) {
      std::fprintf(stderr, "no criterion %d\n", n);
      return 2;
    }
    const auto& [name, fn] = criteria()[n - 1];
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", n, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
