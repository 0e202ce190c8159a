#include "tracekit/bessel.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "tracekit/errors.hpp"
#include "tracekit/quadrature.hpp"

namespace tracekit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPanelPoints = 32;

void check_range(int k, double x) {
  if (k < 0 || k > kMaxBesselOrder)
    throw RangeError("bessel: order " + std::to_string(k) + " outside [0, " +
                     std::to_string(kMaxBesselOrder) + "]");
  if (!(x >= 0.0) || x > kMaxBesselArgument)
    throw RangeError("bessel: argument " + std::to_string(x) + " outside [0, " +
                     std::to_string(kMaxBesselArgument) + "]");
}

// Brent's method on a sign-changing bracket, iterated to rounding level.
double refine_root(const std::function<double(double)>& f, double a, double b, double fa,
                   double fb) {
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < 200; ++it) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * DBL_EPSILON * std::abs(b);
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      // Secant / inverse quadratic step.
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0)
        q = -q;
      else
        p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
    fb = f(b);
  }
  return b;
}

}  // namespace

const char* to_string(ZeroKind kind) {
  return kind == ZeroKind::Dirichlet ? "dirichlet" : "neumann";
}

double bessel_j(int k, double x) {
  check_range(k, x);
  if (x == 0.0) return k == 0 ? 1.0 : 0.0;
  static const GaussLegendre& g = gauss_legendre(kPanelPoints);
  const int total = 64 + 8 * static_cast<int>(std::ceil((k + x) / kPi));
  const int panels = (total + kPanelPoints - 1) / kPanelPoints;
  const double h = kPi / panels;
  CompensatedSum acc;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    double part = 0.0;
    for (int i = 0; i < kPanelPoints; ++i) {
      const double tau = mid + 0.5 * h * g.nodes[i];
      part += g.weights[i] * std::cos(k * tau - x * std::sin(tau));
    }
    acc.add(part);
  }
  return 0.5 * h * acc.value() / kPi;
}

double bessel_j_prime(int k, double x) {
  check_range(k, x);
  if (k == 0) return -bessel_j(1, x);
  if (k == kMaxBesselOrder) throw RangeError("bessel: derivative needs order k + 1");
  return 0.5 * (bessel_j(k - 1, x) - bessel_j(k + 1, x));
}

double mcmahon_estimate(int k, int l, ZeroKind kind) {
  const double mu = 4.0 * k * k;
  if (kind == ZeroKind::Dirichlet) {
    const double beta = (l + 0.5 * k - 0.25) * kPi;
    return beta - (mu - 1.0) / (8.0 * beta);
  }
  const double beta = (l + 0.5 * k - 0.75) * kPi;
  return beta - (mu + 3.0) / (8.0 * beta);
}

double mcmahon_positive_zero(int k, int l, ZeroKind kind) {
  if (kind == ZeroKind::Neumann && k == 0) return mcmahon_estimate(k, l + 1, kind);
  return mcmahon_estimate(k, l, kind);
}

double mcmahon_next_term(int k, int l, ZeroKind kind) {
  const double mu = 4.0 * k * k;
  if (kind == ZeroKind::Dirichlet) {
    const double b8 = 8.0 * (l + 0.5 * k - 0.25) * kPi;
    return -4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 * b8 * b8);
  }
  const double b8 = 8.0 * (l + 0.5 * k - 0.75) * kPi;
  return -4.0 * (7.0 * mu * mu + 82.0 * mu - 9.0) / (3.0 * b8 * b8 * b8);
}

ModeLine find_zeros(int k, ZeroKind kind, double upper) {
  if (k < 0 || k > kMaxBesselOrder - 1)
    throw RangeError("find_zeros: order " + std::to_string(k) + " unsupported");
  if (!(upper > k))
    throw RangeError("find_zeros: upper bound " + std::to_string(upper) +
                     " must exceed the order " + std::to_string(k));
  if (upper > kMaxBesselArgument) throw RangeError("find_zeros: upper bound too large");

  std::function<double(double)> f;
  if (kind == ZeroKind::Dirichlet)
    f = [k](double x) { return bessel_j(k, x); };
  else
    f = [k](double x) { return bessel_j_prime(k, x); };

  ModeLine line;
  line.order = k;
  line.kind = kind;
  line.upper_bound = upper;

  // Zero spacing exceeds pi for both kinds, so a pi/2 step never straddles
  // two zeros. Below x = k both functions are exponentially small and sign
  // changes there are rounding noise, so such brackets are discarded.
  const double step = 0.5 * kPi;
  double a = std::max(0.8 * k, 0.1);
  double fa = f(a);
  while (a < upper) {
    const double b = std::min(a + step, upper);
    const double fb = f(b);
    if (b > k) {
      if (fb == 0.0) {
        line.zeros.push_back(b);
      } else if (fa != 0.0 && (fa > 0) != (fb > 0)) {
        const double lo = std::max(a, static_cast<double>(k));
        double flo = lo == a ? fa : f(lo);
        if ((flo > 0) != (fb > 0) && flo != 0.0)
          line.zeros.push_back(refine_root(f, lo, b, flo, fb));
        else if (flo == 0.0 && lo > k)
          line.zeros.push_back(lo);
      }
    }
    a = b;
    fa = fb;
  }

  for (size_t i = 1; i < line.zeros.size(); ++i)
    if (!(line.zeros[i] > line.zeros[i - 1]))
      throw ConsistencyError("find_zeros: zeros not strictly increasing at order " +
                             std::to_string(k));

  // Index cross-check once the asymptotic expansion is reliable.
  if (upper >= 4.0 * k + 10.0) {
    long predicted = 0;
    while (mcmahon_positive_zero(k, static_cast<int>(predicted) + 1, kind) <= upper) ++predicted;
    const long found = static_cast<long>(line.zeros.size());
    if (std::labs(found - predicted) > 1)
      throw ConsistencyError("find_zeros: order " + std::to_string(k) + " " + to_string(kind) +
                             " found " + std::to_string(found) + " zeros below " +
                             std::to_string(upper) + ", index estimate " +
                             std::to_string(predicted));
  }
  return line;
}

void verify_interlacing(const ModeLine& d, const ModeLine& n) {
  if (d.order != n.order || d.kind != ZeroKind::Dirichlet || n.kind != ZeroKind::Neumann)
    throw ConsistencyError("verify_interlacing: need Dirichlet and Neumann lines of one order");
  const double top = std::min(d.upper_bound, n.upper_bound);
  // Merge and require strict alternation. For k >= 1 the first positive
  // zero is a Neumann one; for k = 0 (J_0' = -J_1) it is a Dirichlet one.
  std::vector<std::pair<double, int>> merged;
  for (double z : d.zeros)
    if (z <= top) merged.emplace_back(z, 0);
  for (double z : n.zeros)
    if (z <= top) merged.emplace_back(z, 1);
  std::sort(merged.begin(), merged.end());
  int expect = d.order == 0 ? 0 : 1;
  for (size_t i = 0; i < merged.size(); ++i) {
    if (merged[i].second != expect ||
        (i > 0 && !(merged[i].first > merged[i - 1].first)))
      throw ConsistencyError("interlacing violated at order " + std::to_string(d.order) +
                             " near x = " + std::to_string(merged[i].first));
    expect ^= 1;
  }
}

}  // namespace tracekit
