#include "tracekit/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace tracekit {

namespace {

GaussLegendre make_rule(int n) {
  GaussLegendre g;
  g.nodes.resize(n);
  g.weights.resize(n);
  // Newton on P_n from Chebyshev-like initial guesses; symmetric fill.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-17) break;
    }
    // Final derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    g.weights[i] = w;
    g.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) g.nodes[n / 2] = 0.0;
  return g;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  if (n < 2 || n > 1024) throw std::invalid_argument("gauss_legendre: order out of range");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussLegendre>> rules;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = rules[n];
  if (!slot) slot = std::make_unique<GaussLegendre>(make_rule(n));
  return *slot;
}

CompositeRule composite_gauss_legendre(double a, double b, int panels, int n) {
  const auto& g = gauss_legendre(n);
  CompositeRule r;
  r.nodes.reserve(static_cast<size_t>(panels) * n);
  r.weights.reserve(static_cast<size_t>(panels) * n);
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    double mid = lo + 0.5 * h;
    for (int i = 0; i < n; ++i) {
      r.nodes.push_back(mid + 0.5 * h * g.nodes[i]);
      r.weights.push_back(0.5 * h * g.weights[i]);
    }
  }
  return r;
}

}  // namespace tracekit
