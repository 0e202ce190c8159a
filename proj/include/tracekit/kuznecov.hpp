#pragma once

#include <functional>
#include <numbers>
#include <vector>

#include "tracekit/completeness.hpp"

namespace tracekit {

// Linear-growth constant of the boundary sums: integrating the windowed
// identity gives density (2/pi) |phi|^2 per unit lambda.
constexpr double kKuznecovBoundaryConstant = 2.0 / std::numbers::pi;
// Interior-line analogue (prefactor pi instead of pi/2).
constexpr double kKuznecovInteriorConstant = 1.0 / std::numbers::pi;

// Which trace the sum pairs against: normal derivatives (weighted by
// lambda^{-2}) or eigenfunction values (unit weight).
enum class PairingKind { NormalDerivative, Value };

struct PartialSumSeries {
  std::vector<double> lambda_grid;
  std::vector<double> values;  // sum over lambda_j < lambda
  PairingKind pairing = PairingKind::NormalDerivative;
};

// Per-mode terms |<phi, trace_j>|^2 (times lambda_j^{-2} for normal
// derivatives), summed over the modes sharing a frequency.
struct KuznecovTerm {
  double frequency;
  double value;
};
std::vector<KuznecovTerm> kuznecov_terms(const ModeCatalog& c, const BoundarySignal& phi,
                                         PairingKind pairing);
// Default pairing: normal derivatives for Dirichlet catalogs, values for Neumann.
PairingKind default_pairing(const ModeCatalog& c);

PartialSumSeries kuznecov_series(const ModeCatalog& c, const BoundarySignal& phi,
                                 const std::vector<double>& lambda_grid);
PartialSumSeries kuznecov_series(const ModeCatalog& c, const BoundarySignal& phi,
                                 const std::vector<double>& lambda_grid, PairingKind pairing);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double sup_residual = 0.0;
  double slope_ratio = 0.0;  // slope / (c_expected |phi|^2)
};
FitResult fit_linear(const PartialSumSeries& s, double c_expected, double phi_norm_sq);

// sup |residual| on the last two quarters of the grid: {third, fourth}.
std::pair<double, double> residual_quarters(const PartialSumSeries& s, const FitResult& f);

// sum_j rho(lambda - lambda_j) term_j: the series differentiated through the window.
double windowed_density(const ModeCatalog& c, const BoundarySignal& phi, const Window& w,
                        double lambda);

// |phi|^2 in L^2 of the boundary / line.
double signal_norm_sq(const BoundarySignal& phi);

struct WeylResult {
  double lhs = 0.0;
  double rhs = 0.0;
  std::size_t count = 0;  // N(lambda)
};
// Disc. `symbol` must vanish on [support_max, 1].
WeylResult local_weyl(const ModeCatalog& c, const std::function<double(double)>& symbol,
                      double support_max, double lambda);
// Truncated quadratic: max(0, 1 - (s/s0)^2).
std::function<double(double)> truncated_quadratic(double s0);
std::size_t weyl_count(const ModeCatalog& c, double lambda);

}  // namespace tracekit
