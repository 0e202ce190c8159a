#pragma once

#include <array>
#include <complex>
#include <map>
#include <numbers>
#include <vector>

#include "tracekit/spectra.hpp"
#include "tracekit/window.hpp"

namespace tracekit {

// KD, KN: boundary traces (normal derivative, resp. value) with prefactor pi/2.
// CD, CN: Cauchy data on the rectangle's interior line with prefactor pi;
// CD pairs the eigenfunction values, CN the normal derivatives.
enum class OperatorKind { KD, KN, CD, CN };
const char* to_string(OperatorKind kind);

constexpr double kBoundaryPrefactor = std::numbers::pi / 2.0;
constexpr double kInteriorPrefactor = std::numbers::pi;

// Test function on the boundary / interior line, as coefficients of the
// transverse modes (e^{ik theta}; sin(m pi x/a); for the interval the values
// at x = 0 (key 0) and x = L (key 1)).
struct BoundarySignal {
  Geometry geometry;
  std::map<int, std::complex<double>> coefficients;

  // Eigenvalue of the boundary Laplacian -d^2 on the given mode.
  double laplacian_eigenvalue(int index) const;
  // Synthesised value at angle theta / abscissa x / endpoint index.
  std::complex<double> evaluate(double x) const;
};

struct MultiplierValue {
  double value = 0.0;
  double truncation_bound = 0.0;
  double negative_root_mass = 0.0;
  std::size_t terms = 0;
};

// Scalar multiplier of `kind` on transverse mode `index` (disc or rectangle).
// `prefactor` defaults to the kind's correct constant.
MultiplierValue multiplier(OperatorKind kind, const ModeCatalog& c, const Window& w, int index,
                           double lambda, double prefactor = 0.0);

double multiplier_KD(const ModeCatalog& c, const Window& w, int k, double lambda);
double multiplier_KN(const ModeCatalog& c, const Window& w, int k, double lambda);
enum class DataKind { DirichletData, NeumannData };
double multiplier_interior(const ModeCatalog& c, const Window& w, DataKind data, int m,
                           double lambda, double prefactor = kInteriorPrefactor);

// Interval: (K phi)_p = sum_q M[2p+q] phi_q.
std::array<double, 4> interval_matrix(OperatorKind kind, const ModeCatalog& c, const Window& w,
                                      double lambda);

struct AppliedSignal {
  BoundarySignal signal;
  double sup_distance = 0.0;  // sup |K phi - phi| on a sampling grid (exact for the interval)
  double truncation_bound = 0.0;
};
AppliedSignal apply_operator(OperatorKind kind, const ModeCatalog& c, const BoundarySignal& phi,
                             double lambda, const Window& w);

struct MultiplierSample {
  int k = 0;
  double lambda = 0.0;
  double value = 0.0;
  double expected_leading = 1.0;
  double expected_second_order = 0.0;
  double residual = 0.0;  // value - leading - second / lambda^2
};
// Disc expectations: 1 - (4k^2-1)/(8 lambda^2) for KD, 1 + (4k^2-3)/(8 lambda^2)
// for KN. Interior kinds: leading term only.
MultiplierSample make_sample(OperatorKind kind, int k, double lambda, double value);

struct SecondOrderFit {
  int k = 0;
  double target = 0.0;  // limit of lambda^2 (m - 1)
  std::vector<double> lambdas, scaled, deviations;
  double sup_deviation = 0.0;
  double decay_exponent = 0.0;  // log-log slope of |deviation| against lambda
  double min_shrink = 0.0;      // smallest per-doubling shrink factor
};
// curvature_coeff: k''/k (Dirichlet) or (kk'' - 2k'^2)/k^2 (Neumann) of the
// Fermi profile. Target -(k^2 + c)/2 for KD and +(k^2 + c)/2 for KN.
SecondOrderFit second_order_check(const std::vector<MultiplierSample>& samples,
                                  double curvature_coeff, OperatorKind kind);

struct SymbolPoint {
  double eta = 0.0;
  int index = 0;
  double eta_quantized = 0.0;  // index / lambda (disc), index pi / (a lambda) (rectangle)
  double value = 0.0;
  double expected = 0.0;
  double deviation = 0.0;
};
std::vector<SymbolPoint> symbol_scan(OperatorKind kind, const ModeCatalog& c, const Window& w,
                                     const std::vector<double>& eta_grid, double lambda);
double symbol_expected(OperatorKind kind, double eta);

}  // namespace tracekit
