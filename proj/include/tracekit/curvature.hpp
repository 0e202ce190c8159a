#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tracekit/spectra.hpp"

namespace tracekit {

// Boundary invariants of a hypersurface in R^n. K is fixed by the trace
// identity Tr II^2 = (n-1)^2 H^2 - (n-1)(n-2) K (so K = 1 on the unit S^2).
struct CurvatureData {
  int dim_n = 2;
  double mean_H = 0.0;
  double trace_II_sq = 0.0;
  double scalar_K = 0.0;

  // (1/4)(n-1)^2 H^2 - (1/2) Tr II^2
  double dirichlet_coefficient() const;
  // -(3/4)(n-1)^2 H^2 + (1/2)(n-1)(n-2) K
  double neumann_coefficient() const;
  double trace_identity_residual() const;
};

struct SphereBoundary {
  double radius = 1.0;
  int dim_n = 3;
};
struct Circle {
  double radius = 1.0;
};
struct Cylinder {
  double radius = 1.0;  // S^1 x R in R^3
};
using Shape = std::variant<SphereBoundary, Circle, Cylinder>;
std::string shape_name(const Shape& s);

CurvatureData shape_curvature(const Shape& s);

// Half-density factor k(r), k^4 = det h in Fermi coordinates, r the inward
// normal distance. Either an exact power law c (1 - r/R)^alpha or samples of
// an arbitrary function.
struct FermiProfile {
  struct PowerLaw {
    double c = 1.0, R = 1.0, alpha = 0.5;
  };
  std::optional<PowerLaw> power;
  std::function<double(double)> k_fn;
  double r_max = 0.5;
  double step = 1e-4;  // sampling step for finite differences

  static FermiProfile power_law(double c, double R, double alpha);
  static FermiProfile sampled(std::function<double(double)> fn, double r_max, double step = 1e-4);
  double operator()(double r) const { return k_fn(r); }
};

// Interior Fermi profile of the shape (unit normal pointing inward).
FermiProfile fermi_profile_for(const Shape& s);

struct FermiCoefficients {
  double dirichlet = 0.0;  // k''/k at 0
  double neumann = 0.0;    // (k k'' - 2 k'^2)/k^2 at 0
};
// Exact for power laws; 5-point central differences (with a step-doubling
// agreement check, DataError on failure) for sampled profiles.
FermiCoefficients fermi_coefficients(const FermiProfile& p);

struct CoefficientMatch {
  CurvatureData geometry;
  FermiCoefficients fermi;
  double delta_dirichlet = 0.0;
  double delta_neumann = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};
// Tolerance 1e-10 for exact profiles, 1e-6 for sampled ones.
CoefficientMatch coefficients_match(const Shape& s, const FermiProfile& p);

// Radial ansatz for the disc with harmonic-extension mode w = (1 - r)^|m| and
// k = (1 - r)^{1/2}; P_m = -d^2/dr^2 + (m^2 - 1/4)/(1 - r)^2.
struct AnsatzGrid {
  double step = 0.0;
  int m = 0;
  int order = 0;  // N
  Boundary bc = Boundary::Dirichlet;
  std::vector<double> r;
  std::vector<double> potential;            // (m^2 - 1/4)/(1-r)^2
  std::vector<std::vector<double>> b;       // b[0..N]
  std::vector<std::vector<double>> Pb;      // P_m b_j on the grid

  // Dirichlet: d_r b_1(0)/k(0) -> (m^2 - 1/4)/2.
  // Neumann:   6 b_3(0)/(k(0)|m|) -> (m^2 - 3/4)/2.
  double coefficient() const;
  // max |d_r b_1 + (1/2) P_m b_0| over interior nodes (Dirichlet).
  double recurrence_residual() const;
};

AnsatzGrid build_ansatz(int m, int N, Boundary bc, double step, double r_max = 0.5);
// Coefficient with a Richardson agreement check against step 2h (AccuracyError).
double ansatz_coefficient(int m, Boundary bc, double step);
double ansatz_expected(int m, Boundary bc);

struct RichardsonResult {
  std::vector<double> steps, residuals;
  double observed_order = 0.0;  // min over successive halvings
};
RichardsonResult recurrence_convergence(int m, double step, int halvings);

}  // namespace tracekit
