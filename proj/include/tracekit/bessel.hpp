#pragma once

#include <vector>

namespace tracekit {

constexpr int kMaxBesselOrder = 5000;
constexpr double kMaxBesselArgument = 1.0e5;

// J_k(x) from (1/pi) int_0^pi cos(k tau - x sin tau) d tau, composite
// Gauss-Legendre with 64 + 8 ceil((k + x)/pi) nodes in 32-point panels.
double bessel_j(int k, double x);
// J_k'(x) = (J_{k-1} - J_{k+1})/2, J_0' = -J_1.
double bessel_j_prime(int k, double x);

// Dirichlet zeros are zeros of J_k, Neumann zeros are zeros of J_k'.
enum class ZeroKind { Dirichlet, Neumann };

const char* to_string(ZeroKind kind);

struct ModeLine {
  int order = 0;
  ZeroKind kind = ZeroKind::Dirichlet;
  std::vector<double> zeros;  // ascending, positive, all of them below upper_bound
  double upper_bound = 0.0;
};

// All positive zeros in (0, upper]. Throws ConsistencyError when the count
// disagrees with the asymptotic index prediction.
ModeLine find_zeros(int k, ZeroKind kind, double upper);

// beta - (4k^2 - 1)/(8 beta), beta = (l + k/2 - 1/4) pi   (Dirichlet)
// beta - (4k^2 + 3)/(8 beta), beta = (l + k/2 - 3/4) pi   (Neumann)
double mcmahon_estimate(int k, int l, ZeroKind kind);
// Same, indexed by the l-th *positive* zero. The standard Neumann index for
// k = 0 counts x = 0 as the first zero, so l shifts by one there.
double mcmahon_positive_zero(int k, int l, ZeroKind kind);
// The beta^{-3} term of the same expansion.
double mcmahon_next_term(int k, int l, ZeroKind kind);

// Between consecutive zeros of one kind lies exactly one of the other
// (up to the common upper bound). Throws ConsistencyError on violation.
void verify_interlacing(const ModeLine& dirichlet, const ModeLine& neumann);

}  // namespace tracekit
