#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "tracekit/bessel.hpp"
#include "tracekit/errors.hpp"

using namespace tracekit;
using Catch::Matchers::WithinAbs;

constexpr double kPi = std::numbers::pi;

TEST_CASE("bessel_j trivial values") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK_THAT(bessel_j(1, 0.0), WithinAbs(0.0, 1e-16));
  CHECK_THAT(bessel_j_prime(0, 0.0), WithinAbs(0.0, 1e-16));
  CHECK_THROWS_AS(bessel_j(kMaxBesselOrder + 1, 1.0), RangeError);
  CHECK_THROWS_AS(bessel_j(0, -1.0), RangeError);
}

TEST_CASE("bessel_j against extended-precision values") {
  // mpmath besselj, 40 digits
  struct P {
    int k;
    double x, v;
  };
  const P pts[] = {{2, 7.5, -0.23027341052579026215},    {0, 1.0, 0.76519768655796655145},
                   {1, 2.5, 0.49709410246427403801},     {3, 10.0, 0.058379379305186812343},
                   {5, 0.1, 2.6030817909644415564e-9},   {50, 60.0, -0.13798273148535212047},
                   {200, 300.0, -0.019369872600834378946}, {0, 700.0, -0.0062882724650687667615},
                   {1000, 1200.0, 0.0035826674378828883711}, {40, 20.0, 9.9023894137446861364e-10}};
  for (const auto& p : pts) CHECK_THAT(bessel_j(p.k, p.x), WithinAbs(p.v, 1e-12));
}

TEST_CASE("three-term recurrence on a random grid") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.5, 500.0);
  std::uniform_int_distribution<int> uk(1, 300);
  for (int i = 0; i < 300; ++i) {
    const int k = uk(rng);
    const double x = ux(rng);
    const double r = bessel_j(k - 1, x) + bessel_j(k + 1, x) - 2.0 * k / x * bessel_j(k, x);
    REQUIRE(std::abs(r) <= 1e-10);
  }
  const double x = 10.0;
  CHECK(std::abs(bessel_j(2, x) + bessel_j(4, x) - 6.0 / x * bessel_j(3, x)) <= 1e-10);
}

TEST_CASE("derivative at the first Neumann zero of order 1") {
  CHECK_THAT(bessel_j_prime(1, 1.8411837813406593), WithinAbs(0.0, 1e-9));
  CHECK_THAT(bessel_j_prime(0, 2.0), WithinAbs(-bessel_j(1, 2.0), 1e-16));
}

TEST_CASE("zeros against extended-precision values") {
  auto d0 = find_zeros(0, ZeroKind::Dirichlet, 200);
  CHECK_THAT(d0.zeros[0], WithinAbs(2.4048255576957727686, 1e-14));
  CHECK_THAT(d0.zeros[1], WithinAbs(5.5200781102863106496, 1e-14));
  CHECK_THAT(d0.zeros[2], WithinAbs(8.653727912911012217, 1e-14));
  CHECK_THAT(d0.zeros[59], WithinAbs(187.71082696004935978, 1e-12));
  CHECK_THAT(find_zeros(1, ZeroKind::Neumann, 5).zeros[0], WithinAbs(1.8411837813406593026, 1e-14));
  CHECK_THAT(find_zeros(2, ZeroKind::Neumann, 200).zeros[59], WithinAbs(189.26840870489769089, 1e-12));
  CHECK_THAT(find_zeros(1, ZeroKind::Dirichlet, 320).zeros[99], WithinAbs(314.94347283776716246, 1e-12));

  auto first3 = find_zeros(0, ZeroKind::Dirichlet, 10);
  CHECK(first3.zeros.size() == 3);
  CHECK_THROWS_AS(find_zeros(30, ZeroKind::Dirichlet, 20), RangeError);
}

TEST_CASE("zeros are zeros") {
  for (int k : {0, 1, 7, 60}) {
    auto d = find_zeros(k, ZeroKind::Dirichlet, 300);
    auto n = find_zeros(k, ZeroKind::Neumann, 300);
    CHECK(d.zeros.front() > k);
    for (double z : d.zeros) REQUIRE(std::abs(bessel_j(k, z)) <= 1e-11);
    for (double z : n.zeros) REQUIRE(std::abs(bessel_j_prime(k, z)) <= 1e-11);
    for (size_t i = 1; i < d.zeros.size(); ++i) REQUIRE(d.zeros[i] > d.zeros[i - 1]);
  }
}

TEST_CASE("mcmahon expansion") {
  CHECK_THAT(mcmahon_estimate(0, 1, ZeroKind::Dirichlet), WithinAbs(0.75 * kPi + 1.0 / (6.0 * kPi), 1e-15));
  for (int l = 1; l < 50; ++l)
    REQUIRE(mcmahon_estimate(3, l + 1, ZeroKind::Dirichlet) > mcmahon_estimate(3, l, ZeroKind::Dirichlet));

  // Order 0, zero 60: beta = 59.75 pi, first correction +1/(8 beta).
  const double b0 = 59.75 * kPi;
  const double z0 = find_zeros(0, ZeroKind::Dirichlet, 200).zeros[59];
  CHECK_THAT(mcmahon_estimate(0, 60, ZeroKind::Dirichlet), WithinAbs(b0 + 1.0 / (8.0 * b0), 1e-13));
  CHECK(std::abs(z0 - mcmahon_estimate(0, 60, ZeroKind::Dirichlet)) <= 5.0 * std::pow(b0, -3));

  const double b1 = (100 + 0.5 - 0.25) * kPi;
  const double z1 = find_zeros(1, ZeroKind::Dirichlet, 320).zeros[99];
  CHECK(std::abs(z1 - mcmahon_estimate(1, 100, ZeroKind::Dirichlet)) <= 5.0 * std::pow(b1, -3));

  // Neumann order 2, zero 60: the beta^{-3} coefficient is about -8.06, so the
  // two-term estimate misses 5 beta^{-3}. The next term closes it down to the
  // beta^{-5} coefficient -32(83mu^3 + 2075mu^2 - 3039mu + 3537)/(15 * 8^5), mu = 16.
  const double b2 = (60 + 1 - 0.75) * kPi;
  const double z2 = find_zeros(2, ZeroKind::Neumann, 200).zeros[59];
  const double two_term = mcmahon_estimate(2, 60, ZeroKind::Neumann);
  CHECK_THAT((z2 - two_term) * std::pow(b2, 3), WithinAbs(-8.06, 0.01));
  const double c5 = -32.0 * (83.0 * 4096 + 2075.0 * 256 - 3039.0 * 16 + 3537) / (15.0 * 32768);
  CHECK_THAT((z2 - two_term - mcmahon_next_term(2, 60, ZeroKind::Neumann)) * std::pow(b2, 5), WithinAbs(c5, 0.5));

  // Order-0 Neumann: the standard index counts x = 0.
  const double zn = find_zeros(0, ZeroKind::Neumann, 100).zeros[20];
  CHECK(std::abs(zn - mcmahon_positive_zero(0, 21, ZeroKind::Neumann)) <= 5.0 * std::pow(zn, -3));
}

TEST_CASE("interlacing for orders 0..20 below 500") {
  for (int k = 0; k <= 20; ++k) {
    auto d = find_zeros(k, ZeroKind::Dirichlet, 500);
    auto n = find_zeros(k, ZeroKind::Neumann, 500);
    REQUIRE_NOTHROW(verify_interlacing(d, n));
    // zero-count consistency
    const double L = 500.0;
    const double predicted = std::floor(L / kPi - k / 2.0 + 0.25);
    REQUIRE(std::abs(static_cast<double>(d.zeros.size()) - predicted) <= 1.0);
  }
}

TEST_CASE("interlacing detects a missing zero") {
  auto d = find_zeros(3, ZeroKind::Dirichlet, 60);
  auto n = find_zeros(3, ZeroKind::Neumann, 60);
  n.zeros.erase(n.zeros.begin() + 4);
  CHECK_THROWS_AS(verify_interlacing(d, n), ConsistencyError);
}
