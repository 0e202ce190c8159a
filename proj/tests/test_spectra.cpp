#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "tracekit/bessel.hpp"
#include "tracekit/errors.hpp"
#include "tracekit/quadrature.hpp"
#include "tracekit/spectra.hpp"
#include "tracekit/window.hpp"
#include "tracekit/zero_cache.hpp"

using namespace tracekit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

constexpr double kPi = std::numbers::pi;

namespace {
const Window& window() {
  static const Window w = build_window(WindowSpec{});
  return w;
}
}  // namespace

TEST_CASE("interval spectrum") {
  auto c = build_catalog(Interval{1.0}, Boundary::Dirichlet, 0, 10.0);
  REQUIRE(c.group(0).frequencies.size() == 3);
  for (int j = 1; j <= 3; ++j) CHECK_THAT(c.group(0).frequencies[j - 1], WithinAbs(j * kPi, 1e-15));
  // psi_j(0) = -sqrt(2) j pi, psi_j(L) = (-1)^{j+1} psi_j(0)
  CHECK_THAT(c.group(0).modes[1].neumann_data, WithinAbs(-std::sqrt(2.0) * 2 * kPi, 1e-13));
  CHECK(c.group(0).modes[0].far_sign == 1.0);
  CHECK(c.group(0).modes[1].far_sign == -1.0);

  auto n = build_catalog(Interval{2.0}, Boundary::Neumann, 0, 5.0);
  CHECK(n.group(0).modes.front().frequency == 0.0);
  CHECK_THAT(n.group(0).modes.front().dirichlet_data, WithinAbs(1.0 / std::sqrt(2.0), 1e-15));
}

TEST_CASE("disc catalog from Bessel zeros") {
  auto c = build_catalog(Disc{}, Boundary::Dirichlet, 0, 10.0);
  const auto& f = c.group(0).frequencies;
  REQUIRE(f.size() == 3);
  CHECK_THAT(f[0], WithinAbs(2.4048255576957727686, 1e-14));
  CHECK_THAT(f[2], WithinAbs(8.653727912911012217, 1e-14));
  // |psi|^2 over the circle = 2 lambda^2
  for (const auto& m : c.group(0).modes)
    CHECK_THAT(2 * kPi * m.neumann_data * m.neumann_data, WithinRel(2 * m.frequency * m.frequency, 1e-14));
  CHECK_THROWS_AS(c.group(5), RangeError);

  auto n = build_catalog(Disc{}, Boundary::Neumann, 2, 20.0);
  CHECK(n.group(0).modes.front().frequency == 0.0);
  CHECK_THAT(n.group(1).modes.front().frequency, WithinAbs(1.8411837813406593026, 1e-14));
  CHECK(n.count_below(2.0) == 3);  // constant mode plus e^{+-i theta}
}

TEST_CASE("disc eigenfunctions have unit norm") {
  auto c = build_catalog(Disc{}, Boundary::Dirichlet, 30, 80.0);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> uk(0, 30);
  auto rule = composite_gauss_legendre(0.0, 1.0, 64, 32);
  for (int trial = 0; trial < 10; ++trial) {
    const int k = uk(rng);
    const auto& modes = c.group(k).modes;
    std::uniform_int_distribution<size_t> ul(0, modes.size() - 1);
    const auto& m = modes[ul(rng)];
    // u = c J_k(lambda r) e^{ik theta}, psi = d_r u(1) = c lambda J_k'(lambda)
    const double coef = m.neumann_data / (m.frequency * bessel_j_prime(k, m.frequency));
    double s = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
      const double r = rule.nodes[i];
      const double u = coef * bessel_j(k, m.frequency * r);
      s += rule.weights[i] * u * u * r;
    }
    REQUIRE_THAT(2 * kPi * s, WithinAbs(1.0, 1e-6));
  }
}

TEST_CASE("modes in window") {
  const auto& w = window();
  const double R = w.tail_radius();
  auto ic = build_catalog(Interval{1.0}, Boundary::Dirichlet, 0, 100.0 + R + 1);
  auto sel = modes_in_window(ic, 100.0, w);
  size_t expect = 0;
  for (int j = 1; j * kPi <= 100.0 + R; ++j)
    if (std::abs(100.0 - j * kPi) <= R) ++expect;
  CHECK(sel.size() == expect);

  auto dc = build_catalog(Disc{}, Boundary::Dirichlet, std::vector<int>{0}, 500.0 + R + 1);
  const double n100 = static_cast<double>(modes_in_window(dc, 0, 100.0, w).size());
  CHECK(std::abs(n100 - (100.0 + R) / kPi) <= 2.0);  // window reaches below 0
  const double n500 = static_cast<double>(modes_in_window(dc, 0, 500.0, w).size());
  CHECK(std::abs(n500 - 2 * R / kPi) <= 2.0);

  CHECK_THROWS_AS(modes_in_window(dc, 0, 500.0 + 10.0, w), RangeError);
  auto far = build_catalog(Disc{}, Boundary::Dirichlet, std::vector<int>{500}, 900.0);
  CHECK(modes_in_window(far, 500, 20.0, w).empty());
}

TEST_CASE("rectangle catalog matches brute force") {
  RectangleLine r{kPi, kPi, 0.37 * kPi};
  const double upper = 120.0;
  auto c = build_catalog(r, Boundary::Dirichlet, 40, upper);
  size_t brute = 0;
  for (int m = 1; m <= 40; ++m)
    for (int n = 1; n < 1000; ++n)
      if (std::hypot(m * kPi / r.a, n * kPi / r.b) <= upper) ++brute;
  CHECK(c.size() == brute);
  const auto& mode = c.group(3).modes.front();
  CHECK_THAT(mode.frequency, WithinAbs(std::hypot(3.0, 1.0), 1e-14));
  CHECK_THAT(mode.dirichlet_data, WithinAbs(2.0 / kPi * std::sin(0.37 * kPi), 1e-15));
  CHECK_THROWS_AS(build_catalog(r, Boundary::Neumann, 3, 10.0), ConfigError);
}

TEST_CASE("geometry validation") {
  CHECK_THROWS_AS(validate(Geometry{Interval{-1.0}}), ConfigError);
  CHECK_THROWS_AS(validate(Geometry{RectangleLine{1.0, 1.0, 1.5}}), ConfigError);
  CHECK(geometry_name(Disc{}) == "disc");
}

TEST_CASE("zero cache round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "tracekit_test_cache";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  ZeroCache cache(dir);
  CHECK(cache.status().records == 0);

  CatalogOptions o;
  o.cache = &cache;
  auto a = build_catalog(Disc{}, Boundary::Dirichlet, 5, 60.0, o);
  CHECK(cache.status().orders == 6);
  CHECK(cache.status().records == 12);  // both kinds, for interlacing

  ZeroCache again(dir);
  o.cache = &again;
  auto b = build_catalog(Disc{}, Boundary::Dirichlet, 5, 40.0, o);
  for (int k = 0; k <= 5; ++k)
    for (size_t i = 0; i < b.group(k).frequencies.size(); ++i)
      REQUIRE(b.group(k).frequencies[i] == a.group(k).frequencies[i]);

  cache.clear();
  cache.clear();
  CHECK(cache.status().records == 0);

  std::FILE* f = std::fopen(cache.file().c_str(), "wb");
  std::fputs("not a cache", f);
  std::fclose(f);
  ZeroCache broken(dir);
  CHECK_THROWS_AS(broken.lookup(0, ZeroKind::Dirichlet, 10.0), CacheError);
  std::filesystem::remove_all(dir);
}
