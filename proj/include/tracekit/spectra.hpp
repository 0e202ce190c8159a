#pragma once

#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tracekit/bessel.hpp"

namespace tracekit {

class Window;
class ZeroCache;

// Boundary of [0, L]: two points with counting measure.
struct Interval {
  double length = 1.0;
};
// Unit disc; boundary the unit circle.
struct Disc {};
// Dirichlet rectangle [0,a]x[0,b] with the interior line y = y0.
struct RectangleLine {
  double a = 1.0;
  double b = 1.0;
  double y0 = 0.5;
};
using Geometry = std::variant<Interval, Disc, RectangleLine>;

void validate(const Geometry& g);  // throws ConfigError
std::string geometry_name(const Geometry& g);

enum class Boundary { Dirichlet, Neumann };
const char* to_string(Boundary bc);

// One eigenfunction, reduced to its transverse mode. dirichlet_data is the
// eigenfunction's own trace (omega), neumann_data its normal derivative
// (psi), both as coefficients of the (unnormalised) transverse mode: e^{ik theta}
// on the circle, sin(m pi x / a) on the rectangle line, and the value at x = 0
// on the interval.
struct TraceMode {
  int transverse_index = 0;
  double frequency = 0.0;
  double dirichlet_data = 0.0;
  double neumann_data = 0.0;
  // Interval only: trace at x = L divided by trace at x = 0.
  double far_sign = 1.0;
};

struct ModeGroup {
  int index = 0;
  std::vector<TraceMode> modes;      // ascending frequency
  std::vector<double> frequencies;   // same order, for window sums
};

struct ModeCatalog {
  Geometry geometry;
  Boundary bc = Boundary::Dirichlet;
  double upper_bound = 0.0;
  std::map<int, ModeGroup> groups;  // interval: one group, index 0

  bool has_group(int index) const { return groups.count(index) != 0; }
  const ModeGroup& group(int index) const;  // RangeError if absent
  std::size_t size() const;
  // Eigenvalue count with frequency < lambda, counting e^{+-ik theta} twice.
  std::size_t count_below(double lambda) const;
};

struct CatalogOptions {
  int threads = 1;
  ZeroCache* cache = nullptr;
  // Disc: also compute the other zero kind and check interlacing.
  bool verify_interlacing = true;
};

// Transverse indices 0..max (disc), 1..max (rectangle); ignored for the interval.
ModeCatalog build_catalog(const Geometry& g, Boundary bc, int transverse_max, double upper,
                          const CatalogOptions& opt = {});
ModeCatalog build_catalog(const Geometry& g, Boundary bc, const std::vector<int>& indices,
                          double upper, const CatalogOptions& opt = {});

// Multiplicity of one catalog mode in the full spectrum.
int multiplicity(const Geometry& g, const TraceMode& m);

// All modes with |lambda - frequency| <= tail radius. Throws RangeError when
// the catalog does not reach lambda + tail radius.
std::vector<TraceMode> modes_in_window(const ModeCatalog& c, double lambda, const Window& w);
std::span<const TraceMode> modes_in_window(const ModeCatalog& c, int index, double lambda,
                                           const Window& w);

}  // namespace tracekit
