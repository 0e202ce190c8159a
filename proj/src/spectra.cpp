#include "tracekit/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "tracekit/errors.hpp"
#include "tracekit/window.hpp"
#include "tracekit/zero_cache.hpp"

namespace tracekit {

namespace {

constexpr double kPi = std::numbers::pi;

void finish_group(ModeGroup& g) {
  std::sort(g.modes.begin(), g.modes.end(),
            [](const TraceMode& x, const TraceMode& y) { return x.frequency < y.frequency; });
  g.frequencies.clear();
  for (const auto& m : g.modes) g.frequencies.push_back(m.frequency);
  for (size_t i = 1; i < g.frequencies.size(); ++i)
    if (!(g.frequencies[i] > g.frequencies[i - 1]))
      throw ConsistencyError("catalog: frequencies not strictly increasing in group " +
                             std::to_string(g.index));
}

ModeCatalog interval_catalog(const Interval& iv, Boundary bc, double upper) {
  ModeCatalog c;
  c.geometry = iv;
  c.bc = bc;
  c.upper_bound = upper;
  ModeGroup g;
  g.index = 0;
  const double L = iv.length;
  const double amp = std::sqrt(2.0 / L);
  if (bc == Boundary::Neumann) {
    TraceMode m;
    m.frequency = 0.0;
    m.dirichlet_data = 1.0 / std::sqrt(L);
    m.far_sign = 1.0;
    g.modes.push_back(m);
  }
  for (long j = 1; j * kPi / L <= upper; ++j) {
    TraceMode m;
    m.frequency = j * kPi / L;
    const double parity = (j % 2 == 0) ? 1.0 : -1.0;
    if (bc == Boundary::Dirichlet) {
      // u = sqrt(2/L) sin(j pi x/L); outward derivative at 0 is -u'(0).
      m.neumann_data = -amp * m.frequency;
      m.far_sign = -parity;
    } else {
      m.dirichlet_data = amp;
      m.far_sign = parity;
    }
    g.modes.push_back(m);
  }
  finish_group(g);
  c.groups[0] = std::move(g);
  return c;
}

ModeCatalog rectangle_catalog(const RectangleLine& r, Boundary bc, const std::vector<int>& ms,
                              double upper) {
  if (bc != Boundary::Dirichlet)
    throw ConfigError("rectangle: only the Dirichlet rectangle is modelled");
  ModeCatalog c;
  c.geometry = r;
  c.bc = bc;
  c.upper_bound = upper;
  const double norm = 2.0 / std::sqrt(r.a * r.b);
  for (int m : ms) {
    if (m < 1) throw ConfigError("rectangle: sine index must be >= 1");
    ModeGroup g;
    g.index = m;
    const double kx = m * kPi / r.a;
    for (long n = 1;; ++n) {
      const double ky = n * kPi / r.b;
      const double f = std::hypot(kx, ky);
      if (f > upper) break;
      TraceMode t;
      t.transverse_index = m;
      t.frequency = f;
      t.dirichlet_data = norm * std::sin(ky * r.y0);
      t.neumann_data = norm * ky * std::cos(ky * r.y0);
      g.modes.push_back(t);
    }
    finish_group(g);
    c.groups[m] = std::move(g);
  }
  return c;
}

ModeGroup disc_group(int k, Boundary bc, const ModeLine& line) {
  ModeGroup g;
  g.index = k;
  if (bc == Boundary::Neumann && k == 0) {
    // Constant eigenfunction 1/sqrt(pi).
    TraceMode t;
    t.frequency = 0.0;
    t.dirichlet_data = 1.0 / std::sqrt(kPi);
    g.modes.push_back(t);
  }
  for (double z : line.zeros) {
    TraceMode t;
    t.transverse_index = k;
    t.frequency = z;
    if (bc == Boundary::Dirichlet)
      t.neumann_data = z / std::sqrt(kPi);
    else
      t.dirichlet_data = z / std::sqrt(kPi * (z * z - static_cast<double>(k) * k));
    g.modes.push_back(t);
  }
  finish_group(g);
  return g;
}

ModeCatalog disc_catalog(Boundary bc, const std::vector<int>& ks, double upper,
                         const CatalogOptions& opt) {
  ModeCatalog c;
  c.geometry = Disc{};
  c.bc = bc;
  c.upper_bound = upper;
  const ZeroKind kind = bc == Boundary::Dirichlet ? ZeroKind::Dirichlet : ZeroKind::Neumann;
  const ZeroKind other = kind == ZeroKind::Dirichlet ? ZeroKind::Neumann : ZeroKind::Dirichlet;

  struct Job {
    int k;
    ModeLine main, partner;
    bool have_main = false, have_partner = false;
  };
  std::vector<Job> jobs;
  for (int k : ks) {
    if (k < 0) throw ConfigError("disc: angular order must be >= 0");
    Job j;
    j.k = k;
    if (k >= upper) {
      // No zeros below upper; the group exists but is empty.
      j.main.order = k;
      j.main.kind = kind;
      j.main.upper_bound = upper;
      j.have_main = j.have_partner = true;
      j.partner = j.main;
      j.partner.kind = other;
    } else if (opt.cache) {
      if (auto hit = opt.cache->lookup(k, kind, upper)) j.main = *hit, j.have_main = true;
      if (auto hit = opt.cache->lookup(k, other, upper)) j.partner = *hit, j.have_partner = true;
    }
    jobs.push_back(std::move(j));
  }

  auto work = [&](size_t begin, size_t stride) {
    for (size_t i = begin; i < jobs.size(); i += stride) {
      Job& j = jobs[i];
      if (!j.have_main) j.main = find_zeros(j.k, kind, upper);
      if (opt.verify_interlacing && !j.have_partner) j.partner = find_zeros(j.k, other, upper);
    }
  };
  const int nt = std::max(1, opt.threads);
  if (nt == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nt);
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&, t] {
        try {
          work(static_cast<size_t>(t), static_cast<size_t>(nt));
        } catch (...) {
          errs[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }

  std::vector<ModeLine> fresh;
  for (auto& j : jobs) {
    if (opt.verify_interlacing && j.k < upper) {
      if (kind == ZeroKind::Dirichlet)
        verify_interlacing(j.main, j.partner);
      else
        verify_interlacing(j.partner, j.main);
    }
    if (opt.cache && j.k < upper) {
      if (!j.have_main) fresh.push_back(j.main);
      if (opt.verify_interlacing && !j.have_partner) fresh.push_back(j.partner);
    }
    c.groups[j.k] = disc_group(j.k, bc, j.main);
  }
  if (opt.cache) opt.cache->store(fresh);
  return c;
}

}  // namespace

void validate(const Geometry& g) {
  if (auto* iv = std::get_if<Interval>(&g)) {
    if (!(iv->length > 0.0)) throw ConfigError("geometry.length: must be positive");
  } else if (auto* r = std::get_if<RectangleLine>(&g)) {
    if (!(r->a > 0.0)) throw ConfigError("geometry.a: must be positive");
    if (!(r->b > 0.0)) throw ConfigError("geometry.b: must be positive");
    if (!(r->y0 > 0.0 && r->y0 < r->b)) throw ConfigError("geometry.y0: must lie in (0, b)");
  }
}

std::string geometry_name(const Geometry& g) {
  switch (g.index()) {
    case 0: return "interval";
    case 1: return "disc";
    default: return "rectangle";
  }
}

const char* to_string(Boundary bc) { return bc == Boundary::Dirichlet ? "dirichlet" : "neumann"; }

const ModeGroup& ModeCatalog::group(int index) const {
  auto it = groups.find(index);
  if (it == groups.end())
    throw RangeError("catalog has no transverse index " + std::to_string(index) +
                     "; rebuild with a larger index range");
  return it->second;
}

std::size_t ModeCatalog::size() const {
  std::size_t n = 0;
  for (const auto& [k, g] : groups) n += g.modes.size();
  return n;
}

int multiplicity(const Geometry& g, const TraceMode& m) {
  return (std::holds_alternative<Disc>(g) && m.transverse_index != 0) ? 2 : 1;
}

std::size_t ModeCatalog::count_below(double lambda) const {
  std::size_t n = 0;
  for (const auto& [k, g] : groups)
    for (const auto& m : g.modes)
      if (m.frequency < lambda) n += static_cast<std::size_t>(multiplicity(geometry, m));
  return n;
}

ModeCatalog build_catalog(const Geometry& g, Boundary bc, const std::vector<int>& indices,
                          double upper, const CatalogOptions& opt) {
  validate(g);
  if (!(upper > 0.0)) throw ConfigError("catalog: upper bound must be positive");
  if (auto* iv = std::get_if<Interval>(&g)) return interval_catalog(*iv, bc, upper);
  if (auto* r = std::get_if<RectangleLine>(&g)) return rectangle_catalog(*r, bc, indices, upper);
  return disc_catalog(bc, indices, upper, opt);
}

ModeCatalog build_catalog(const Geometry& g, Boundary bc, int transverse_max, double upper,
                          const CatalogOptions& opt) {
  if (transverse_max < 0) throw ConfigError("catalog: transverse_max must be >= 0");
  std::vector<int> idx;
  const int first = std::holds_alternative<RectangleLine>(g) ? 1 : 0;
  for (int i = first; i <= transverse_max; ++i) idx.push_back(i);
  return build_catalog(g, bc, idx, upper, opt);
}

namespace {
void require_range(const ModeCatalog& c, double lambda, const Window& w) {
  if (c.upper_bound < lambda + w.tail_radius())
    throw RangeError("catalog reaches " + std::to_string(c.upper_bound) + " but lambda + tail = " +
                     std::to_string(lambda + w.tail_radius()) +
                     "; rebuild the catalog with a larger upper bound");
}
}  // namespace

std::span<const TraceMode> modes_in_window(const ModeCatalog& c, int index, double lambda,
                                           const Window& w) {
  require_range(c, lambda, w);
  const ModeGroup& g = c.group(index);
  const double R = w.tail_radius();
  auto lo = std::lower_bound(g.frequencies.begin(), g.frequencies.end(), lambda - R);
  auto hi = std::upper_bound(g.frequencies.begin(), g.frequencies.end(), lambda + R);
  return std::span<const TraceMode>(g.modes.data() + (lo - g.frequencies.begin()),
                                    static_cast<size_t>(hi - lo));
}

std::vector<TraceMode> modes_in_window(const ModeCatalog& c, double lambda, const Window& w) {
  std::vector<TraceMode> out;
  for (const auto& [k, g] : c.groups) {
    auto s = modes_in_window(c, k, lambda, w);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

}  // namespace tracekit
