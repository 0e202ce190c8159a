#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "tracekit/bessel.hpp"

namespace tracekit {

// Bumped whenever zero finding changes in a way that alters stored values.
constexpr std::uint32_t kZeroCodeVersion = 1;

// Binary store of ModeLines in <dir>/bessel_zeros.tkz (layout in docs/formats.md).
// Writers serialise through an exclusive lock file next to it.
class ZeroCache {
 public:
  explicit ZeroCache(std::filesystem::path dir);

  std::filesystem::path file() const { return dir_ / "bessel_zeros.tkz"; }
  const std::filesystem::path& dir() const { return dir_; }

  // A stored line with upper_bound >= upper, truncated to upper.
  std::optional<ModeLine> lookup(int k, ZeroKind kind, double upper);
  // Merge into the on-disk file (a line replaces one with a smaller bound).
  void store(const std::vector<ModeLine>& lines);
  void clear();

  struct Status {
    std::size_t records = 0;  // one per (order, kind)
    std::size_t orders = 0;   // distinct orders
    std::uintmax_t bytes = 0;
    bool exists = false;
    bool stale = false;  // written by a different code version; ignored
  };
  Status status();

 private:
  using Key = std::pair<int, int>;
  std::map<Key, ModeLine> read_file(bool* stale) const;
  void ensure_loaded();

  std::filesystem::path dir_;
  bool loaded_ = false;
  std::map<Key, ModeLine> lines_;
};

// Zeros through the cache when one is given; newly computed lines are stored.
ModeLine zeros_via_cache(int k, ZeroKind kind, double upper, ZeroCache* cache);

}  // namespace tracekit
