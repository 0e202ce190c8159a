#include "tracekit/zero_cache.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <string>
#include <thread>

#include "tracekit/errors.hpp"

namespace tracekit {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'T', 'K', 'Z', 'C'};
constexpr std::uint32_t kFormatVersion = 1;

// Explicit little-endian encoding, independent of host byte order.
template <typename U>
void put_le(std::string& out, U v) {
  for (size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  put_le(out, bits);
}

struct Reader {
  const std::string& buf;
  size_t pos = 0;
  const fs::path& path;

  template <typename U>
  U get() {
    if (pos + sizeof(U) > buf.size())
      throw CacheError("zero cache " + path.string() + " is truncated or corrupt; run `cache clear` or `cache rebuild`");
    U v = 0;
    for (size_t i = 0; i < sizeof(U); ++i)
      v |= static_cast<U>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += sizeof(U);
    return v;
  }
  double f64() {
    std::uint64_t bits = get<std::uint64_t>();
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
  }
};

class FileLock {
 public:
  explicit FileLock(fs::path p) : path_(std::move(p)) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      if (FILE* f = std::fopen(path_.string().c_str(), "wx")) {
        std::fclose(f);
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    throw CacheError("zero cache lock " + path_.string() +
                     " is held; remove it if no other process is writing");
  }
  ~FileLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  fs::path path_;
};

}  // namespace

ZeroCache::ZeroCache(fs::path dir) : dir_(std::move(dir)) {}

std::map<ZeroCache::Key, ModeLine> ZeroCache::read_file(bool* stale) const {
  std::map<Key, ModeLine> out;
  *stale = false;
  const fs::path path = file();
  if (!fs::exists(path)) return out;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheError("cannot read zero cache " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0)
    throw CacheError("zero cache " + path.string() + " has a bad header; run `cache clear` or `cache rebuild`");
  Reader r{buf, 4, path};
  const auto format = r.get<std::uint32_t>();
  const auto code = r.get<std::uint32_t>();
  if (format != kFormatVersion)
    throw CacheError("zero cache " + path.string() + " has unknown format version " +
                     std::to_string(format) + "; run `cache clear`");
  const auto count = r.get<std::uint64_t>();
  if (code != kZeroCodeVersion) {
    *stale = true;
    return out;
  }
  for (std::uint64_t i = 0; i < count; ++i) {
    ModeLine line;
    line.order = static_cast<int>(r.get<std::uint32_t>());
    const auto kind = r.get<std::uint8_t>();
    if (kind > 1) throw CacheError("zero cache " + path.string() + " has a corrupt record; run `cache rebuild`");
    line.kind = kind == 0 ? ZeroKind::Dirichlet : ZeroKind::Neumann;
    line.upper_bound = r.f64();
    const auto n = r.get<std::uint64_t>();
    if (n > buf.size()) throw CacheError("zero cache " + path.string() + " has a corrupt record length; run `cache rebuild`");
    line.zeros.resize(n);
    for (auto& z : line.zeros) z = r.f64();
    out[{line.order, static_cast<int>(kind)}] = std::move(line);
  }
  if (r.pos != buf.size())
    throw CacheError("zero cache " + path.string() + " has trailing bytes; run `cache rebuild`");
  return out;
}

void ZeroCache::ensure_loaded() {
  if (loaded_) return;
  bool stale = false;
  lines_ = read_file(&stale);
  loaded_ = true;
}

std::optional<ModeLine> ZeroCache::lookup(int k, ZeroKind kind, double upper) {
  ensure_loaded();
  auto it = lines_.find({k, kind == ZeroKind::Dirichlet ? 0 : 1});
  if (it == lines_.end() || it->second.upper_bound < upper) return std::nullopt;
  ModeLine line = it->second;
  while (!line.zeros.empty() && line.zeros.back() > upper) line.zeros.pop_back();
  line.upper_bound = upper;
  return line;
}

void ZeroCache::store(const std::vector<ModeLine>& lines) {
  if (lines.empty()) return;
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (!fs::is_directory(dir_))
    throw CacheError("cache directory " + dir_.string() + " cannot be created");
  FileLock lock(dir_ / "bessel_zeros.lock");
  bool stale = false;
  auto merged = read_file(&stale);
  for (const auto& l : lines) {
    Key key{l.order, l.kind == ZeroKind::Dirichlet ? 0 : 1};
    auto it = merged.find(key);
    if (it == merged.end() || it->second.upper_bound < l.upper_bound) merged[key] = l;
  }
  std::string buf(kMagic, 4);
  put_le<std::uint32_t>(buf, kFormatVersion);
  put_le<std::uint32_t>(buf, kZeroCodeVersion);
  put_le<std::uint64_t>(buf, merged.size());
  for (const auto& [key, l] : merged) {
    put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(l.order));
    put_le<std::uint8_t>(buf, static_cast<std::uint8_t>(key.second));
    put_f64(buf, l.upper_bound);
    put_le<std::uint64_t>(buf, l.zeros.size());
    for (double z : l.zeros) put_f64(buf, z);
  }
  const fs::path tmp = file().string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw CacheError("cannot write zero cache " + tmp.string());
  }
  fs::rename(tmp, file(), ec);
  if (ec) throw CacheError("cannot replace zero cache " + file().string() + ": " + ec.message());
  lines_ = std::move(merged);
  loaded_ = true;
}

void ZeroCache::clear() {
  std::error_code ec;
  if (!fs::exists(dir_)) return;
  FileLock lock(dir_ / "bessel_zeros.lock");
  fs::remove(file(), ec);
  if (ec) throw CacheError("cannot remove " + file().string() + ": " + ec.message());
  lines_.clear();
  loaded_ = true;
}

ZeroCache::Status ZeroCache::status() {
  Status s;
  const fs::path path = file();
  s.exists = fs::exists(path);
  if (!s.exists) return s;
  s.bytes = fs::file_size(path);
  auto lines = read_file(&s.stale);
  s.records = lines.size();
  std::set<int> orders;
  for (const auto& [key, line] : lines) orders.insert(key.first);
  s.orders = orders.size();
  return s;
}

ModeLine zeros_via_cache(int k, ZeroKind kind, double upper, ZeroCache* cache) {
  if (cache) {
    if (auto hit = cache->lookup(k, kind, upper)) return *hit;
  }
  ModeLine line = find_zeros(k, kind, upper);
  if (cache) cache->store({line});
  return line;
}

}  // namespace tracekit
