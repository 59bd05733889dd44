#pragma once

// Generalized divisor functions d_k(n), their exact summatory values and
// the on-disk cache format "DKT1".
//
// Layout of a cache file (all integers little-endian):
//   "DKT1" | u32 k | u64 limit | u64 stride | u32 values[limit]
//          | u64 checkpoints[limit/stride + 1] | u64 fnv1a(payload)
// where payload is every byte between the magic and the checksum.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "divlab/errors.hpp"

namespace divlab {

inline constexpr std::uint64_t kCheckpointStride = std::uint64_t{1} << 16;
inline constexpr std::uint64_t kDefaultMemoryBudget = std::uint64_t{4} << 30;  // bytes

/// Sieved values d_k(1..limit) with prefix sums at a fixed stride.
/// Immutable once built.
class DivisorTable {
 public:
  DivisorTable() = default;

  DivisorTable(int k, std::vector<std::uint32_t> values, std::uint64_t stride = kCheckpointStride)
      : k_(k), stride_(stride), values_(std::move(values)) {
    if (stride_ == 0) throw ArgumentError("checkpoint stride must be positive");
    values_.insert(values_.begin(), 0u);  // index 0 unused, keeps values_[n] == d_k(n)
    build_checkpoints();
  }

  [[nodiscard]] int k() const { return k_; }
  [[nodiscard]] std::uint64_t limit() const { return values_.empty() ? 0 : values_.size() - 1; }
  [[nodiscard]] std::uint64_t stride() const { return stride_; }

  /// d_k(n) for 1 <= n <= limit.
  [[nodiscard]] std::uint32_t operator[](std::uint64_t n) const { return values_[n]; }
  [[nodiscard]] std::uint32_t at(std::uint64_t n) const {
    if (n < 1 || n > limit()) throw RangeError("divisor table index " + std::to_string(n) + " out of range");
    return values_[n];
  }

  /// checkpoints()[i] == sum of d_k(n) for n <= i*stride.
  [[nodiscard]] const std::vector<std::uint64_t>& checkpoints() const { return checkpoints_; }
  /// Raw values with a leading zero at index 0.
  [[nodiscard]] const std::vector<std::uint32_t>& raw() const { return values_; }

  /// Exact sum of d_k(n) over n <= floor(x). Returns 0 for x < 1.
  [[nodiscard]] std::uint64_t summatory(double x) const {
    if (!(x >= 1.0)) return 0;
    if (x > static_cast<double>(limit())) {
      throw RangeError("summatory: x = " + std::to_string(x) + " exceeds table limit " +
                       std::to_string(limit()));
    }
    return summatory_index(static_cast<std::uint64_t>(std::floor(x)));
  }

  [[nodiscard]] std::uint64_t summatory_index(std::uint64_t n) const {
    const std::uint64_t c = n / stride_;
    std::uint64_t s = checkpoints_[c];
    for (std::uint64_t m = c * stride_ + 1; m <= n; ++m) s += values_[m];
    return s;
  }

  /// Exact sum of (-1)^n d_k(n) over n <= floor(x), from separate
  /// alternating checkpoints kept in memory only.
  [[nodiscard]] std::int64_t alternating_summatory(double x) const {
    if (!(x >= 1.0)) return 0;
    if (x > static_cast<double>(limit())) throw RangeError("alternating_summatory: x exceeds table limit");
    const auto n = static_cast<std::uint64_t>(std::floor(x));
    const std::uint64_t c = n / stride_;
    std::int64_t s = alt_checkpoints_[c];
    for (std::uint64_t m = c * stride_ + 1; m <= n; ++m) {
      s += (m & 1u) ? -static_cast<std::int64_t>(values_[m]) : static_cast<std::int64_t>(values_[m]);
    }
    return s;
  }

  /// Full prefix-sum array: result[n] = D_k(n), result[0] = 0.
  [[nodiscard]] std::vector<std::int64_t> prefix_sums() const {
    std::vector<std::int64_t> out(values_.size(), 0);
    std::int64_t s = 0;
    for (std::size_t n = 1; n < values_.size(); ++n) out[n] = (s += values_[n]);
    return out;
  }

  /// result[n] = sum_{m<=n} (-1)^m d_k(m).
  [[nodiscard]] std::vector<std::int64_t> alternating_prefix_sums() const {
    std::vector<std::int64_t> out(values_.size(), 0);
    std::int64_t s = 0;
    for (std::size_t n = 1; n < values_.size(); ++n) {
      s += (n & 1u) ? -static_cast<std::int64_t>(values_[n]) : static_cast<std::int64_t>(values_[n]);
      out[n] = s;
    }
    return out;
  }

  friend bool operator==(const DivisorTable& a, const DivisorTable& b) {
    return a.k_ == b.k_ && a.stride_ == b.stride_ && a.values_ == b.values_ &&
           a.checkpoints_ == b.checkpoints_;
  }

  // Used by the loader, which has already verified the checkpoints.
  static DivisorTable from_parts(int k, std::uint64_t stride, std::vector<std::uint32_t> values_with_zero,
                                 std::vector<std::uint64_t> checkpoints) {
    DivisorTable t;
    t.k_ = k;
    t.stride_ = stride;
    t.values_ = std::move(values_with_zero);
    t.checkpoints_ = std::move(checkpoints);
    t.build_alternating();
    return t;
  }

 private:
  void build_checkpoints() {
    const std::uint64_t lim = limit();
    checkpoints_.assign(lim / stride_ + 1, 0);
    std::uint64_t s = 0;
    for (std::uint64_t n = 1; n <= lim; ++n) {
      s += values_[n];
      if (n % stride_ == 0) checkpoints_[n / stride_] = s;
    }
    build_alternating();
  }

  void build_alternating() {
    const std::uint64_t lim = limit();
    alt_checkpoints_.assign(lim / stride_ + 1, 0);
    std::int64_t s = 0;
    for (std::uint64_t n = 1; n <= lim; ++n) {
      s += (n & 1u) ? -static_cast<std::int64_t>(values_[n]) : static_cast<std::int64_t>(values_[n]);
      if (n % stride_ == 0) alt_checkpoints_[n / stride_] = s;
    }
  }

  int k_ = 0;
  std::uint64_t stride_ = kCheckpointStride;
  std::vector<std::uint32_t> values_;
  std::vector<std::uint64_t> checkpoints_;
  std::vector<std::int64_t> alt_checkpoints_;
};

struct SieveOptions {
  std::uint64_t memory_budget = kDefaultMemoryBudget;
  std::uint64_t stride = kCheckpointStride;
};

/// d_k(n) for n <= limit by k-1 Dirichlet convolutions with the unit
/// function (a plain divisor-count sieve when k = 2). Each convolution is
/// O(limit log limit). Counts are held in 32 bits; an addition that would
/// wrap raises ResourceError instead.
[[nodiscard]] inline DivisorTable sieve_dk(int k, std::uint64_t limit, const SieveOptions& opts = {}) {
  if (k < 1 || k > 4) throw ArgumentError("sieve_dk supports 1 <= k <= 4, got " + std::to_string(k));
  if (limit < 1) throw ArgumentError("sieve_dk needs limit >= 1");
  // Two value arrays live at once during a convolution, plus checkpoints.
  const std::uint64_t need = 2 * (limit + 1) * sizeof(std::uint32_t) + 16 * (limit / opts.stride + 1);
  if (need > opts.memory_budget) {
    throw ResourceError("sieve_dk: limit " + std::to_string(limit) + " needs " + std::to_string(need) +
                        " bytes, budget is " + std::to_string(opts.memory_budget));
  }

  std::vector<std::uint32_t> cur(limit + 1, 1u);
  cur[0] = 0;
  for (int order = 2; order <= k; ++order) {
    std::vector<std::uint32_t> next(limit + 1, 0u);
    for (std::uint64_t d = 1; d <= limit; ++d) {
      const std::uint32_t w = cur[d];
      for (std::uint64_t m = d; m <= limit; m += d) {
        if (next[m] > std::numeric_limits<std::uint32_t>::max() - w) {
          throw ResourceError("sieve_dk: d_k(" + std::to_string(m) + ") overflows 32 bits");
        }
        next[m] += w;
      }
    }
    cur = std::move(next);
  }
  cur.erase(cur.begin());
  return DivisorTable(k, std::move(cur), opts.stride);
}

// ---------------------------------------------------------------------------
// Binary cache
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a(const unsigned char* data, std::size_t n, std::uint64_t h = kFnvOffset) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= kFnvPrime;
  }
  return h;
}

/// Little-endian byte sink that hashes everything it writes.
class LeWriter {
 public:
  explicit LeWriter(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  }

  void raw(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out_) throw IoError("write failed");
  }

  template <typename U>
  void put(U v) {
    std::array<unsigned char, sizeof(U)> b{};
    for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
    hash_ = fnv1a(b.data(), b.size(), hash_);
    raw(b.data(), b.size());
  }

  void put_double(double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    put(bits);
  }

  [[nodiscard]] std::uint64_t hash() const { return hash_; }

  void finish() {
    const std::uint64_t h = hash_;
    std::array<unsigned char, 8> b{};
    for (std::size_t i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((h >> (8 * i)) & 0xffu);
    raw(b.data(), b.size());
    out_.flush();
    if (!out_) throw IoError("flush failed");
  }

 private:
  std::ofstream out_;
  std::uint64_t hash_ = kFnvOffset;
};

/// Reader over a whole file held in memory; bounds-checked.
class LeReader {
 public:
  LeReader(const std::filesystem::path& path, std::string_view magic) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (bytes_.size() < magic.size() + 8 || std::memcmp(bytes_.data(), magic.data(), magic.size()) != 0) {
      throw FormatError(path.string() + ": bad magic or truncated file");
    }
    pos_ = magic.size();
    end_ = bytes_.size() - 8;
    std::uint64_t stored = 0;
    for (std::size_t i = 0; i < 8; ++i) stored |= std::uint64_t{bytes_[end_ + i]} << (8 * i);
    const std::uint64_t h = fnv1a(bytes_.data() + pos_, end_ - pos_);
    if (h != stored) throw FormatError(path.string() + ": checksum mismatch");
  }

  template <typename U>
  U get() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(U{bytes_[pos_ + i]} << (8 * i));
    pos_ += sizeof(U);
    return v;
  }

  double get_double() {
    const auto bits = get<std::uint64_t>();
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
  }

  void need(std::size_t n) const {
    if (n > end_ - pos_) throw FormatError("cache payload truncated");
  }
  [[nodiscard]] std::size_t remaining() const { return end_ - pos_; }

 private:
  std::vector<unsigned char> bytes_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

}  // namespace detail

inline void store_table(const DivisorTable& table, const std::filesystem::path& path) {
  detail::LeWriter w(path);
  w.raw("DKT1", 4);
  w.put(static_cast<std::uint32_t>(table.k()));
  w.put(table.limit());
  w.put(table.stride());
  const auto& v = table.raw();
  for (std::uint64_t n = 1; n <= table.limit(); ++n) w.put(v[n]);
  for (std::uint64_t c : table.checkpoints()) w.put(c);
  w.finish();
}

[[nodiscard]] inline DivisorTable load_table(const std::filesystem::path& path) {
  detail::LeReader r(path, "DKT1");
  const auto k = r.get<std::uint32_t>();
  if (k < 1 || k > 4) throw VersionError(path.string() + ": unsupported order k = " + std::to_string(k));
  const auto limit = r.get<std::uint64_t>();
  const auto stride = r.get<std::uint64_t>();
  if (stride == 0 || limit == 0) throw FormatError(path.string() + ": invalid header");
  const std::uint64_t n_check = limit / stride + 1;
  if (limit > r.remaining() / 4 || n_check > r.remaining() / 8 ||
      4 * limit + 8 * n_check != r.remaining()) {
    throw FormatError(path.string() + ": payload size does not match header");
  }
  std::vector<std::uint32_t> values(limit + 1, 0u);
  for (std::uint64_t n = 1; n <= limit; ++n) values[n] = r.get<std::uint32_t>();
  std::vector<std::uint64_t> checks(n_check);
  for (auto& c : checks) c = r.get<std::uint64_t>();
  // The checksum covers the bytes; the sums themselves are re-verified.
  std::uint64_t s = 0;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    s += values[n];
    if (n % stride == 0 && checks[n / stride] != s) throw FormatError(path.string() + ": checkpoint mismatch");
  }
  if (checks[0] != 0) throw FormatError(path.string() + ": checkpoint mismatch");
  return DivisorTable::from_parts(static_cast<int>(k), stride, std::move(values), std::move(checks));
}

}  // namespace divlab
