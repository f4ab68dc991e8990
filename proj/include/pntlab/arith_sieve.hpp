#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pntlab {

enum class TableKind : std::uint16_t {
  mobius = 0,
  mangoldt = 1,
  log = 2,
  lambda2 = 3,
  custom = 4,
};

std::string_view to_string(TableKind kind);
// Throws InvalidArgument for unknown names.
TableKind parse_table_kind(std::string_view name);

struct SieveOptions {
  std::uint64_t segment_size = std::uint64_t{1} << 20;
  unsigned threads = 1;
  // Upper bound on bytes held by dense tables and sieve segments at once.
  std::uint64_t memory_budget = std::uint64_t{8} << 30;
};

// Dense table of an arithmetic function on [1, limit]. Mobius tables hold
// 8-bit signed entries, every other kind holds doubles. Immutable once built.
class ArithTable {
 public:
  static ArithTable from_mobius(std::vector<std::int8_t> padded);
  // `padded` has limit + 1 entries; index 0 is ignored and stored as zero.
  static ArithTable from_real(TableKind kind, std::vector<double> padded);
  // values[i] is f(i + 1).
  static ArithTable custom(std::span<const double> values);

  TableKind kind() const noexcept { return kind_; }
  std::uint64_t limit() const noexcept { return limit_; }
  bool is_mobius() const noexcept { return kind_ == TableKind::mobius; }

  double operator[](std::uint64_t n) const {
    return is_mobius() ? static_cast<double>(small_[n]) : real_[n];
  }
  // Bounds-checked; throws InvalidArgument outside [1, limit].
  double at(std::uint64_t n) const;

  // Both spans are indexed by n (entry 0 unused). Only one is non-empty.
  std::span<const std::int8_t> mobius_values() const noexcept { return small_; }
  std::span<const double> real_values() const noexcept { return real_; }

  bool operator==(const ArithTable& other) const = default;

 private:
  TableKind kind_ = TableKind::custom;
  std::uint64_t limit_ = 0;
  std::vector<std::int8_t> small_;
  std::vector<double> real_;
};

// Running sums over a table plus the harmonic numbers l(x) = sum_{n<=x} 1/n.
// Every vector is indexed by x with entry 0 equal to zero.
struct PrefixSums {
  TableKind kind = TableKind::custom;
  std::uint64_t limit = 0;
  std::vector<std::int64_t> mertens;  // only for mobius tables, exact
  std::vector<double> cumulative;     // sum of values; psi(x) for mangoldt
  std::vector<double> harmonic;

  std::int64_t mertens_at(std::uint64_t x) const;
  double chebyshev_at(std::uint64_t x) const;
  double harmonic_at(std::uint64_t x) const { return harmonic.at(x); }
};

ArithTable build_table(TableKind kind, std::uint64_t limit,
                       const SieveOptions& options = {});

// (f * g)(n) = sum_{d | n} f(d) g(n / d). The result has kind custom.
ArithTable dirichlet_convolve(const ArithTable& f, const ArithTable& g);

PrefixSums prefix_sums(const ArithTable& table);

std::vector<double> harmonic_prefix(std::uint64_t limit);

// Primes in [lo, hi], ascending, via a segmented sieve.
std::vector<std::uint64_t> primes_in_range(
    std::uint64_t lo, std::uint64_t hi,
    std::uint64_t segment_size = std::uint64_t{1} << 20);

struct ReciprocalCheck {
  double sum = 0;        // sum_{p <= P} 1/p
  double reference = 0;  // log log P
};
ReciprocalCheck mertens_reciprocal_check(std::uint64_t P);

// Bytes held by a table of this kind and limit, including construction
// scratch (lambda2 needs an intermediate von Mangoldt table).
std::uint64_t table_bytes(TableKind kind, std::uint64_t limit,
                          const SieveOptions& options);

// -- binary cache -----------------------------------------------------------
// 16-byte little-endian header: "PNTA", u16 version, u16 kind, u64 limit,
// followed by limit entries (int8 for mobius, f64 otherwise).

inline constexpr std::uint16_t kCacheVersion = 1;

std::vector<std::uint8_t> encode_table(const ArithTable& table);
ArithTable decode_table(std::span<const std::uint8_t> bytes);
void save_table(const ArithTable& table, const std::filesystem::path& path);
ArithTable load_table(const std::filesystem::path& path);

std::filesystem::path cache_path(const std::filesystem::path& dir,
                                 TableKind kind, std::uint64_t limit);
// Loads from `dir` when a valid file exists, otherwise builds and stores it.
// An empty dir disables caching.
ArithTable cached_table(TableKind kind, std::uint64_t limit,
                        const std::filesystem::path& dir,
                        const SieveOptions& options = {});

// FNV-1a 64 over the cache payload (header excluded).
std::uint64_t table_checksum(const ArithTable& table);
std::string checksum_hex(std::uint64_t digest);

}  // namespace pntlab
