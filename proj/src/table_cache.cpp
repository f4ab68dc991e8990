#include <array>
#include <bit>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "pntlab/arith_sieve.hpp"
#include "pntlab/error.hpp"

namespace pntlab {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'P', 'N', 'T', 'A'};
constexpr std::size_t kHeaderSize = 16;

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t at,
                     int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i)
    v |= static_cast<std::uint64_t>(in[at + i]) << (8 * i);
  return v;
}

// Visits the payload bytes in file order without materializing them.
template <class Sink>
void for_each_payload_byte(const ArithTable& table, Sink&& sink) {
  if (table.is_mobius()) {
    const auto mu = table.mobius_values();
    for (std::uint64_t n = 1; n <= table.limit(); ++n)
      sink(static_cast<std::uint8_t>(mu[n]));
  } else {
    const auto v = table.real_values();
    for (std::uint64_t n = 1; n <= table.limit(); ++n) {
      const auto bits = std::bit_cast<std::uint64_t>(v[n]);
      for (int i = 0; i < 8; ++i) sink(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
  }
}

}  // namespace

std::vector<std::uint8_t> encode_table(const ArithTable& table) {
  std::vector<std::uint8_t> out;
  const std::size_t entry = table.is_mobius() ? 1 : 8;
  out.reserve(kHeaderSize + entry * table.limit());
  for (auto b : kMagic) out.push_back(b);
  put_le(out, kCacheVersion, 2);
  put_le(out, static_cast<std::uint16_t>(table.kind()), 2);
  put_le(out, table.limit(), 8);
  for_each_payload_byte(table, [&](std::uint8_t b) { out.push_back(b); });
  return out;
}

ArithTable decode_table(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize ||
      !std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
    throw InvalidArgument("not a PNTA table file");
  const auto version = get_le(bytes, 4, 2);
  if (version != kCacheVersion)
    throw InvalidArgument("unsupported PNTA version " + std::to_string(version));
  const auto raw_kind = get_le(bytes, 6, 2);
  if (raw_kind > static_cast<std::uint16_t>(TableKind::custom))
    throw InvalidArgument("unknown PNTA kind " + std::to_string(raw_kind));
  const auto kind = static_cast<TableKind>(raw_kind);
  const std::uint64_t limit = get_le(bytes, 8, 8);
  if (limit == 0) throw InvalidArgument("PNTA limit is zero");
  const std::uint64_t entry = kind == TableKind::mobius ? 1 : 8;
  if ((bytes.size() - kHeaderSize) / entry != limit ||
      (bytes.size() - kHeaderSize) % entry != 0)
    throw InvalidArgument("PNTA payload size does not match limit " +
                          std::to_string(limit));

  if (kind == TableKind::mobius) {
    std::vector<std::int8_t> padded(limit + 1, 0);
    for (std::uint64_t n = 1; n <= limit; ++n) {
      const auto v = static_cast<std::int8_t>(bytes[kHeaderSize + n - 1]);
      if (v < -1 || v > 1) throw InvalidArgument("PNTA mobius entry out of range");
      padded[n] = v;
    }
    return ArithTable::from_mobius(std::move(padded));
  }
  std::vector<double> padded(limit + 1, 0.0);
  for (std::uint64_t n = 1; n <= limit; ++n)
    padded[n] = std::bit_cast<double>(get_le(bytes, kHeaderSize + 8 * (n - 1), 8));
  return ArithTable::from_real(kind, std::move(padded));
}

void save_table(const ArithTable& table, const std::filesystem::path& path) {
  const auto bytes = encode_table(table);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write " + tmp);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ResourceError("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

ArithTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_table(bytes);
}

std::filesystem::path cache_path(const std::filesystem::path& dir,
                                 TableKind kind, std::uint64_t limit) {
  return dir / (std::string(to_string(kind)) + "_" + std::to_string(limit) +
                ".pnta");
}

ArithTable cached_table(TableKind kind, std::uint64_t limit,
                        const std::filesystem::path& dir,
                        const SieveOptions& options) {
  if (dir.empty()) return build_table(kind, limit, options);
  const auto path = cache_path(dir, kind, limit);
  if (std::filesystem::exists(path)) {
    try {
      auto t = load_table(path);
      if (t.kind() == kind && t.limit() == limit) return t;
    } catch (const InvalidArgument&) {
      // stale or corrupt file: rebuild below
    }
  }
  auto t = build_table(kind, limit, options);
  std::filesystem::create_directories(dir);
  save_table(t, path);
  return t;
}

std::uint64_t table_checksum(const ArithTable& table) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for_each_payload_byte(table, [&](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  });
  return h;
}

std::string checksum_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(digest));
  return buf;
}

}  // namespace pntlab
