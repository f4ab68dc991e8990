#include "pntlab/arith_sieve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pntlab/error.hpp"
#include "pntlab/parallel.hpp"

namespace pntlab {

namespace {

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::vector<std::uint64_t> small_primes(std::uint64_t bound) {
  std::vector<std::uint64_t> out;
  if (bound < 2) return out;
  std::vector<bool> composite(bound + 1, false);
  for (std::uint64_t i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return out;
}

std::uint64_t first_multiple_at_least(std::uint64_t p, std::uint64_t lo) {
  return (lo + p - 1) / p * p;
}

void check_segment_size(std::uint64_t segment_size) {
  if (segment_size == 0)
    throw InvalidArgument("segment size must be positive");
}

// mu on [lo, hi): divide out each base prime once; a second division means a
// square factor. Whatever remains above 1 is a single prime > sqrt(limit).
void sieve_mobius_segment(std::uint64_t lo, std::uint64_t hi,
                          const std::vector<std::uint64_t>& base,
                          std::int8_t* out) {
  const std::uint64_t len = hi - lo;
  std::vector<std::uint64_t> rem(len);
  for (std::uint64_t i = 0; i < len; ++i) {
    rem[i] = lo + i;
    out[i] = 1;
  }
  for (std::uint64_t p : base) {
    for (std::uint64_t m = first_multiple_at_least(p, lo); m < hi; m += p) {
      const std::uint64_t i = m - lo;
      rem[i] /= p;
      if (rem[i] % p == 0) {
        out[i] = 0;
      } else {
        out[i] = static_cast<std::int8_t>(-out[i]);
      }
    }
  }
  for (std::uint64_t i = 0; i < len; ++i) {
    if (out[i] != 0 && rem[i] > 1) out[i] = static_cast<std::int8_t>(-out[i]);
  }
}

void sieve_mangoldt_segment(std::uint64_t lo, std::uint64_t hi,
                            const std::vector<std::uint64_t>& base,
                            double* out) {
  const std::uint64_t len = hi - lo;
  std::vector<bool> composite(len, false);
  std::fill(out, out + len, 0.0);
  for (std::uint64_t p : base) {
    const double logp = std::log(static_cast<double>(p));
    for (std::uint64_t q = p; q < hi; q *= p) {
      if (q >= lo) out[q - lo] = logp;
      if (q > hi / p) break;
    }
    for (std::uint64_t m = std::max(p * p, first_multiple_at_least(p, lo));
         m < hi; m += p) {
      composite[m - lo] = true;
    }
  }
  for (std::uint64_t i = 0; i < len; ++i) {
    const std::uint64_t n = lo + i;
    if (n >= 2 && !composite[i] && out[i] == 0.0)
      out[i] = std::log(static_cast<double>(n));
  }
}

template <class T, class SegmentFn>
void sieve_segments(std::uint64_t limit, const SieveOptions& options,
                    std::vector<T>& padded, SegmentFn&& fn) {
  const std::uint64_t seg = options.segment_size;
  const std::uint64_t count = (limit + seg - 1) / seg;
  parallel_for(count, options.threads, [&](std::size_t s) {
    const std::uint64_t lo = 1 + s * seg;
    const std::uint64_t hi = std::min(limit + 1, lo + seg);
    fn(lo, hi, padded.data() + lo);
  });
}

ArithTable build_mangoldt(std::uint64_t limit, const SieveOptions& options) {
  const auto base = small_primes(isqrt(limit));
  std::vector<double> padded(limit + 1, 0.0);
  sieve_segments(limit, options, padded,
                 [&](std::uint64_t lo, std::uint64_t hi, double* out) {
                   sieve_mangoldt_segment(lo, hi, base, out);
                 });
  return ArithTable::from_real(TableKind::mangoldt, std::move(padded));
}

}  // namespace

std::string_view to_string(TableKind kind) {
  switch (kind) {
    case TableKind::mobius: return "mobius";
    case TableKind::mangoldt: return "mangoldt";
    case TableKind::log: return "log";
    case TableKind::lambda2: return "lambda2";
    case TableKind::custom: return "custom";
  }
  return "unknown";
}

TableKind parse_table_kind(std::string_view name) {
  for (auto kind : {TableKind::mobius, TableKind::mangoldt, TableKind::log,
                    TableKind::lambda2, TableKind::custom}) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidArgument("unknown table kind '" + std::string(name) + "'");
}

ArithTable ArithTable::from_mobius(std::vector<std::int8_t> padded) {
  if (padded.size() < 2) throw InvalidArgument("table limit must be >= 1");
  ArithTable t;
  t.kind_ = TableKind::mobius;
  t.limit_ = padded.size() - 1;
  padded[0] = 0;
  t.small_ = std::move(padded);
  return t;
}

ArithTable ArithTable::from_real(TableKind kind, std::vector<double> padded) {
  if (kind == TableKind::mobius)
    throw InvalidArgument("mobius tables hold 8-bit entries");
  if (padded.size() < 2) throw InvalidArgument("table limit must be >= 1");
  ArithTable t;
  t.kind_ = kind;
  t.limit_ = padded.size() - 1;
  padded[0] = 0.0;
  t.real_ = std::move(padded);
  return t;
}

ArithTable ArithTable::custom(std::span<const double> values) {
  std::vector<double> padded(values.size() + 1, 0.0);
  std::copy(values.begin(), values.end(), padded.begin() + 1);
  return from_real(TableKind::custom, std::move(padded));
}

double ArithTable::at(std::uint64_t n) const {
  if (n == 0 || n > limit_)
    throw InvalidArgument("index " + std::to_string(n) + " outside [1, " +
                          std::to_string(limit_) + "]");
  return (*this)[n];
}

std::int64_t PrefixSums::mertens_at(std::uint64_t x) const {
  if (kind != TableKind::mobius)
    throw InvalidArgument("Mertens sums need a mobius table");
  return mertens.at(x);
}

double PrefixSums::chebyshev_at(std::uint64_t x) const {
  if (kind != TableKind::mangoldt)
    throw InvalidArgument("Chebyshev sums need a mangoldt table");
  return cumulative.at(x);
}

std::uint64_t table_bytes(TableKind kind, std::uint64_t limit,
                          const SieveOptions& options) {
  const std::uint64_t entries = limit + 1;
  const std::uint64_t seg = std::min(options.segment_size, limit);
  const std::uint64_t workers = std::max(1u, options.threads);
  switch (kind) {
    case TableKind::mobius:
      return entries + workers * seg * (sizeof(std::uint64_t) + 1);
    case TableKind::mangoldt:
      return entries * sizeof(double) + workers * seg;
    case TableKind::lambda2:
      return 3 * entries * sizeof(double) + workers * seg;
    case TableKind::log:
    case TableKind::custom:
      return entries * sizeof(double);
  }
  return 0;
}

ArithTable build_table(TableKind kind, std::uint64_t limit,
                       const SieveOptions& options) {
  if (limit == 0) throw InvalidArgument("limit must be >= 1");
  check_segment_size(options.segment_size);
  const std::uint64_t need = table_bytes(kind, limit, options);
  if (need > options.memory_budget)
    throw ResourceError("building " + std::string(to_string(kind)) +
                        " to " + std::to_string(limit) + " requires " +
                        std::to_string(need) + " bytes, budget is " +
                        std::to_string(options.memory_budget));

  switch (kind) {
    case TableKind::mobius: {
      const auto base = small_primes(isqrt(limit));
      std::vector<std::int8_t> padded(limit + 1, 0);
      sieve_segments(limit, options, padded,
                     [&](std::uint64_t lo, std::uint64_t hi, std::int8_t* out) {
                       sieve_mobius_segment(lo, hi, base, out);
                     });
      return ArithTable::from_mobius(std::move(padded));
    }
    case TableKind::mangoldt:
      return build_mangoldt(limit, options);
    case TableKind::log: {
      std::vector<double> padded(limit + 1, 0.0);
      for (std::uint64_t n = 1; n <= limit; ++n)
        padded[n] = std::log(static_cast<double>(n));
      return ArithTable::from_real(TableKind::log, std::move(padded));
    }
    case TableKind::lambda2: {
      // log * Lambda + Lambda * Lambda
      const ArithTable lambda = build_mangoldt(limit, options);
      const ArithTable conv = dirichlet_convolve(lambda, lambda);
      std::vector<double> padded(conv.real_values().begin(),
                                 conv.real_values().end());
      for (std::uint64_t n = 2; n <= limit; ++n) {
        const double l = lambda[n];
        if (l != 0.0) padded[n] += std::log(static_cast<double>(n)) * l;
      }
      return ArithTable::from_real(TableKind::lambda2, std::move(padded));
    }
    case TableKind::custom:
      throw InvalidArgument("custom tables are built from explicit values");
  }
  throw InvalidArgument("unknown table kind");
}

ArithTable dirichlet_convolve(const ArithTable& f, const ArithTable& g) {
  if (f.limit() != g.limit())
    throw InvalidArgument("convolution limits differ: " +
                          std::to_string(f.limit()) + " vs " +
                          std::to_string(g.limit()));
  const std::uint64_t limit = f.limit();
  std::vector<double> out(limit + 1, 0.0);
  // d ascending fixes the accumulation order of every output entry.
  for (std::uint64_t d = 1; d <= limit; ++d) {
    const double fd = f[d];
    if (fd == 0.0) continue;
    for (std::uint64_t m = 1, n = d; n <= limit; ++m, n += d) {
      const double gm = g[m];
      if (gm != 0.0) out[n] += fd * gm;
    }
  }
  return ArithTable::from_real(TableKind::custom, std::move(out));
}

std::vector<double> harmonic_prefix(std::uint64_t limit) {
  std::vector<double> h(limit + 1, 0.0);
  long double acc = 0.0L;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    acc += 1.0L / static_cast<long double>(n);
    h[n] = static_cast<double>(acc);
  }
  return h;
}

PrefixSums prefix_sums(const ArithTable& table) {
  PrefixSums ps;
  ps.kind = table.kind();
  ps.limit = table.limit();
  const std::uint64_t limit = table.limit();
  ps.cumulative.assign(limit + 1, 0.0);
  if (table.is_mobius()) {
    ps.mertens.assign(limit + 1, 0);
    const auto mu = table.mobius_values();
    std::int64_t m = 0;
    for (std::uint64_t n = 1; n <= limit; ++n) {
      m += mu[n];
      ps.mertens[n] = m;
      ps.cumulative[n] = static_cast<double>(m);
    }
  } else {
    const auto v = table.real_values();
    double acc = 0.0;
    for (std::uint64_t n = 1; n <= limit; ++n) {
      acc += v[n];
      ps.cumulative[n] = acc;
    }
  }
  ps.harmonic = harmonic_prefix(limit);
  return ps;
}

std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi,
                                           std::uint64_t segment_size) {
  if (lo > hi)
    throw InvalidArgument("primes_in_range: lo " + std::to_string(lo) +
                          " > hi " + std::to_string(hi));
  check_segment_size(segment_size);
  lo = std::max<std::uint64_t>(lo, 2);
  std::vector<std::uint64_t> out;
  if (hi < 2) return out;
  const auto base = small_primes(isqrt(hi));
  std::vector<bool> composite;
  for (std::uint64_t seg_lo = lo; seg_lo <= hi;) {
    const std::uint64_t seg_hi =
        std::min(hi, seg_lo + segment_size - 1);  // inclusive
    composite.assign(seg_hi - seg_lo + 1, false);
    for (std::uint64_t p : base) {
      if (p * p > seg_hi) break;
      for (std::uint64_t m = std::max(p * p, first_multiple_at_least(p, seg_lo));
           m <= seg_hi; m += p) {
        composite[m - seg_lo] = true;
      }
    }
    for (std::uint64_t n = seg_lo; n <= seg_hi; ++n)
      if (!composite[n - seg_lo]) out.push_back(n);
    if (seg_hi == hi) break;
    seg_lo = seg_hi + 1;
  }
  return out;
}

ReciprocalCheck mertens_reciprocal_check(std::uint64_t P) {
  if (P < 3) throw InvalidArgument("mertens_reciprocal_check needs P >= 3");
  ReciprocalCheck r;
  long double acc = 0.0L;
  for (std::uint64_t p : primes_in_range(2, P))
    acc += 1.0L / static_cast<long double>(p);
  r.sum = static_cast<double>(acc);
  r.reference = std::log(std::log(static_cast<double>(P)));
  return r;
}

}  // namespace pntlab
