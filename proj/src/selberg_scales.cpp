#include "pntlab/selberg_scales.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pntlab/parallel.hpp"

namespace pntlab {

namespace {

void check_open_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw InvalidArgument("scale epsilon must lie in (0, 1), got " +
                          std::to_string(epsilon));
}

std::uint64_t cutoff_for(std::int64_t k, double epsilon) {
  const double c = std::ceil(std::exp(epsilon * epsilon * epsilon *
                                      static_cast<double>(k)));
  return std::max<std::uint64_t>(2, static_cast<std::uint64_t>(c));
}

struct Semiprime {
  std::uint64_t p1;
  std::uint64_t p2;
};

// Unordered pairs p1 <= p2, both >= cutoff, with p1 p2 in [first, last].
template <class Visit>
void for_each_semiprime(const ScaleInterval& iv, std::uint64_t cutoff,
                        const PrimeSource& primes, Visit&& visit) {
  if (iv.first > iv.last) return;
  for (std::uint64_t p1 : primes.primes()) {
    if (p1 < cutoff) continue;
    if (p1 > iv.last / p1) break;
    const std::uint64_t lo = std::max(p1, (iv.first + p1 - 1) / p1);
    const std::uint64_t hi = iv.last / p1;
    if (lo > hi) continue;
    for (std::uint64_t p2 : primes.range(lo, hi)) visit(Semiprime{p1, p2});
  }
}

TripleCertificate make_certificate(std::uint64_t p, const Semiprime& s,
                                   std::int64_t k, std::int64_t k_adj) {
  TripleCertificate c;
  c.p = p;
  c.p1 = s.p1;
  c.p2 = s.p2;
  const std::uint64_t prod = s.p1 * s.p2;
  c.ratio = static_cast<double>(prod) / static_cast<double>(p);
  const std::uint64_t diff = prod > p ? prod - p : p - prod;
  c.deviation = static_cast<double>(diff) / static_cast<double>(p);
  c.k = k;
  c.k_adj = k_adj;
  return c;
}

bool within_deviation(std::uint64_t p, const Semiprime& s, double bound) {
  const std::uint64_t prod = s.p1 * s.p2;
  const std::uint64_t diff = prod > p ? prod - p : p - prod;
  return static_cast<double>(diff) / static_cast<double>(p) <= bound;
}

struct SearchSetup {
  std::int64_t k0 = 0;
  std::int64_t kmax = 0;
  std::vector<ScaleRecord> scan;
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
};

SearchSetup prepare_search(const ArithTable& mu, std::uint64_t N,
                           double epsilon, const TripleSearchOptions& options,
                           const PrimeSource& primes) {
  if (!mu.is_mobius()) throw InvalidArgument("triple search needs a mobius table");
  validate_epsilon(epsilon);
  check_open_epsilon(epsilon);
  if (N < 2 || N > mu.limit())
    throw InvalidArgument("scale " + std::to_string(N) + " outside [2, " +
                          std::to_string(mu.limit()) + "]");
  SearchSetup s;
  s.k0 = options.k0.value_or(default_k0(epsilon));
  if (s.k0 < 1) throw InvalidArgument("k0 must be >= 1");
  const auto window =
      s.k0 + static_cast<std::int64_t>(std::ceil(1.0 / (epsilon * epsilon)));
  const std::int64_t cap = max_scale_within(N, epsilon);
  s.kmax = std::min(options.kmax.value_or(window), cap);
  s.scan = scan_scales(s.k0, s.kmax, epsilon, primes, options.threads);
  s.pairs = adjacent_pairs(s.scan);
  return s;
}

}  // namespace

double selberg_ratio(const ArithTable& lambda2, std::uint64_t N) {
  if (N < 3) throw InvalidArgument("selberg_ratio needs N >= 3");
  if (lambda2.is_mobius()) throw InvalidArgument("selberg_ratio needs a Lambda_2 table");
  if (N > lambda2.limit())
    throw InvalidArgument("N " + std::to_string(N) + " exceeds table limit " +
                          std::to_string(lambda2.limit()));
  long double acc = 0.0L;
  const auto v = lambda2.real_values();
  for (std::uint64_t n = 1; n <= N; ++n) acc += v[n];
  const long double avg = acc / static_cast<long double>(N);
  return static_cast<double>(avg / (2.0L * std::log(static_cast<long double>(N))));
}

PrimeSource::PrimeSource(std::uint64_t limit)
    : limit_(limit), primes_(limit >= 2 ? primes_in_range(2, limit)
                                        : std::vector<std::uint64_t>{}) {}

std::span<const std::uint64_t> PrimeSource::range(std::uint64_t lo,
                                                  std::uint64_t hi) const {
  if (hi > limit_)
    throw ResourceError("primes up to " + std::to_string(hi) +
                        " needed, sieve limit is " + std::to_string(limit_));
  if (lo > hi) return {};
  const auto b = std::lower_bound(primes_.begin(), primes_.end(), lo);
  const auto e = std::upper_bound(b, primes_.end(), hi);
  return {b, e};
}

ScaleInterval scale_interval(std::int64_t k, double epsilon) {
  ScaleInterval iv;
  iv.lo = std::pow(1.0 + epsilon, static_cast<double>(k));
  iv.hi = std::pow(1.0 + epsilon, static_cast<double>(k + 1));
  iv.first = static_cast<std::uint64_t>(std::ceil(iv.lo));
  const auto end = static_cast<std::uint64_t>(std::ceil(iv.hi));
  iv.last = end - 1;
  return iv;
}

ScaleRecord scale_sums(std::int64_t k, double epsilon,
                       const PrimeSource& primes) {
  check_open_epsilon(epsilon);
  if (k < 1) throw InvalidArgument("scale index k must be >= 1");
  ScaleRecord r;
  r.k = k;
  r.epsilon = epsilon;
  r.interval = scale_interval(k, epsilon);
  r.cutoff = cutoff_for(k, epsilon);
  r.threshold = epsilon / static_cast<double>(k);
  if (r.interval.last > primes.limit())
    throw ResourceError("scale k=" + std::to_string(k) + " needs primes up to " +
                        std::to_string(r.interval.last) + ", sieve limit is " +
                        std::to_string(primes.limit()));

  long double acc = 0.0L;
  if (r.interval.first <= r.interval.last) {
    for (std::uint64_t p : primes.range(r.interval.first, r.interval.last)) {
      acc += 1.0L / static_cast<long double>(p);
      ++r.prime_count;
    }
  }
  r.prime_sum = static_cast<double>(acc);

  long double semi = 0.0L;
  for_each_semiprime(r.interval, r.cutoff, primes, [&](const Semiprime& s) {
    semi += 1.0L / static_cast<long double>(s.p1 * s.p2);
    ++r.semiprime_count;
  });
  r.semiprime_sum = static_cast<double>(semi);
  r.prime_flag = r.prime_sum >= r.threshold;
  r.semiprime_flag = r.semiprime_sum >= r.threshold;
  return r;
}

std::vector<ScaleRecord> scan_scales(std::int64_t k0, std::int64_t kmax,
                                     double epsilon, const PrimeSource& primes,
                                     unsigned threads) {
  if (k0 > kmax) return {};
  std::vector<ScaleRecord> out(static_cast<std::size_t>(kmax - k0 + 1));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    out[i] = scale_sums(k0 + static_cast<std::int64_t>(i), epsilon, primes);
  });
  return out;
}

std::int64_t max_scale_within(std::uint64_t limit, double epsilon) {
  check_open_epsilon(epsilon);
  std::int64_t k = 0;
  while (scale_interval(k + 1, epsilon).last <= limit) ++k;
  return k;
}

std::int64_t default_k0(double epsilon) {
  check_open_epsilon(epsilon);
  std::int64_t k = 1;
  while (std::pow(1.0 + epsilon, static_cast<double>(k)) < 1000.0) ++k;
  return k;
}

std::vector<std::pair<std::int64_t, std::int64_t>> adjacent_pairs(
    std::span<const ScaleRecord> scan) {
  std::map<std::int64_t, const ScaleRecord*> by_k;
  for (const auto& r : scan) by_k[r.k] = &r;
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (const auto& [k, rec] : by_k) {
    if (!rec->prime_flag) continue;
    for (std::int64_t kk : {k, k - 1, k + 1}) {
      const auto it = by_k.find(kk);
      if (it != by_k.end() && it->second->semiprime_flag) out.emplace_back(k, kk);
    }
  }
  return out;
}

std::optional<std::pair<std::int64_t, std::int64_t>> adjacent_pair(
    std::span<const ScaleRecord> scan) {
  const auto all = adjacent_pairs(scan);
  if (all.empty()) return std::nullopt;
  return all.front();
}

TripleCertificate find_good_triple(const ArithTable& mu, std::uint64_t N,
                                   double epsilon,
                                   const TripleSearchOptions& options) {
  const PrimeSource primes(N);
  const SearchSetup setup = prepare_search(mu, N, epsilon, options, primes);
  const double bound = options.deviation_multiplier * epsilon;

  GoodnessClassifier cls(mu, N, epsilon);
  TripleSearchDiagnostics diag;
  diag.k0 = setup.k0;
  diag.kmax = setup.kmax;
  diag.records = setup.scan.size();
  diag.adjacent_pairs = setup.pairs.size();

  for (const auto& [k, k_adj] : setup.pairs) {
    const ScaleInterval iv = scale_interval(k, epsilon);
    const ScaleInterval jv = scale_interval(k_adj, epsilon);
    std::vector<Semiprime> semis;
    for_each_semiprime(jv, cutoff_for(k_adj, epsilon), primes,
                       [&](const Semiprime& s) { semis.push_back(s); });
    for (std::uint64_t p : primes.range(iv.first, iv.last)) {
      ++diag.primes_examined;
      diag.min_floor_bound = std::min(diag.min_floor_bound, cls.floor_bound(p));
      if (!cls.is_good(p)) continue;
      for (const auto& s : semis) {
        ++diag.semiprimes_examined;
        if (!within_deviation(p, s, bound)) continue;
        if (!cls.is_good(s.p1) || !cls.is_good(s.p2)) continue;
        TripleCertificate c = make_certificate(p, s, k, k_adj);
        c.good_p = cls.report(p);
        c.good_p1 = cls.report(s.p1);
        c.good_p2 = cls.report(s.p2);
        c.certified = true;
        return c;
      }
    }
  }
  diag.floor_rejections = cls.floor_rejections();
  diag.full_classifications = cls.full_evaluations();
  diag.min_badness_seen = cls.min_badness_seen();
  throw TripleNotFound(
      "no good triple for N=" + std::to_string(N) + ", eps=" +
          std::to_string(epsilon) + " over k in [" + std::to_string(setup.k0) +
          ", " + std::to_string(setup.kmax) + "]",
      diag);
}

TripleCertificate find_candidate_triple(const ArithTable& mu, std::uint64_t N,
                                        double epsilon,
                                        const TripleSearchOptions& options) {
  const PrimeSource primes(N);
  const SearchSetup setup = prepare_search(mu, N, epsilon, options, primes);
  const double bound = options.deviation_multiplier * epsilon;
  TripleSearchDiagnostics diag;
  diag.k0 = setup.k0;
  diag.kmax = setup.kmax;
  diag.records = setup.scan.size();
  diag.adjacent_pairs = setup.pairs.size();

  for (const auto& [k, k_adj] : setup.pairs) {
    const ScaleInterval iv = scale_interval(k, epsilon);
    const ScaleInterval jv = scale_interval(k_adj, epsilon);
    std::vector<Semiprime> semis;
    for_each_semiprime(jv, cutoff_for(k_adj, epsilon), primes,
                       [&](const Semiprime& s) { semis.push_back(s); });
    for (std::uint64_t p : primes.range(iv.first, iv.last)) {
      for (const auto& s : semis) {
        if (!within_deviation(p, s, bound)) continue;
        TripleCertificate c = make_certificate(p, s, k, k_adj);
        c.good_p = badness_score(mu, p, N, epsilon);
        c.good_p1 = badness_score(mu, s.p1, N, epsilon);
        c.good_p2 = badness_score(mu, s.p2, N, epsilon);
        c.certified = c.good_p.is_good && c.good_p1.is_good && c.good_p2.is_good;
        return c;
      }
    }
  }
  throw TripleNotFound("no geometric candidate triple for N=" +
                           std::to_string(N),
                       diag);
}

}  // namespace pntlab
