#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pntlab/arith_sieve.hpp"
#include "pntlab/error.hpp"
#include "pntlab/good_primes.hpp"

namespace pntlab {

// ((1/N) sum_{n<=N} Lambda_2(n)) / (2 log N)
double selberg_ratio(const ArithTable& lambda2, std::uint64_t N);

// Sorted primes up to a sieve limit.
class PrimeSource {
 public:
  explicit PrimeSource(std::uint64_t limit);
  std::uint64_t limit() const noexcept { return limit_; }
  std::span<const std::uint64_t> primes() const noexcept { return primes_; }
  // Primes in [lo, hi] (inclusive); requires hi <= limit.
  std::span<const std::uint64_t> range(std::uint64_t lo, std::uint64_t hi) const;

 private:
  std::uint64_t limit_;
  std::vector<std::uint64_t> primes_;
};

// Integers in the half-open real interval [(1+eps)^k, (1+eps)^(k+1)).
struct ScaleInterval {
  double lo = 0;
  double hi = 0;
  std::uint64_t first = 0;  // ceil(lo)
  std::uint64_t last = 0;   // ceil(hi) - 1; first > last when empty
};
ScaleInterval scale_interval(std::int64_t k, double epsilon);

struct ScaleRecord {
  std::int64_t k = 0;
  double epsilon = 0;
  ScaleInterval interval;
  std::uint64_t cutoff = 0;  // ceil(exp(eps^3 k)), at least 2
  double prime_sum = 0;      // sum_{p in I_k} 1/p
  // Unordered pairs p1 <= p2 (squares included) with p1 p2 in I_k and both
  // >= cutoff. The ordered-pair sum seen by Lambda * Lambda is
  // 2 * semiprime_sum minus the square terms.
  double semiprime_sum = 0;
  double threshold = 0;  // eps / k
  bool prime_flag = false;
  bool semiprime_flag = false;
  std::size_t prime_count = 0;
  std::size_t semiprime_count = 0;

  bool either() const noexcept { return prime_flag || semiprime_flag; }
};

ScaleRecord scale_sums(std::int64_t k, double epsilon,
                       const PrimeSource& primes);

std::vector<ScaleRecord> scan_scales(std::int64_t k0, std::int64_t kmax,
                                     double epsilon, const PrimeSource& primes,
                                     unsigned threads = 1);

// Largest k whose interval ends inside [1, limit].
std::int64_t max_scale_within(std::uint64_t limit, double epsilon);
// Smallest k with (1+eps)^k >= 1000.
std::int64_t default_k0(double epsilon);

// First (k, k') with |k - k'| <= 1, prime_flag(k) and semiprime_flag(k').
// Candidates are visited by ascending k, then k' = k, k - 1, k + 1.
std::optional<std::pair<std::int64_t, std::int64_t>> adjacent_pair(
    std::span<const ScaleRecord> scan);

std::vector<std::pair<std::int64_t, std::int64_t>> adjacent_pairs(
    std::span<const ScaleRecord> scan);

struct TripleCertificate {
  std::uint64_t p = 0;
  std::uint64_t p1 = 0;
  std::uint64_t p2 = 0;
  double ratio = 0;      // p1 p2 / p
  double deviation = 0;  // |ratio - 1|
  GoodnessReport good_p, good_p1, good_p2;
  std::int64_t k = 0;      // scale of p
  std::int64_t k_adj = 0;  // scale of p1 p2
  // All three primes classified good. Only certified triples satisfy the
  // hypotheses of the chain argument.
  bool certified = false;
};

struct TripleSearchOptions {
  std::optional<std::int64_t> k0;
  std::optional<std::int64_t> kmax;
  double deviation_multiplier = 3.0;
  unsigned threads = 1;
};

struct TripleSearchDiagnostics {
  std::int64_t k0 = 0;
  std::int64_t kmax = 0;
  std::size_t records = 0;
  std::size_t adjacent_pairs = 0;
  std::size_t primes_examined = 0;
  std::size_t semiprimes_examined = 0;
  std::size_t floor_rejections = 0;
  std::size_t full_classifications = 0;
  double min_badness_seen = 1.0;
  double min_floor_bound = 1.0;
};

class TripleNotFound : public Error {
 public:
  TripleNotFound(const std::string& what, TripleSearchDiagnostics diag)
      : Error(ErrorCode::not_found, what), diagnostics_(diag) {}
  const TripleSearchDiagnostics& diagnostics() const noexcept {
    return diagnostics_;
  }

 private:
  TripleSearchDiagnostics diagnostics_;
};

// Searches adjacent scale pairs for p in I_k and p1 p2 in I_k' with
// |p1 p2 / p - 1| <= C eps and all three primes good at (N, eps).
TripleCertificate find_good_triple(const ArithTable& mu, std::uint64_t N,
                                   double epsilon,
                                   const TripleSearchOptions& options = {});

// The first geometrically valid triple of the first adjacent pair, goodness
// recorded but not required.
TripleCertificate find_candidate_triple(const ArithTable& mu, std::uint64_t N,
                                        double epsilon,
                                        const TripleSearchOptions& options = {});

}  // namespace pntlab
