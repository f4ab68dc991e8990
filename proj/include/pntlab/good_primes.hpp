#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pntlab/arith_sieve.hpp"

namespace pntlab {

// Logarithmically weighted share of scales n <= N at which p samples the
// Mobius average badly: badness = (1/l(N)) sum_{n<=N} (1/n) 1[p in S(n)].
struct GoodnessReport {
  std::uint64_t p = 0;
  double epsilon = 0;
  std::uint64_t N = 0;
  double badness = 0;
  bool is_good = false;  // badness <= epsilon; ties are good
};

// Bit n (1 <= n <= N) is set iff (1/n)|M(n) - p sum_{m<=n, p|m} mu(m)| >= eps.
// Entry 0 is unused. One O(N) sweep.
std::vector<bool> discrepancy_profile(const ArithTable& mu, std::uint64_t p,
                                      std::uint64_t N, double epsilon);

GoodnessReport badness_score(const ArithTable& mu, std::uint64_t p,
                             std::uint64_t N, double epsilon);

struct BadPrimeSummary {
  double sum = 0;               // sum over bad p <= P of 1/p
  double total_reciprocal = 0;  // sum over all p <= P of 1/p
  double weighted_badness = 0;  // sum over all p <= P of badness(p)/p
  std::vector<std::uint64_t> bad;
  std::vector<GoodnessReport> reports;  // ascending p
};

BadPrimeSummary bad_reciprocal_sum(const ArithTable& mu, std::uint64_t P,
                                   std::uint64_t N, double epsilon,
                                   unsigned threads = 1);

// Header: p,badness,is_good,N,epsilon
std::string goodness_csv(std::span<const GoodnessReport> reports);

void validate_epsilon(double epsilon);

// Caches full classifications at a fixed (N, eps). For n < p the divisibility
// term never fires, so badness(p) is at least
//   (1/l(N)) sum_{n < min(p, N+1)} (1/n) 1[|M(n)| >= eps n],
// which lets large primes be rejected without a sweep.
class GoodnessClassifier {
 public:
  GoodnessClassifier(const ArithTable& mu, std::uint64_t N, double epsilon);

  double floor_bound(std::uint64_t p) const;
  const GoodnessReport& report(std::uint64_t p);
  bool is_good(std::uint64_t p);

  std::uint64_t N() const noexcept { return N_; }
  double epsilon() const noexcept { return epsilon_; }
  std::size_t full_evaluations() const noexcept { return cache_.size(); }
  std::size_t floor_rejections() const noexcept { return floor_rejections_; }
  double min_badness_seen() const noexcept { return min_badness_; }

 private:
  const ArithTable& mu_;
  std::uint64_t N_;
  double epsilon_;
  long double ell_;
  std::vector<long double> floor_prefix_;
  std::unordered_map<std::uint64_t, GoodnessReport> cache_;
  std::size_t floor_rejections_ = 0;
  double min_badness_ = 1.0;
};

}  // namespace pntlab
