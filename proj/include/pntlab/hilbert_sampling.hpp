#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pntlab/arith_sieve.hpp"

namespace pntlab {

using Vec = std::vector<std::complex<double>>;

// Nonnegative weights w_i, vectors v_i and a target u, all of one dimension.
struct WeightedVectorSystem {
  std::vector<double> weights;
  std::vector<Vec> vectors;
  Vec target;
};

struct BhmSides {
  double lhs = 0;  // sum_i w_i |<u, v_i>|^2
  double rhs = 0;  // |u|^2 * sup_i sum_j w_j |<v_i, v_j>|
};

// Both sides of the Bombieri-Halasz-Montgomery inequality.
BhmSides bhm_sides(const WeightedVectorSystem& system);

struct BhmAudit {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double max_excess = 0;  // max over trials of lhs - rhs
  std::size_t failures = 0;  // lhs > rhs + 1e-9
};

// Random systems: dimension in [1, max_dim], 1..max_vectors vectors with
// complex normal entries, weights uniform in [0, 1). Seeded by mt19937_64.
WeightedVectorSystem random_system(std::uint64_t seed, std::size_t max_dim = 16,
                                   std::size_t max_vectors = 8);
BhmAudit bhm_audit(std::size_t trials, std::uint64_t seed,
                   std::size_t max_dim = 16, std::size_t max_vectors = 8);

// (1/N) |sum_{n<=N} f(n) - p sum_{n<=N, p|n} f(n)|. O(N) without prefix sums.
double sampling_discrepancy(const ArithTable& f, std::uint64_t N,
                            std::uint64_t p);
// Same quantity in O(N/p + 1), reading sum_{n<=N} f(n) from `sums`.
double sampling_discrepancy(const ArithTable& f, const PrefixSums& sums,
                            std::uint64_t N, std::uint64_t p);

struct DiscrepancyRecord {
  std::uint64_t p = 0;
  std::uint64_t scale = 0;
  double value = 0;
  double epsilon = 0;
  bool in_S = false;  // value >= epsilon
};

DiscrepancyRecord discrepancy_record(const ArithTable& f,
                                     const PrefixSums& sums, std::uint64_t N,
                                     std::uint64_t p, double epsilon);

struct TkResult {
  double value = 0;          // sum_{p in S} D_p(N)^2 / p
  double trivial_bound = 0;  // sum_{p in S} 1/p
  std::vector<std::string> warnings;
};

// Turan-Kubilius weighted discrepancy sum. Warns (does not fail) when
// max(S)^3 > N. Throws InvalidArgument naming the first index with |f| > 1.
TkResult tk_weighted_sum(const ArithTable& f, std::uint64_t N,
                         std::span<const std::uint64_t> S);

// sum_{p in S} (1/p) (1 + p ceil(N/p) / N)^2, an unconditional ceiling.
double tk_crude_bound(std::uint64_t N, std::span<const std::uint64_t> S);

bool is_prime(std::uint64_t n);

}  // namespace pntlab
