#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pntlab/arith_sieve.hpp"

namespace pntlab {

enum class Weighting { uniform, logarithmic };

inline constexpr std::uint64_t kDefaultOutcomeBudget = 10'000'000;

// Finite distribution over integer tuples of fixed arity. Outcomes are sorted
// and unique; weights are unnormalised (exact counts under uniform weighting)
// and probability(i) = weight(i) / total.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  // Rows may repeat and come in any order; equal rows are merged.
  EmpiricalDistribution(std::size_t arity, std::vector<std::int32_t> rows,
                        std::vector<double> weights,
                        Weighting weighting = Weighting::uniform);

  std::size_t arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return weights_.size(); }
  Weighting weighting() const noexcept { return weighting_; }
  std::span<const std::int32_t> outcome(std::size_t i) const {
    return {rows_.data() + i * arity_, arity_};
  }
  double weight(std::size_t i) const { return weights_[i]; }
  double total() const noexcept { return total_; }
  double probability(std::size_t i) const { return weights_[i] / total_; }

  EmpiricalDistribution marginal(std::span<const std::size_t> coords) const;

 private:
  std::size_t arity_ = 0;
  std::vector<std::int32_t> rows_;
  std::vector<double> weights_;
  double total_ = 0;
  Weighting weighting_ = Weighting::uniform;
};

// Outcome of n is (mu(n+1), ..., mu(n+w), n mod p for p in primes).
// Coordinates 0..w-1 are the block, w.. the residues in list order.
// The budget caps distinct outcomes: min(N, prod p * 3^w) must fit.
EmpiricalDistribution empirical_joint(
    const ArithTable& mu, std::uint64_t N, std::size_t window,
    std::span<const std::uint64_t> primes, Weighting weighting = Weighting::uniform,
    std::uint64_t budget = kDefaultOutcomeBudget);

// Natural-log Shannon entropy of the projection onto coords.
double entropy(const EmpiricalDistribution& joint,
               std::span<const std::size_t> coords);
// H(x | z), computed from grouped conditionals rather than a difference.
double conditional_entropy(const EmpiricalDistribution& joint,
                           std::span<const std::size_t> x,
                           std::span<const std::size_t> z);

struct InfoMeasures {
  double H_x = 0;
  double H_x_given_z = 0;
  double H_x_given_yz = 0;
  double I = 0;  // I(x; y | z) = H(x|z) - H(x|y,z)
  std::size_t states = 0;
  double bias = 0;  // states / (2 N), plug-in estimator annotation
};

InfoMeasures info_measures(const EmpiricalDistribution& joint,
                           std::span<const std::size_t> x,
                           std::span<const std::size_t> y,
                           std::span<const std::size_t> z,
                           std::uint64_t samples = 0);

struct DecrementEntry {
  std::uint64_t p = 0;
  std::size_t window = 0;
  std::vector<std::uint64_t> conditioned_on;
  double I = 0;
  bool bad = false;
  std::size_t states = 0;
  double bias = 0;
};

struct DecrementReport {
  std::uint64_t N = 0;
  double epsilon = 0;
  double H_x1 = 0;
  double budget = 0;              // H(x_1) / eps
  double bad_reciprocal_sum = 0;  // sum over bad p of 1/p
  std::vector<DecrementEntry> entries;

  bool within(double slack = 0.1) const {
    return bad_reciprocal_sum <= budget + slack;
  }
};

// I(x_1..x_p ; y_p | y_q for earlier q <= condition_max), window w(p) = p.
DecrementReport entropy_decrement_scan(const ArithTable& mu, std::uint64_t N,
                                       std::span<const std::uint64_t> primes,
                                       double epsilon,
                                       std::uint64_t condition_max = 13,
                                       std::uint64_t budget = kDefaultOutcomeBudget);

struct PinskerGap {
  double d_tv = 0;
  double sqrt_I = 0;
  double margin = 0;  // sqrt_I - d_tv; the weak form asserts >= 0
};

PinskerGap pinsker_gap(const EmpiricalDistribution& joint,
                       std::span<const std::size_t> x,
                       std::span<const std::size_t> y);

struct PinskerAudit {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double min_margin = 0;
  double max_d_tv = 0;
  std::size_t failures = 0;  // margin < -1e-9
};

// Random rows x cols joints with uniform(0,1) cell weights, a quarter of the
// cells zeroed.
PinskerAudit pinsker_audit(std::size_t trials, std::uint64_t seed,
                           int rows = 4, int cols = 4);

// d_TV between blocks mu(n+1..n+w) and mu(n+1+m..n+w+m), n uniform in [1, N].
double stationarity_gap(const ArithTable& mu, std::uint64_t N,
                        std::size_t window, std::uint64_t shift);

// Coordinates [first, first + count).
std::vector<std::size_t> coord_range(std::size_t first, std::size_t count);

}  // namespace pntlab
