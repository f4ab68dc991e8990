#include "pntlab/hilbert_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pntlab/error.hpp"

namespace pntlab {

namespace {

// <a, b> = sum_k a_k conj(b_k)
std::complex<double> inner(const Vec& a, const Vec& b) {
  std::complex<double> acc = 0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * std::conj(b[k]);
  return acc;
}

void require_prime(std::uint64_t p) {
  if (!is_prime(p)) throw InvalidArgument(std::to_string(p) + " is not prime");
}

void require_scale(const ArithTable& f, std::uint64_t N) {
  if (N == 0) throw InvalidArgument("scale N must be >= 1");
  if (N > f.limit())
    throw InvalidArgument("scale " + std::to_string(N) + " exceeds table limit " +
                          std::to_string(f.limit()));
}

double subsequence_sum(const ArithTable& f, std::uint64_t N, std::uint64_t p) {
  double sub = 0.0;
  for (std::uint64_t m = p; m <= N; m += p) sub += f[m];
  return sub;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d <= n / d; d += 2)
    if (n % d == 0) return false;
  return true;
}

BhmSides bhm_sides(const WeightedVectorSystem& system) {
  const auto& w = system.weights;
  const auto& v = system.vectors;
  const std::size_t dim = system.target.size();
  if (dim == 0) throw InvalidArgument("dimension must be >= 1");
  if (w.size() != v.size())
    throw InvalidArgument("weights and vectors differ in count");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(w[i] >= 0.0))
      throw InvalidArgument("weight " + std::to_string(i) + " is negative");
    if (v[i].size() != dim)
      throw InvalidArgument("vector " + std::to_string(i) +
                            " has dimension " + std::to_string(v[i].size()) +
                            ", expected " + std::to_string(dim));
  }

  BhmSides s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s.lhs += w[i] * std::norm(inner(system.target, v[i]));
  double sup = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j)
      row += w[j] * std::abs(inner(v[i], v[j]));
    sup = std::max(sup, row);
  }
  s.rhs = inner(system.target, system.target).real() * sup;
  return s;
}

WeightedVectorSystem random_system(std::uint64_t seed, std::size_t max_dim,
                                   std::size_t max_vectors) {
  if (max_dim == 0 || max_vectors == 0)
    throw InvalidArgument("random systems need max_dim and max_vectors >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim_dist(1, max_dim);
  std::uniform_int_distribution<std::size_t> count_dist(1, max_vectors);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](std::size_t dim) {
    Vec v(dim);
    for (auto& c : v) c = {gauss(rng), gauss(rng)};
    return v;
  };
  WeightedVectorSystem s;
  const std::size_t dim = dim_dist(rng);
  const std::size_t count = count_dist(rng);
  for (std::size_t i = 0; i < count; ++i) {
    s.weights.push_back(unit(rng));
    s.vectors.push_back(draw(dim));
  }
  s.target = draw(dim);
  return s;
}

BhmAudit bhm_audit(std::size_t trials, std::uint64_t seed, std::size_t max_dim,
                   std::size_t max_vectors) {
  BhmAudit a;
  a.trials = trials;
  a.seed = seed;
  a.max_excess = trials ? -1e300 : 0.0;
  // One stream of per-trial seeds so trial t does not depend on earlier shapes.
  std::mt19937_64 seeder(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = bhm_sides(random_system(seeder(), max_dim, max_vectors));
    a.max_excess = std::max(a.max_excess, s.lhs - s.rhs);
    if (s.lhs > s.rhs + 1e-9) ++a.failures;
  }
  return a;
}

double sampling_discrepancy(const ArithTable& f, std::uint64_t N,
                            std::uint64_t p) {
  require_scale(f, N);
  require_prime(p);
  double total = 0.0;
  for (std::uint64_t n = 1; n <= N; ++n) total += f[n];
  const double sub = subsequence_sum(f, N, p);
  return std::abs(total - static_cast<double>(p) * sub) /
         static_cast<double>(N);
}

double sampling_discrepancy(const ArithTable& f, const PrefixSums& sums,
                            std::uint64_t N, std::uint64_t p) {
  require_scale(f, N);
  require_prime(p);
  if (sums.limit != f.limit() || sums.kind != f.kind())
    throw InvalidArgument("prefix sums do not belong to this table");
  const double total = sums.cumulative[N];
  const double sub = subsequence_sum(f, N, p);
  return std::abs(total - static_cast<double>(p) * sub) /
         static_cast<double>(N);
}

DiscrepancyRecord discrepancy_record(const ArithTable& f,
                                     const PrefixSums& sums, std::uint64_t N,
                                     std::uint64_t p, double epsilon) {
  DiscrepancyRecord r;
  r.p = p;
  r.scale = N;
  r.epsilon = epsilon;
  r.value = sampling_discrepancy(f, sums, N, p);
  r.in_S = r.value >= epsilon;
  return r;
}

TkResult tk_weighted_sum(const ArithTable& f, std::uint64_t N,
                         std::span<const std::uint64_t> S) {
  require_scale(f, N);
  for (std::uint64_t n = 1; n <= N; ++n) {
    if (std::abs(f[n]) > 1.0 + 1e-12)
      throw InvalidArgument("f is not 1-bounded at n = " + std::to_string(n) +
                            " (|f| = " + std::to_string(std::abs(f[n])) + ")");
  }
  TkResult r;
  if (S.empty()) return r;

  double total = 0.0;
  for (std::uint64_t n = 1; n <= N; ++n) total += f[n];
  const std::uint64_t pmax = *std::max_element(S.begin(), S.end());
  const long double cube = static_cast<long double>(pmax) * pmax * pmax;
  if (cube > static_cast<long double>(N))
    r.warnings.push_back("max(S)^3 = " + std::to_string(static_cast<double>(cube)) +
                         " exceeds N = " + std::to_string(N) +
                         "; the O(1) bound is not expected to apply");
  for (std::uint64_t p : S) {
    require_prime(p);
    const double sub = subsequence_sum(f, N, p);
    const double d = std::abs(total - static_cast<double>(p) * sub) /
                     static_cast<double>(N);
    r.value += d * d / static_cast<double>(p);
    r.trivial_bound += 1.0 / static_cast<double>(p);
  }
  return r;
}

double tk_crude_bound(std::uint64_t N, std::span<const std::uint64_t> S) {
  double bound = 0.0;
  for (std::uint64_t p : S) {
    const double ceil_np = static_cast<double>((N + p - 1) / p);
    const double t = 1.0 + static_cast<double>(p) * ceil_np / static_cast<double>(N);
    bound += t * t / static_cast<double>(p);
  }
  return bound;
}

}  // namespace pntlab
