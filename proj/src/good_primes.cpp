#include "pntlab/good_primes.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "pntlab/error.hpp"
#include "pntlab/hilbert_sampling.hpp"
#include "pntlab/parallel.hpp"

namespace pntlab {

namespace {

void check_inputs(const ArithTable& mu, std::uint64_t p, std::uint64_t N,
                  double epsilon) {
  if (!mu.is_mobius()) throw InvalidArgument("goodness needs a mobius table");
  validate_epsilon(epsilon);
  if (N == 0 || N > mu.limit())
    throw InvalidArgument("scale " + std::to_string(N) + " outside [1, " +
                          std::to_string(mu.limit()) + "]");
  if (!is_prime(p)) throw InvalidArgument(std::to_string(p) + " is not prime");
}

// Calls visit(n, in_S) for n = 1..N while maintaining M(n) and the
// p-subsequence sum incrementally.
template <class Visit>
void sweep(const ArithTable& mu, std::uint64_t p, std::uint64_t N,
           double epsilon, Visit&& visit) {
  const auto values = mu.mobius_values();
  const auto sp = static_cast<std::int64_t>(p);
  std::int64_t total = 0;
  std::int64_t sub = 0;
  std::uint64_t next_multiple = p;
  for (std::uint64_t n = 1; n <= N; ++n) {
    total += values[n];
    if (n == next_multiple) {
      sub += values[n];
      next_multiple += p;
    }
    const double d = static_cast<double>(std::llabs(total - sp * sub)) /
                     static_cast<double>(n);
    visit(n, d >= epsilon);
  }
}

}  // namespace

void validate_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw InvalidArgument("epsilon must lie in (0, 1], got " +
                          std::to_string(epsilon));
}

std::vector<bool> discrepancy_profile(const ArithTable& mu, std::uint64_t p,
                                      std::uint64_t N, double epsilon) {
  check_inputs(mu, p, N, epsilon);
  std::vector<bool> bits(N + 1, false);
  sweep(mu, p, N, epsilon, [&](std::uint64_t n, bool in_s) { bits[n] = in_s; });
  return bits;
}

GoodnessReport badness_score(const ArithTable& mu, std::uint64_t p,
                             std::uint64_t N, double epsilon) {
  check_inputs(mu, p, N, epsilon);
  long double weighted = 0.0L;
  long double ell = 0.0L;
  sweep(mu, p, N, epsilon, [&](std::uint64_t n, bool in_s) {
    const long double w = 1.0L / static_cast<long double>(n);
    ell += w;
    if (in_s) weighted += w;
  });
  GoodnessReport r;
  r.p = p;
  r.epsilon = epsilon;
  r.N = N;
  r.badness = static_cast<double>(weighted / ell);
  r.is_good = r.badness <= epsilon;
  return r;
}

BadPrimeSummary bad_reciprocal_sum(const ArithTable& mu, std::uint64_t P,
                                   std::uint64_t N, double epsilon,
                                   unsigned threads) {
  if (P < 2) throw InvalidArgument("P must be >= 2");
  validate_epsilon(epsilon);
  const auto primes = primes_in_range(2, P);
  BadPrimeSummary s;
  s.reports.resize(primes.size());
  parallel_for(primes.size(), threads, [&](std::size_t i) {
    s.reports[i] = badness_score(mu, primes[i], N, epsilon);
  });
  long double bad = 0.0L, total = 0.0L, weighted = 0.0L;
  for (const auto& r : s.reports) {
    const long double inv = 1.0L / static_cast<long double>(r.p);
    total += inv;
    weighted += inv * r.badness;
    if (!r.is_good) {
      bad += inv;
      s.bad.push_back(r.p);
    }
  }
  s.sum = static_cast<double>(bad);
  s.total_reciprocal = static_cast<double>(total);
  s.weighted_badness = static_cast<double>(weighted);
  return s;
}

std::string goodness_csv(std::span<const GoodnessReport> reports) {
  std::ostringstream out;
  out.precision(17);
  out << "p,badness,is_good,N,epsilon\r\n";
  for (const auto& r : reports)
    out << r.p << ',' << r.badness << ',' << (r.is_good ? "true" : "false")
        << ',' << r.N << ',' << r.epsilon << "\r\n";
  return out.str();
}

GoodnessClassifier::GoodnessClassifier(const ArithTable& mu, std::uint64_t N,
                                       double epsilon)
    : mu_(mu), N_(N), epsilon_(epsilon) {
  check_inputs(mu, 2, N, epsilon);
  floor_prefix_.assign(N + 1, 0.0L);
  const auto values = mu.mobius_values();
  std::int64_t total = 0;
  long double acc = 0.0L;
  long double ell = 0.0L;
  for (std::uint64_t n = 1; n <= N; ++n) {
    total += values[n];
    const long double w = 1.0L / static_cast<long double>(n);
    ell += w;
    const double d = static_cast<double>(std::llabs(total)) / static_cast<double>(n);
    if (d >= epsilon) acc += w;
    floor_prefix_[n] = acc;
  }
  ell_ = ell;
}

double GoodnessClassifier::floor_bound(std::uint64_t p) const {
  const std::uint64_t upto = std::min<std::uint64_t>(p - 1, N_);
  return static_cast<double>(floor_prefix_[upto] / ell_);
}

const GoodnessReport& GoodnessClassifier::report(std::uint64_t p) {
  auto it = cache_.find(p);
  if (it == cache_.end()) {
    it = cache_.emplace(p, badness_score(mu_, p, N_, epsilon_)).first;
    min_badness_ = std::min(min_badness_, it->second.badness);
  }
  return it->second;
}

bool GoodnessClassifier::is_good(std::uint64_t p) {
  if (!cache_.contains(p) && floor_bound(p) > epsilon_) {
    ++floor_rejections_;
    return false;
  }
  return report(p).is_good;
}

}  // namespace pntlab
