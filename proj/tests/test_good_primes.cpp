#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pntlab/arith_sieve.hpp"
#include "pntlab/error.hpp"
#include "pntlab/good_primes.hpp"

using namespace pntlab;

namespace {

// Recomputes every partial sum from scratch at each scale.
double naive_badness(const std::vector<int>& mu, std::uint64_t p, std::uint64_t N,
                     double eps) {
  double bad = 0, ell = 0;
  for (std::uint64_t n = 1; n <= N; ++n) {
    long long total = 0, sub = 0;
    for (std::uint64_t m = 1; m <= n; ++m) {
      total += mu[m];
      if (m % p == 0) sub += mu[m];
    }
    const double d = std::llabs(total - static_cast<long long>(p) * sub) / static_cast<double>(n);
    ell += 1.0 / n;
    if (d >= eps) bad += 1.0 / n;
  }
  return bad / ell;
}

}  // namespace

TEST_CASE("badness agrees with the quadratic oracle") {
  const std::uint64_t N = 1500;
  const auto mu = build_table(TableKind::mobius, N);
  const auto ref = oracle::mobius_table(N);
  for (double eps : {0.05, 0.1, 0.3, 0.7}) {
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 13ULL, 101ULL, 997ULL, 1499ULL}) {
      const auto r = badness_score(mu, p, N, eps);
      CHECK(r.badness == doctest::Approx(naive_badness(ref, p, N, eps)).epsilon(1e-12));
      CHECK(r.is_good == (r.badness <= eps));
      CHECK(r.p == p);
      CHECK(r.N == N);
    }
  }
}

TEST_CASE("discrepancy profile") {
  const auto mu = build_table(TableKind::mobius, 200);
  const auto bits = discrepancy_profile(mu, 2, 200, 0.3);
  REQUIRE(bits.size() == 201);
  CHECK_FALSE(bits[0]);
  CHECK(bits[1]);   // |M(1)| = 1
  CHECK(bits[10]);  // 0.3 exactly counts
  double w = 0, ell = 0;
  for (std::uint64_t n = 1; n <= 200; ++n) {
    ell += 1.0 / n;
    if (bits[n]) w += 1.0 / n;
  }
  CHECK(badness_score(mu, 2, 200, 0.3).badness == doctest::Approx(w / ell).epsilon(1e-12));
}

TEST_CASE("badness is monotone in epsilon") {
  const auto mu = build_table(TableKind::mobius, 20000);
  oracle::Gen gen(17);
  const auto primes = oracle::primes_upto(2000);
  for (int trial = 0; trial < 60; ++trial) {
    const auto p = primes[gen.u64(0, primes.size() - 1)];
    const double e1 = gen.real(0.01, 1.0);
    const double e2 = gen.real(0.01, 1.0);
    const auto [lo, hi] = std::minmax(e1, e2);
    const std::uint64_t N = gen.u64(1, 20000);
    const double b_lo = badness_score(mu, p, N, lo).badness;
    const double b_hi = badness_score(mu, p, N, hi).badness;
    REQUIRE(b_hi <= b_lo + 1e-15);
    REQUIRE(b_lo >= 0.0);
    REQUIRE(b_lo <= 1.0 + 1e-12);
  }
}

TEST_CASE("floor bound never exceeds the badness") {
  const std::uint64_t N = 50000;
  const auto mu = build_table(TableKind::mobius, N);
  oracle::Gen gen(23);
  const auto primes = primes_in_range(2, 3 * N);
  for (double eps : {0.05, 0.1, 0.2}) {
    GoodnessClassifier c(mu, N, eps);
    for (int trial = 0; trial < 40; ++trial) {
      const auto p = primes[gen.u64(0, primes.size() - 1)];
      const auto& r = c.report(p);
      REQUIRE(c.floor_bound(p) <= r.badness);
      REQUIRE(r.badness == badness_score(mu, p, N, eps).badness);
    }
  }
}

TEST_CASE("classifier pruning agrees with full evaluation") {
  const std::uint64_t N = 20000;
  const auto mu = build_table(TableKind::mobius, N);
  for (double eps : {0.1, 0.3, 0.5}) {
    GoodnessClassifier pruned(mu, N, eps);
    for (std::uint64_t p : primes_in_range(2, 3000))
      REQUIRE(pruned.is_good(p) == badness_score(mu, p, N, eps).is_good);
    CHECK(pruned.full_evaluations() + pruned.floor_rejections() == primes_in_range(2, 3000).size());
  }
}

TEST_CASE("at one million and eps 0.1 no small prime is good") {
  const auto mu = build_table(TableKind::mobius, 1000000);
  GoodnessClassifier c(mu, 1000000, 0.1);
  for (std::uint64_t p : {2ULL, 3ULL, 139ULL}) {
    const auto& r = c.report(p);
    CHECK_FALSE(r.is_good);
    CHECK(r.badness > 0.3);
  }
  CHECK(c.report(2).badness == doctest::Approx(0.3949).epsilon(1e-3));
  CHECK(c.floor_bound(1000003) == doctest::Approx(0.213).epsilon(1e-2));
}

TEST_CASE("large epsilon makes small primes good") {
  const auto mu = build_table(TableKind::mobius, 100000);
  for (std::uint64_t p : primes_in_range(2, 50)) CHECK(badness_score(mu, p, 100000, 0.4).is_good);
}

TEST_CASE("bad reciprocal sum") {
  const auto mu = build_table(TableKind::mobius, 5000);
  const auto s1 = bad_reciprocal_sum(mu, 60, 5000, 0.2, 1);
  const auto s3 = bad_reciprocal_sum(mu, 60, 5000, 0.2, 3);
  REQUIRE(s1.reports.size() == 17);
  CHECK(s1.sum == s3.sum);
  CHECK(s1.bad == s3.bad);
  double sum = 0, total = 0, weighted = 0;
  for (const auto& r : s1.reports) {
    total += 1.0 / r.p;
    weighted += r.badness / r.p;
    if (!r.is_good) sum += 1.0 / r.p;
  }
  CHECK(s1.sum == doctest::Approx(sum));
  CHECK(s1.total_reciprocal == doctest::Approx(total));
  CHECK(s1.weighted_badness == doctest::Approx(weighted));
  CHECK(s1.sum <= s1.total_reciprocal);
  CHECK_THROWS_AS(bad_reciprocal_sum(mu, 1, 5000, 0.2), InvalidArgument);
}

TEST_CASE("csv and validation") {
  GoodnessReport r{7, 0.1, 100, 0.25, false};
  const std::vector<GoodnessReport> rows = {r};
  const auto csv = goodness_csv(rows);
  CHECK(csv.rfind("p,badness,is_good,N,epsilon\r\n", 0) == 0);
  CHECK(csv.find("7,0.25,false,100,0.10000000000000001\r\n") != std::string::npos);
  CHECK_THROWS_AS(validate_epsilon(0.0), InvalidArgument);
  CHECK_THROWS_AS(validate_epsilon(1.5), InvalidArgument);
  CHECK_THROWS_AS(validate_epsilon(std::nan("")), InvalidArgument);
  CHECK_NOTHROW(validate_epsilon(1.0));
  const auto mu = build_table(TableKind::mobius, 100);
  CHECK_THROWS_AS(badness_score(mu, 4, 100, 0.1), InvalidArgument);
  CHECK_THROWS_AS(badness_score(mu, 2, 101, 0.1), InvalidArgument);
  CHECK_THROWS_AS(badness_score(build_table(TableKind::log, 100), 2, 100, 0.1), InvalidArgument);
}
