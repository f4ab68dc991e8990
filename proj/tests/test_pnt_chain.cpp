#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pntlab/arith_sieve.hpp"
#include "pntlab/error.hpp"
#include "pntlab/pnt_chain.hpp"

using namespace pntlab;

namespace {

double naive_A(const std::vector<int>& mu, std::uint64_t N) {
  double s = 0;
  for (std::uint64_t M = 1; M <= N; ++M)
    s += std::abs(static_cast<double>(oracle::mertens(mu, M)) / M) / M;
  return s / oracle::harmonic(N);
}

double naive_stage(const std::vector<int>& mu, std::uint64_t N, std::uint64_t p) {
  double s = 0;
  for (std::uint64_t M = 1; M <= N; ++M) {
    const double v = static_cast<double>(oracle::mertens(mu, M)) / M +
                     static_cast<double>(p) / M * oracle::mertens(mu, M / p);
    s += std::abs(v) / M;
  }
  return s / oracle::harmonic(N);
}

TripleCertificate triple(std::uint64_t p, std::uint64_t p1, std::uint64_t p2) {
  TripleCertificate t;
  t.p = p;
  t.p1 = p1;
  t.p2 = p2;
  return t;
}

}  // namespace

TEST_CASE("averaged Mertens discrepancy against the oracle") {
  const auto ref = oracle::mobius_table(2000);
  const auto mu = build_table(TableKind::mobius, 2000);
  for (std::uint64_t N : {1ULL, 2ULL, 17ULL, 500ULL, 2000ULL})
    CHECK(log_avg_discrepancy(mu, N) == doctest::Approx(naive_A(ref, N)).epsilon(1e-12));
  CHECK(log_avg_discrepancy(mu, 2) == doctest::Approx(2.0 / 3.0));
  for (std::uint64_t p : {2ULL, 3ULL, 7ULL, 41ULL})
    CHECK(stage_value(mu, 2000, p) == doctest::Approx(naive_stage(ref, 2000, p)).epsilon(1e-12));
}

TEST_CASE("A(N) snapshot and trend") {
  const auto mu = build_table(TableKind::mobius, 1000000);
  const auto ps = prefix_sums(mu);
  const double want[] = {0.21150955405, 0.16241050231, 0.13163840762, 0.11061889370};
  std::uint64_t N = 1000;
  double prev = 1e9;
  for (double w : want) {
    const double a = log_avg_discrepancy(ps, N);
    CHECK(a == doctest::Approx(w).epsilon(1e-9));
    CHECK(a <= 1.1 * prev);
    prev = a;
    N *= 10;
  }
  CHECK(stage_value(ps, 1000000, 2) == doctest::Approx(0.18205).epsilon(1e-4));
  CHECK(stage_value(ps, 1000000, 139) == doctest::Approx(0.17952).epsilon(1e-4));
}

TEST_CASE("chain report structure") {
  const auto mu = build_table(TableKind::mobius, 100000);
  const auto r = chain_evaluate(mu, 100000, 0.1, triple(139, 11, 13));
  REQUIRE(r.stages.size() == 8);
  CHECK(r.stages.front().label == "s0");
  CHECK(r.stage("s0") == doctest::Approx(log_avg_discrepancy(mu, 100000)));
  CHECK(r.stage("s1_p") == doctest::Approx(stage_value(mu, 100000, 139)));
  CHECK(r.stage("s1_p2") == doctest::Approx(stage_value(mu, 100000, 13)));
  CHECK(r.stage("s3") == doctest::Approx(std::abs(prefix_sums(mu).mertens_at(100000)) / 1e5));
  CHECK(r.ell == doctest::Approx(oracle::harmonic(100000)));
  CHECK(r.triangle_slack >= -1e-12);
  CHECK(r.stage("s3") <= r.stage("s0") * r.ell);
  CHECK_THROWS_AS(r.stage("s9"), InvalidArgument);
}

TEST_CASE("triangle inequality between stages") {
  const auto mu = build_table(TableKind::mobius, 20000);
  oracle::Gen gen(41);
  const auto primes = oracle::primes_upto(200);
  for (int trial = 0; trial < 25; ++trial) {
    auto pick = [&] { return primes[gen.u64(0, primes.size() - 1)]; };
    const auto r = chain_evaluate(mu, gen.u64(500, 20000), 0.1, triple(pick(), pick(), pick()));
    REQUIRE(r.triangle_slack >= -1e-12);
    for (const auto& s : r.stages) REQUIRE(s.value >= 0.0);
  }
}

TEST_CASE("chain_verify reports the violating stage") {
  const auto mu = build_table(TableKind::mobius, 10000);
  CHECK_NOTHROW(chain_verify(mu, 10000, 0.1, triple(139, 11, 13)));
  try {
    chain_verify(mu, 10000, 0.1, triple(139, 11, 13), 0.5);
    FAIL("expected a violation");
  } catch (const ChainViolation& v) {
    CHECK(v.code() == ErrorCode::chain_violation);
    CHECK(v.stage() == "s0");
    CHECK(v.report().stages.size() == 8);
  }
  CHECK_THROWS_AS(stage_value(mu, 100, 101), InvalidArgument);
  CHECK_THROWS_AS(chain_evaluate(build_table(TableKind::log, 100), 100, 0.1, triple(7, 2, 3)),
                  InvalidArgument);
}

TEST_CASE("mu log identity") {
  CHECK(mu_log_identity_residual(100000) <= 1e-9);
  CHECK_THROWS_AS(mu_log_identity_residual(build_table(TableKind::mobius, 10),
                                           build_table(TableKind::log, 10)),
                  InvalidArgument);
}

TEST_CASE("scale decomposition") {
  const auto mu = build_table(TableKind::mobius, 10000);
  const auto lam = build_table(TableKind::mangoldt, 10000);
  const auto ref = oracle::mobius_table(10000);
  double exact = 0;
  for (std::uint64_t n = 1; n <= 10000; ++n) exact += ref[n] * std::log(static_cast<double>(n));
  for (double eps : {0.05, 0.1, 0.3}) {
    const auto r = scale_decomposition(mu, lam, 10000, eps);
    CHECK(r.exact == doctest::Approx(exact).epsilon(1e-12));
    CHECK(r.switched == doctest::Approx(r.exact).epsilon(1e-12));
    // blocks partition [1, N]
    std::uint64_t next = 1;
    for (const auto& b : r.blocks) {
      if (b.first > b.last) continue;
      REQUIRE(b.first == next);
      next = b.last + 1;
    }
    CHECK(next == 10001);
    double lam_total = 0;
    for (const auto& b : r.blocks) lam_total += b.block_sum;
    CHECK(lam_total == doctest::Approx(prefix_sums(lam).chebyshev_at(10000)));
  }
  CHECK(scale_decomposition(mu, lam, 10000, 0.05).exact == doctest::Approx(-197.16041907955));
  CHECK(scale_decomposition(mu, lam, 10000, 0.05).relative_error == doctest::Approx(0.955).epsilon(1e-3));
  CHECK_THROWS_AS(scale_decomposition(mu, lam, 10001, 0.1), InvalidArgument);
  CHECK_THROWS_AS(scale_decomposition(mu, lam, 100, 0.0), InvalidArgument);
}

TEST_CASE("Brun-Titchmarsh blocks past a = 100") {
  const auto mu = build_table(TableKind::mobius, 1000000);
  const auto lam = build_table(TableKind::mangoldt, 1000000);
  for (double eps : {0.05, 0.1}) {
    const auto r = scale_decomposition(mu, lam, 1000000, eps);
    CHECK(r.violations(100.0) == 0);
    for (const auto& b : r.blocks) REQUIRE(b.bound == doctest::Approx(10 * eps * b.a));
  }
}

TEST_CASE("Landau pair") {
  const auto mu = build_table(TableKind::mobius, 1000000);
  const auto lam = build_table(TableKind::mangoldt, 1000000);
  const auto lp = landau_pair(prefix_sums(mu), prefix_sums(lam), 1000000);
  CHECK(lp.mertens_ratio == doctest::Approx(0.000212));
  CHECK(std::abs(lp.psi_deviation) < 0.01);
}
