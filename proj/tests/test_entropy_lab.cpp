#include <doctest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "pntlab/arith_sieve.hpp"
#include "pntlab/entropy_lab.hpp"
#include "pntlab/error.hpp"

using namespace pntlab;

namespace {

using Key = std::vector<int>;
using Hist = std::map<Key, double>;

double H(const Hist& h) {
  double total = 0, s = 0;
  for (auto& [k, c] : h) total += c;
  for (auto& [k, c] : h)
    if (c > 0) s -= c / total * std::log(c / total);
  return s;
}

// Histograms of (block, residues) projections counted directly from mu.
struct Direct {
  Hist xyz, xz, yz, z;
};

Direct count(const std::vector<int>& mu, std::uint64_t N, std::size_t w,
             const std::vector<std::uint64_t>& cond, std::uint64_t p) {
  Direct d;
  for (std::uint64_t n = 1; n <= N; ++n) {
    Key x, z;
    for (std::size_t i = 1; i <= w; ++i) x.push_back(mu[n + i]);
    for (auto q : cond) z.push_back(static_cast<int>(n % q));
    const int y = static_cast<int>(n % p);
    Key xyz = x, xz = x, yz = {y};
    xyz.push_back(y);
    xyz.insert(xyz.end(), z.begin(), z.end());
    xz.insert(xz.end(), z.begin(), z.end());
    yz.insert(yz.end(), z.begin(), z.end());
    d.xyz[xyz] += 1;
    d.xz[xz] += 1;
    d.yz[yz] += 1;
    d.z[z] += 1;
  }
  return d;
}

double direct_I(const Direct& d) { return H(d.xz) + H(d.yz) - H(d.xyz) - H(d.z); }

std::span<const std::size_t> one(const std::size_t& c) { return {&c, 1}; }

EmpiricalDistribution random_joint(oracle::Gen& gen, std::size_t arity, int values,
                                   std::size_t rows) {
  std::vector<std::int32_t> cells;
  std::vector<double> w;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t a = 0; a < arity; ++a) cells.push_back(gen.i32(0, values - 1));
    w.push_back(gen.real(0.01, 1.0));
  }
  return EmpiricalDistribution(arity, cells, w);
}

}  // namespace

TEST_CASE("constant table gives a point mass") {
  const std::vector<double> ones(100, 1.0);
  const auto t = ArithTable::custom(ones);
  const auto d = empirical_joint(t, 50, 1, {});
  REQUIRE(d.size() == 1);
  CHECK(d.outcome(0)[0] == 1);
  CHECK(d.probability(0) == 1.0);
  const std::size_t c0 = 0;
  CHECK(entropy(d, one(c0)) == 0.0);
}

TEST_CASE("residue marginal is exactly uniform") {
  const auto mu = build_table(TableKind::mobius, 100);
  const std::uint64_t two[] = {2};
  const auto d = empirical_joint(mu, 60, 1, two);
  const std::size_t c1 = 1;
  const auto m = d.marginal(one(c1));
  REQUIRE(m.size() == 2);
  CHECK(m.probability(0) == 0.5);
  CHECK(m.probability(1) == 0.5);

  // joint residues mod 2, 3, 5 with N = 30 * 7: every cell holds exactly 7
  const auto big = build_table(TableKind::mobius, 300);
  const std::uint64_t ps[] = {2, 3, 5};
  const auto j = empirical_joint(big, 210, 2, ps);
  const auto coords = coord_range(2, 3);
  const auto r = j.marginal(coords);
  REQUIRE(r.size() == 30);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(r.weight(i) == 7.0);
  CHECK(r.total() == 210.0);
}

TEST_CASE("joint matches a naive histogram") {
  const auto mu = build_table(TableKind::mobius, 100010);
  const auto ref = oracle::mobius_table(100010);
  const std::uint64_t three[] = {3};
  const auto d = empirical_joint(mu, 100000, 2, three);
  Hist h;
  for (std::uint64_t n = 1; n <= 100000; ++n) h[{ref[n + 1], ref[n + 2], static_cast<int>(n % 3)}] += 1;
  REQUIRE(d.size() == h.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto o = d.outcome(i);
    const Key k(o.begin(), o.end());
    REQUIRE(h.count(k) == 1);
    CHECK(d.probability(i) == doctest::Approx(h[k] / 100000.0).epsilon(1e-12));
  }
}

TEST_CASE("logarithmic weighting") {
  const auto mu = build_table(TableKind::mobius, 200);
  const auto d = empirical_joint(mu, 100, 1, {}, Weighting::logarithmic);
  CHECK(d.weighting() == Weighting::logarithmic);
  CHECK(d.total() == doctest::Approx(oracle::harmonic(100)).epsilon(1e-12));
  double p_zero = 0;
  for (std::uint64_t n = 1; n <= 100; ++n)
    if (oracle::mobius(n + 1) == 0) p_zero += 1.0 / n;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.outcome(i)[0] == 0) CHECK(d.weight(i) == doctest::Approx(p_zero).epsilon(1e-12));
}

TEST_CASE("info measure examples") {
  // uniform over 6 outcomes
  std::vector<std::int32_t> cells;
  for (int i = 0; i < 6; ++i) cells.push_back(i);
  const EmpiricalDistribution u(1, cells, std::vector<double>(6, 2.5));
  const std::size_t c0 = 0, c1 = 1;
  CHECK(entropy(u, one(c0)) == doctest::Approx(std::log(6.0)).epsilon(1e-14));

  // product of two independent marginals
  std::vector<std::int32_t> pc;
  std::vector<double> pw;
  const double px[] = {0.2, 0.5, 0.3}, py[] = {0.6, 0.4};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 2; ++b) {
      pc.push_back(a);
      pc.push_back(b);
      pw.push_back(px[a] * py[b]);
    }
  const EmpiricalDistribution prod(2, pc, pw);
  CHECK(std::abs(info_measures(prod, one(c0), one(c1), {}).I) <= 1e-12);

  // deterministic copy
  const EmpiricalDistribution copy(2, {0, 0, 1, 1, 2, 2}, {0.5, 0.25, 0.25});
  const auto m = info_measures(copy, one(c0), one(c1), {});
  CHECK(m.I == doctest::Approx(m.H_x).epsilon(1e-14));
  CHECK(m.H_x_given_yz == doctest::Approx(0.0));

  CHECK_THROWS_AS(info_measures(copy, one(c0), one(c0), {}), InvalidArgument);
  const std::size_t c5 = 5;
  CHECK_THROWS_AS(entropy(copy, one(c5)), InvalidArgument);
}

TEST_CASE("chain rule, nonnegativity and monotonicity on random joints") {
  oracle::Gen gen(99);
  for (int trial = 0; trial < 300; ++trial) {
    const auto d = random_joint(gen, 3, gen.i32(1, 4), gen.u64(1, 40));
    const std::size_t x = 0, y = 1, z = 2;
    const std::size_t xy[] = {0, 1};
    const double hxy = entropy(d, xy);
    const double chain = entropy(d, one(x)) + conditional_entropy(d, one(y), one(x));
    REQUIRE(std::abs(hxy - chain) <= 1e-9);
    const auto m = info_measures(d, one(x), one(y), one(z));
    REQUIRE(m.I >= -1e-9);
    REQUIRE(m.H_x_given_yz <= m.H_x_given_z + 1e-9);
    REQUIRE(m.H_x_given_z <= m.H_x + 1e-9);
    // symmetric in x and y
    const auto swapped = info_measures(d, one(y), one(x), one(z));
    REQUIRE(std::abs(swapped.I - m.I) <= 1e-9);
  }
}

TEST_CASE("distribution construction") {
  const EmpiricalDistribution d(2, {1, 0, 0, 1, 1, 0}, {1.0, 2.0, 3.0});
  REQUIRE(d.size() == 2);
  CHECK(d.outcome(0)[0] == 0);
  CHECK(d.weight(1) == 4.0);
  CHECK(d.total() == 6.0);
  CHECK_THROWS_AS(EmpiricalDistribution(2, {1, 0}, {-1.0}), InvalidArgument);
  CHECK_THROWS_AS(EmpiricalDistribution(2, {1, 0, 1}, {1.0}), InvalidArgument);
  CHECK_THROWS_AS(EmpiricalDistribution(1, {1}, {0.0}), InvalidArgument);
}

TEST_CASE("joint preconditions and budget") {
  const auto mu = build_table(TableKind::mobius, 1000);
  CHECK_THROWS_AS(empirical_joint(mu, 995, 6, {}), InvalidArgument);
  CHECK_THROWS_AS(empirical_joint(mu, 100, 0, {}), InvalidArgument);
  const std::uint64_t ps[] = {101, 103};
  try {
    empirical_joint(mu, 900, 3, ps, Weighting::uniform, 500);
    FAIL("expected a resource error");
  } catch (const ResourceError& e) {
    CHECK(std::string(e.what()).find("280881") != std::string::npos);  // 101*103*27
  }
  CHECK_NOTHROW(empirical_joint(mu, 400, 3, ps, Weighting::uniform, 500));
}

TEST_CASE("decrement scan matches direct counting") {
  const std::uint64_t N = 1000000;
  const auto mu = build_table(TableKind::mobius, N + 20);
  const auto ref = oracle::mobius_table(N + 20);
  const std::uint64_t ps[] = {2, 3};
  const auto r = entropy_decrement_scan(mu, N, ps, 0.05);
  REQUIRE(r.entries.size() == 2);
  CHECK(r.entries[0].I == doctest::Approx(direct_I(count(ref, N, 2, {}, 2))).epsilon(1e-9));
  CHECK(r.entries[1].I == doctest::Approx(direct_I(count(ref, N, 3, {2}, 3))).epsilon(1e-9));
  CHECK(r.entries[1].conditioned_on == std::vector<std::uint64_t>{2});
  Hist x1;
  for (std::uint64_t n = 1; n <= N; ++n) x1[{ref[n + 1]}] += 1;
  CHECK(r.H_x1 == doctest::Approx(H(x1)).epsilon(1e-12));
  CHECK(r.budget == doctest::Approx(r.H_x1 / 0.05));
  CHECK(r.entries[0].bias == doctest::Approx(r.entries[0].states / 2e6));
}

TEST_CASE("decrement scan on a constant table") {
  const std::vector<double> ones(5000, 1.0);
  const auto t = ArithTable::custom(ones);
  const std::uint64_t ps[] = {2, 3, 5, 7};
  const auto r = entropy_decrement_scan(t, 4000, ps, 0.05);
  for (const auto& e : r.entries) {
    CHECK(std::abs(e.I) <= 1e-12);
    CHECK_FALSE(e.bad);
  }
  CHECK(r.bad_reciprocal_sum == 0.0);
  const std::uint64_t unsorted[] = {3, 2};
  CHECK_THROWS_AS(entropy_decrement_scan(t, 4000, unsorted, 0.05), InvalidArgument);
}

TEST_CASE("decrement budget at primes up to 13") {
  const std::uint64_t N = 1000000;
  const auto mu = build_table(TableKind::mobius, N + 20);
  const std::uint64_t ps[] = {2, 3, 5, 7, 11, 13};
  const auto r = entropy_decrement_scan(mu, N, ps, 0.05);
  CHECK(r.within(0.1));
  CHECK(r.bad_reciprocal_sum <= r.budget + 0.1);
  CHECK(r.entries.back().conditioned_on.size() == 5);
  for (const auto& e : r.entries) CHECK(e.I >= -1e-9);
}

TEST_CASE("Pinsker examples") {
  const std::size_t c0 = 0, c1 = 1;
  const EmpiricalDistribution bits(2, {0, 0, 1, 1}, {1.0, 1.0});
  const auto g = pinsker_gap(bits, one(c0), one(c1));
  CHECK(g.d_tv == doctest::Approx(0.5));
  CHECK(g.sqrt_I == doctest::Approx(std::sqrt(std::log(2.0))));
  CHECK(g.margin == doctest::Approx(0.332).epsilon(1e-3));

  const EmpiricalDistribution indep(2, {0, 0, 0, 1, 1, 0, 1, 1}, {1, 1, 1, 1});
  const auto z = pinsker_gap(indep, one(c0), one(c1));
  CHECK(z.d_tv == doctest::Approx(0.0));
  CHECK(z.sqrt_I == doctest::Approx(0.0));
}

TEST_CASE("total variation against a dense product") {
  oracle::Gen gen(12);
  const std::size_t c0 = 0, c1 = 1;
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = gen.i32(1, 5), cols = gen.i32(1, 5);
    std::vector<std::vector<double>> p(rows, std::vector<double>(cols, 0.0));
    std::vector<std::int32_t> cells;
    std::vector<double> w;
    double total = 0;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        if (gen.coin(0.6)) {
          p[i][j] = gen.real(0.01, 1);
          total += p[i][j];
          cells.push_back(i);
          cells.push_back(j);
          w.push_back(p[i][j]);
        }
    if (w.empty()) continue;
    std::vector<double> px(rows, 0), py(cols, 0);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        px[i] += p[i][j] / total;
        py[j] += p[i][j] / total;
      }
    double tv = 0;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) tv += std::abs(p[i][j] / total - px[i] * py[j]);
    const auto g = pinsker_gap(EmpiricalDistribution(2, cells, w), one(c0), one(c1));
    REQUIRE(g.d_tv == doctest::Approx(tv / 2).epsilon(1e-12));
    REQUIRE(g.margin >= -1e-9);
  }
}

TEST_CASE("Pinsker audit") {
  const auto a = pinsker_audit(1000, 0);
  CHECK(a.failures == 0);
  CHECK(a.min_margin >= -1e-9);
  CHECK(pinsker_audit(1000, 0).min_margin == a.min_margin);
}

TEST_CASE("stationarity gap") {
  const auto mu = build_table(TableKind::mobius, 1000100);
  CHECK(stationarity_gap(mu, 100000, 3, 0) == 0.0);
  // w = 1, m = 1: the two multisets differ in at most one entry each way
  const double g1 = stationarity_gap(mu, 100000, 1, 1);
  Hist a, b;
  for (std::uint64_t n = 1; n <= 100000; ++n) {
    a[{static_cast<int>(mu[n + 1])}] += 1;
    b[{static_cast<int>(mu[n + 2])}] += 1;
  }
  double tv = 0;
  for (int v = -1; v <= 1; ++v) tv += std::abs(a[{v}] - b[{v}]);
  CHECK(g1 == doctest::Approx(tv / 2 / 100000));
  CHECK(g1 <= 1e-5);
  CHECK(stationarity_gap(mu, 1000000, 3, 5) <= 1e-4);
  CHECK_THROWS_AS(stationarity_gap(mu, 1000095, 3, 5), InvalidArgument);
}
