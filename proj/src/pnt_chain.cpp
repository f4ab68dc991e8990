#include "pntlab/pnt_chain.hpp"

#include <algorithm>
#include <cmath>

namespace pntlab {

namespace {

void check_mu_sums(const PrefixSums& s, std::uint64_t N) {
  if (s.kind != TableKind::mobius)
    throw InvalidArgument("chain stages need Mertens prefix sums");
  if (N == 0 || N > s.limit)
    throw InvalidArgument("N " + std::to_string(N) + " outside [1, " +
                          std::to_string(s.limit) + "]");
}

// (q/M) * M(floor(M/q)); q may exceed M.
double scaled_mertens(const PrefixSums& s, std::uint64_t M, std::uint64_t q) {
  const std::uint64_t idx = M / q;
  return static_cast<double>(q) * static_cast<double>(s.mertens[idx]) /
         static_cast<double>(M);
}

template <class Term>
double log_average(const PrefixSums& s, std::uint64_t N, Term&& term) {
  long double acc = 0.0L;
  for (std::uint64_t M = 1; M <= N; ++M)
    acc += std::abs(static_cast<long double>(term(M))) / static_cast<long double>(M);
  return static_cast<double>(acc / static_cast<long double>(s.harmonic[N]));
}

std::vector<double> block_starts(std::uint64_t N, double epsilon) {
  std::vector<double> a;
  for (std::int64_t j = 0;; ++j) {
    const double v = std::pow(1.0 + epsilon, static_cast<double>(j));
    a.push_back(v);
    if (v > static_cast<double>(N)) break;
  }
  return a;
}

}  // namespace

double ChainReport::stage(const std::string& label) const {
  for (const auto& s : stages)
    if (s.label == label) return s.value;
  throw InvalidArgument("no chain stage '" + label + "'");
}

double ChainReport::max_stage() const {
  double m = 0.0;
  for (const auto& s : stages) m = std::max(m, s.value);
  return m;
}

double log_avg_discrepancy(const PrefixSums& s, std::uint64_t N) {
  check_mu_sums(s, N);
  return log_average(s, N, [&](std::uint64_t M) {
    return static_cast<double>(s.mertens[M]) / static_cast<double>(M);
  });
}

double log_avg_discrepancy(const ArithTable& mu, std::uint64_t N) {
  return log_avg_discrepancy(prefix_sums(mu), N);
}

double stage_value(const PrefixSums& s, std::uint64_t N, std::uint64_t p) {
  check_mu_sums(s, N);
  if (p < 2 || p > N)
    throw InvalidArgument("stage prime " + std::to_string(p) +
                          " must satisfy 2 <= p <= N = " + std::to_string(N));
  return log_average(s, N, [&](std::uint64_t M) {
    return static_cast<double>(s.mertens[M]) / static_cast<double>(M) +
           scaled_mertens(s, M, p);
  });
}

double stage_value(const ArithTable& mu, std::uint64_t N, std::uint64_t p) {
  return stage_value(prefix_sums(mu), N, p);
}

ChainReport chain_evaluate(const ArithTable& mu, std::uint64_t N, double epsilon,
                           const TripleCertificate& triple, double K) {
  if (!mu.is_mobius()) throw InvalidArgument("chain needs a mobius table");
  const PrefixSums s = prefix_sums(mu);
  check_mu_sums(s, N);
  const std::uint64_t p = triple.p, p1 = triple.p1, p2 = triple.p2;
  const std::uint64_t q = p1 * p2;

  ChainReport r;
  r.N = N;
  r.epsilon = epsilon;
  r.K = K;
  r.triple = triple;
  r.ell = s.harmonic[N];

  const double s2 = log_average(s, N, [&](std::uint64_t M) {
    return scaled_mertens(s, M, p1) + scaled_mertens(s, M, q);
  });
  const double s2_cross = log_average(s, N, [&](std::uint64_t M) {
    return scaled_mertens(s, M, p) + scaled_mertens(s, M, q);
  });
  const double s1_p = stage_value(s, N, p);
  const double s1_p1 = stage_value(s, N, p1);

  r.stages = {
      {"s0", log_avg_discrepancy(s, N)},
      {"s1_p", s1_p},
      {"s1_p1", s1_p1},
      {"s1_p2", stage_value(s, N, p2)},
      {"s2", s2},
      {"s2_cross", s2_cross},
      {"s2_p", log_average(s, N, [&](std::uint64_t M) { return scaled_mertens(s, M, p); })},
      {"s3", std::abs(static_cast<double>(s.mertens[N])) / static_cast<double>(N)},
  };
  r.triangle_slack = s1_p + s1_p1 + s2 - s2_cross;
  return r;
}

ChainReport chain_verify(const ArithTable& mu, std::uint64_t N, double epsilon,
                         const TripleCertificate& triple, double K) {
  ChainReport r = chain_evaluate(mu, N, epsilon, triple, K);
  for (const auto& st : r.stages) {
    if (st.value > K * epsilon) {
      const std::string label = st.label;
      throw ChainViolation("chain stage " + label + " = " +
                               std::to_string(st.value) + " exceeds K*eps = " +
                               std::to_string(K * epsilon),
                           std::move(r), label);
    }
  }
  return r;
}

double mu_log_identity_residual(const ArithTable& mu, const ArithTable& lambda) {
  if (!mu.is_mobius() || lambda.kind() != TableKind::mangoldt)
    throw InvalidArgument("identity residual needs mobius and mangoldt tables");
  const ArithTable conv = dirichlet_convolve(mu, lambda);
  double worst = 0.0;
  for (std::uint64_t n = 1; n <= mu.limit(); ++n) {
    const double lhs = mu[n] * std::log(static_cast<double>(n));
    worst = std::max(worst, std::abs(lhs + conv[n]));
  }
  return worst;
}

double mu_log_identity_residual(std::uint64_t limit, const SieveOptions& options) {
  return mu_log_identity_residual(build_table(TableKind::mobius, limit, options),
                                  build_table(TableKind::mangoldt, limit, options));
}

std::size_t DecompositionReport::violations(double a_min) const {
  return static_cast<std::size_t>(std::count_if(
      blocks.begin(), blocks.end(),
      [&](const DecompositionBlock& b) { return b.a >= a_min && !b.within; }));
}

DecompositionReport scale_decomposition(const ArithTable& mu,
                                        const ArithTable& lambda,
                                        std::uint64_t N, double epsilon) {
  if (!mu.is_mobius() || lambda.kind() != TableKind::mangoldt)
    throw InvalidArgument("decomposition needs mobius and mangoldt tables");
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw InvalidArgument("epsilon must lie in (0, 1]");
  if (N == 0 || N > mu.limit() || N > lambda.limit())
    throw InvalidArgument("N " + std::to_string(N) + " exceeds table limits");
  const PrefixSums s = prefix_sums(mu);

  DecompositionReport r;
  r.N = N;
  r.epsilon = epsilon;

  long double exact = 0.0L, switched = 0.0L;
  for (std::uint64_t n = 1; n <= N; ++n) {
    exact += static_cast<long double>(mu[n]) * std::log(static_cast<long double>(n));
    switched -= static_cast<long double>(lambda[n]) *
                static_cast<long double>(s.mertens[N / n]);
  }
  r.exact = static_cast<double>(exact);
  r.switched = static_cast<double>(switched);

  // Consecutive starts share ceil() boundaries, so blocks partition [1, N].
  const auto a = block_starts(N, epsilon);
  long double recon = 0.0L;
  for (std::size_t j = 0; j + 1 < a.size(); ++j) {
    DecompositionBlock b;
    b.a = a[j];
    b.first = static_cast<std::uint64_t>(std::ceil(a[j]));
    const auto end = static_cast<std::uint64_t>(std::ceil(a[j + 1]));
    b.last = std::min<std::uint64_t>(end - 1, N);
    b.bound = 10.0 * epsilon * a[j];
    long double sum = 0.0L;
    for (std::uint64_t d = b.first; d <= b.last; ++d) sum += lambda[d];
    b.block_sum = static_cast<double>(sum);
    b.within = b.block_sum <= b.bound;
    b.mertens_anchor = s.mertens[static_cast<std::uint64_t>(
        std::floor(static_cast<double>(N) / a[j]))];
    recon -= sum * static_cast<long double>(b.mertens_anchor);
    r.blocks.push_back(b);
  }
  r.reconstructed = static_cast<double>(recon);
  const double err = std::abs(r.reconstructed - r.exact);
  r.relative_error = r.exact != 0.0 ? err / std::abs(r.exact) : err;
  r.normalized_error = err / (static_cast<double>(N) * s.harmonic[N]);
  return r;
}

DecompositionReport scale_decomposition(std::uint64_t N, double epsilon,
                                        const SieveOptions& options) {
  return scale_decomposition(build_table(TableKind::mobius, N, options),
                             build_table(TableKind::mangoldt, N, options), N,
                             epsilon);
}

LandauPair landau_pair(const PrefixSums& mu_sums, const PrefixSums& lambda_sums,
                       std::uint64_t N) {
  LandauPair lp;
  lp.mertens_ratio =
      std::abs(static_cast<double>(mu_sums.mertens_at(N))) / static_cast<double>(N);
  lp.psi_deviation = lambda_sums.chebyshev_at(N) / static_cast<double>(N) - 1.0;
  return lp;
}

}  // namespace pntlab
