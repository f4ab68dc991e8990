#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pntlab/arith_sieve.hpp"
#include "pntlab/error.hpp"
#include "pntlab/selberg_scales.hpp"

namespace pntlab {

// Logarithmic averages over scales M <= N, all normalised by l(N):
//   avg_l(g) = (1/l(N)) sum_{M<=N} (1/M) |g(M)|.
// Sums sum_{n<=M/q} mu(n) use floor(M/q).

// A(N) = avg_l( M(M)/M )
double log_avg_discrepancy(const ArithTable& mu, std::uint64_t N);
double log_avg_discrepancy(const PrefixSums& mu_sums, std::uint64_t N);

// avg_l( M(M)/M + (p/M) M(floor(M/p)) )
double stage_value(const ArithTable& mu, std::uint64_t N, std::uint64_t p);
double stage_value(const PrefixSums& mu_sums, std::uint64_t N, std::uint64_t p);

struct ChainStage {
  std::string label;
  double value = 0;
};

struct ChainReport {
  std::uint64_t N = 0;
  double epsilon = 0;
  double K = 10;  // stages are checked against K * eps
  TripleCertificate triple;
  std::vector<ChainStage> stages;
  double ell = 0;  // l(N)
  // s2_cross <= s1(p) + s1(p1) + s2, computed on the same sums
  double triangle_slack = 0;

  double stage(const std::string& label) const;
  double max_stage() const;
};

class ChainViolation : public Error {
 public:
  ChainViolation(const std::string& what, ChainReport report, std::string stage)
      : Error(ErrorCode::chain_violation, what),
        report_(std::move(report)),
        stage_(std::move(stage)) {}
  const ChainReport& report() const noexcept { return report_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ChainReport report_;
  std::string stage_;
};

// Stage labels: s0, s1_p, s1_p1, s1_p2, s2, s2_cross, s2_p, s3.
ChainReport chain_evaluate(const ArithTable& mu, std::uint64_t N, double epsilon,
                           const TripleCertificate& triple, double K = 10.0);
// Same, but throws ChainViolation naming the first stage above K * eps.
ChainReport chain_verify(const ArithTable& mu, std::uint64_t N, double epsilon,
                         const TripleCertificate& triple, double K = 10.0);

// max_{n<=limit} |mu(n) log n + (mu * Lambda)(n)|
double mu_log_identity_residual(std::uint64_t limit,
                                const SieveOptions& options = {});
double mu_log_identity_residual(const ArithTable& mu, const ArithTable& lambda);

struct DecompositionBlock {
  double a = 0;
  std::uint64_t first = 0;  // ceil(a)
  std::uint64_t last = 0;   // ceil((1+eps) a) - 1, clipped to N
  double block_sum = 0;     // sum of Lambda(d) over the block
  double bound = 0;         // 10 eps a
  bool within = true;
  std::int64_t mertens_anchor = 0;  // M(floor(N/a))
};

struct DecompositionReport {
  std::uint64_t N = 0;
  double epsilon = 0;
  std::vector<DecompositionBlock> blocks;
  double exact = 0;          // sum_{n<=N} mu(n) log n
  double switched = 0;       // -sum_{d<=N} Lambda(d) M(floor(N/d)), same value
  double reconstructed = 0;  // -sum_a blocksum(a) M(floor(N/a))
  double relative_error = 0;
  double normalized_error = 0;  // |reconstructed - exact| / (N l(N))

  // Blocks with a >= a_min whose sum exceeds the bound.
  std::size_t violations(double a_min) const;
};

DecompositionReport scale_decomposition(const ArithTable& mu,
                                        const ArithTable& lambda,
                                        std::uint64_t N, double epsilon);
DecompositionReport scale_decomposition(std::uint64_t N, double epsilon,
                                        const SieveOptions& options = {});

struct LandauPair {
  double mertens_ratio = 0;   // |M(N)| / N
  double psi_deviation = 0;   // psi(N)/N - 1
};
LandauPair landau_pair(const PrefixSums& mu_sums, const PrefixSums& lambda_sums,
                       std::uint64_t N);

}  // namespace pntlab
