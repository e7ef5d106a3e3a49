#pragma once

#include "holq/holq.hpp"
#include "holq/hypothesis.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace holq {

/// Maximum likelihood fit of vec(X) ~ N(0, sigma2 * S_K x ... x S_1) with
/// each S_k in the class given by its constraint.
struct MleResult {
  double sigma2_hat = 0.0;
  std::vector<Matrix> sigma_hats;  ///< L_k L_k^T; identity modes materialized
  double max_loglik = 0.0;         ///< -(N/2) log(2 pi sigma2_hat) - N/2, N = element count
  std::size_t n_elements = 0;
  HolqDecomposition fit;
};

MleResult mle(const Tensor& t, std::span<const ModeConstraint> constraints,
              const SolverOptions& opts = {});

/// Log-likelihood of the separable normal model at (sigma2, sigmas), by
/// triangular solves with the Cholesky factors. Empty matrices are identity.
double separable_loglik(const Tensor& t, double sigma2, std::span<const Matrix> sigmas);

struct LrtStatistic {
  double ell = 0.0;     ///< HOLQ junior scale under h0
  double a = 0.0;       ///< HOLQ junior scale under h1
  double stat = 0.0;    ///< ell / a
  double log_lr = 0.0;  ///< N (log ell^2 - log a^2)
  std::size_t n_elements = 0;
  Diagnostics h0_diagnostics;
  Diagnostics h1_diagnostics;

  bool converged() const { return h0_diagnostics.converged && h1_diagnostics.converged; }
};

/// h0 and h1 are applied to `t` and each is fitted by holq_junior. When the
/// two specs are equal the second fit is skipped and stat is exactly 1.
LrtStatistic lrt_statistic(const Tensor& t, const HypothesisSpec& h0, const HypothesisSpec& h1,
                           const SolverOptions& opts = {});

/// Name of the generator behind every random stream.
inline constexpr const char* kGeneratorName = "mt19937_64+seed_seq/std::normal_distribution";

/// Independent stream `index` of the 64-bit `seed`; `purpose` separates
/// sampler draws from null replicates.
enum class StreamPurpose : std::uint32_t { Sample = 1, NullReplicate = 2 };
std::mt19937_64 rng_stream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index);

struct NullOptions {
  std::size_t nsim = 999;
  std::uint64_t seed = 0;
  /// Worker threads; 0 reads HOLQ_THREADS and falls back to the hardware count.
  unsigned threads = 0;
  SolverOptions solver;
  /// Covariances of the observed modes used to generate null data; empty
  /// (or empty entries) means identity. The statistic's null law does not
  /// depend on them, which is what this knob exists to check.
  std::vector<Matrix> sigmas;
};

struct NullSample {
  std::vector<double> stats;  ///< successful replicates, in replicate order
  std::size_t failures = 0;   ///< replicates whose solver threw
  std::size_t nonconverged = 0;  ///< kept, but hit the sweep cap
  unsigned threads = 1;
};

/// Simulates ell/a under h0 for data of `observed_shape`. Replicate i draws
/// from rng_stream(seed, NullReplicate, i), so the result does not depend on
/// the thread count. More than 1% failed replicates throws.
NullSample lrt_null_sample(const Shape& observed_shape, const HypothesisSpec& h0,
                           const HypothesisSpec& h1, const NullOptions& opts);

struct LrtResult {
  LrtStatistic observed;
  double stat = 0.0;
  double log_lr = 0.0;
  double p_value = 1.0;  ///< (1 + #{sim >= stat}) / (nsim_effective + 1)
  std::size_t nsim = 0;
  std::size_t nsim_effective = 0;
  std::uint64_t seed = 0;
  std::size_t failures = 0;
  std::size_t nonconverged = 0;
  unsigned threads = 1;
  std::vector<std::pair<double, double>> null_quantiles;  ///< (probability, value)
};

/// Monte Carlo p-value from a sorted or unsorted null sample.
double monte_carlo_p_value(double observed, std::span<const double> null_stats);

/// Type-7 quantiles of the null sample at 0.5, 0.9, 0.95, 0.99.
std::vector<std::pair<double, double>> null_quantiles(std::vector<double> stats);

/// Throws NestingError when h0 is not structurally nested in h1, unless
/// `allow_unnested` is set.
LrtResult lrt_test(const Tensor& t, const HypothesisSpec& h0, const HypothesisSpec& h1,
                   const NullOptions& opts, bool allow_unnested = false);

/// sigma * (chol S_1, ..., chol S_K, I) . Z with Z of shape (p_1, ..., p_K, n)
/// filled in storage order from rng_stream(seed, Sample, 0).
Tensor sample_multilinear_normal(double sigma2, std::span<const Matrix> sigmas, std::size_t n,
                                 std::uint64_t seed);

/// Worker count used when none is requested.
unsigned default_thread_count();

}  // namespace holq
