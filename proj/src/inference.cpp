#include "holq/inference.hpp"

#include "holq/error.hpp"
#include "holq/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

namespace holq {

namespace {

std::vector<Matrix> lower_factors(std::span<const Matrix> sigmas, const Shape& shape,
                                  std::size_t covered) {
  if (sigmas.size() > covered)
    throw DimensionError("more covariance matrices than modes");
  std::vector<Matrix> out(shape.size());
  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    if (sigmas[k].size() == 0) continue;
    const auto p = static_cast<Eigen::Index>(shape[k]);
    if (sigmas[k].rows() != p || sigmas[k].cols() != p) {
      throw DimensionError("covariance of mode " + std::to_string(k + 1) + " is " +
                           std::to_string(sigmas[k].rows()) + "x" +
                           std::to_string(sigmas[k].cols()) + ", expected " +
                           std::to_string(p) + "x" + std::to_string(p));
    }
    out[k] = cholesky(sigmas[k]);
  }
  return out;
}

void fill_normal(Tensor& t, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  for (auto& v : t.mutable_data()) v = z(rng);
}

}  // namespace

MleResult mle(const Tensor& t, std::span<const ModeConstraint> constraints,
              const SolverOptions& opts) {
  MleResult out;
  out.fit = holq_junior(t, constraints, opts);
  out.n_elements = t.size();
  const double n = static_cast<double>(t.size());
  out.sigma2_hat = out.fit.ell * out.fit.ell / n;
  for (std::size_t k = 0; k < t.order(); ++k) {
    const Matrix l = out.fit.factor(k);
    out.sigma_hats.push_back(l * l.transpose());
  }
  out.max_loglik = -0.5 * n * std::log(2.0 * std::numbers::pi * out.sigma2_hat) - 0.5 * n;
  return out;
}

double separable_loglik(const Tensor& t, double sigma2, std::span<const Matrix> sigmas) {
  if (!(sigma2 > 0)) throw Error("sigma2 must be positive");
  const auto chol = lower_factors(sigmas, t.shape(), t.order());
  const double n = static_cast<double>(t.size());
  double log_det = n * std::log(sigma2);
  for (std::size_t k = 0; k < chol.size(); ++k) {
    if (chol[k].size() == 0) continue;
    log_det += 2.0 * n / static_cast<double>(t.dim(k)) * log_det_triangular(chol[k]);
  }
  const double quad = std::pow(frob_norm(tucker_solve_lower(chol, t)), 2) / sigma2;
  return -0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * log_det - 0.5 * quad;
}

LrtStatistic lrt_statistic(const Tensor& t, const HypothesisSpec& h0, const HypothesisSpec& h1,
                           const SolverOptions& opts) {
  h0.validate(t.order());
  h1.validate(t.order());
  LrtStatistic out;
  out.n_elements = t.size();
  const auto fit0 = holq_junior(h0.apply(t), h0.constraints(), opts);
  out.ell = fit0.ell;
  out.h0_diagnostics = fit0.diagnostics;
  if (h0 == h1) {
    out.a = out.ell;
    out.h1_diagnostics = out.h0_diagnostics;
  } else {
    const auto fit1 = holq_junior(h1.apply(t), h1.constraints(), opts);
    out.a = fit1.ell;
    out.h1_diagnostics = fit1.diagnostics;
  }
  out.stat = out.ell / out.a;
  out.log_lr = static_cast<double>(t.size()) * 2.0 * (std::log(out.ell) - std::log(out.a));
  return out;
}

std::mt19937_64 rng_stream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(purpose),
                    static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index & 0xffffffffu),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("HOLQ_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

NullSample lrt_null_sample(const Shape& observed_shape, const HypothesisSpec& h0,
                           const HypothesisSpec& h1, const NullOptions& opts) {
  h0.validate(observed_shape.size());
  h1.validate(observed_shape.size());
  const auto chol = lower_factors(opts.sigmas, observed_shape, observed_shape.size());
  const bool whitened = std::any_of(chol.begin(), chol.end(), [](const Matrix& m) {
    return m.size() != 0;
  });

  NullSample out;
  if (opts.nsim == 0) return out;
  unsigned threads = opts.threads ? opts.threads : default_thread_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, opts.nsim));
  out.threads = threads;

  enum Status : char { Ok, NotConverged, Failed };
  std::vector<double> stats(opts.nsim, 0.0);
  std::vector<char> status(opts.nsim, Failed);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= opts.nsim) return;
      try {
        auto rng = rng_stream(opts.seed, StreamPurpose::NullReplicate, i);
        Tensor x(observed_shape);
        fill_normal(x, rng);
        if (whitened) x = tucker_mult(chol, x);
        const auto s = lrt_statistic(x, h0, h1, opts.solver);
        stats[i] = s.stat;
        status[i] = s.converged() ? Ok : NotConverged;
      } catch (const Error&) {
        status[i] = Failed;
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        next.store(opts.nsim);
      }
    }
  };

  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  for (std::size_t i = 0; i < opts.nsim; ++i) {
    if (status[i] == Failed) {
      ++out.failures;
      continue;
    }
    if (status[i] == NotConverged) ++out.nonconverged;
    out.stats.push_back(stats[i]);
  }
  if (static_cast<double>(out.failures) > 0.01 * static_cast<double>(opts.nsim)) {
    throw Error("null simulation aborted: " + std::to_string(out.failures) + " of " +
                std::to_string(opts.nsim) + " replicates failed (limit 1%)");
  }
  return out;
}

double monte_carlo_p_value(double observed, std::span<const double> null_stats) {
  const auto exceed = std::count_if(null_stats.begin(), null_stats.end(),
                                    [&](double s) { return s >= observed; });
  return static_cast<double>(1 + exceed) / static_cast<double>(null_stats.size() + 1);
}

std::vector<std::pair<double, double>> null_quantiles(std::vector<double> stats) {
  std::vector<std::pair<double, double>> out;
  if (stats.empty()) return out;
  std::sort(stats.begin(), stats.end());
  for (double prob : {0.5, 0.9, 0.95, 0.99}) {
    const double h = prob * static_cast<double>(stats.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, stats.size() - 1);
    out.emplace_back(prob, stats[lo] + (h - static_cast<double>(lo)) * (stats[hi] - stats[lo]));
  }
  return out;
}

LrtResult lrt_test(const Tensor& t, const HypothesisSpec& h0, const HypothesisSpec& h1,
                   const NullOptions& opts, bool allow_unnested) {
  h0.validate(t.order());
  h1.validate(t.order());
  if (!allow_unnested && !is_nested(h0, h1)) {
    throw NestingError("\"" + h0.to_string() + "\" is not structurally nested in \"" +
                       h1.to_string() + "\"; pass the override to test anyway");
  }
  LrtResult out;
  out.observed = lrt_statistic(t, h0, h1, opts.solver);
  out.stat = out.observed.stat;
  out.log_lr = out.observed.log_lr;
  out.seed = opts.seed;
  out.nsim = opts.nsim;

  NullOptions null_opts = opts;
  null_opts.sigmas.clear();
  NullSample sample = lrt_null_sample(t.shape(), h0, h1, null_opts);
  out.nsim_effective = sample.stats.size();
  out.failures = sample.failures;
  out.nonconverged = sample.nonconverged;
  out.threads = sample.threads;
  std::sort(sample.stats.begin(), sample.stats.end());
  out.p_value = monte_carlo_p_value(out.stat, sample.stats);
  out.null_quantiles = null_quantiles(std::move(sample.stats));
  return out;
}

Tensor sample_multilinear_normal(double sigma2, std::span<const Matrix> sigmas, std::size_t n,
                                 std::uint64_t seed) {
  if (!(sigma2 > 0)) throw Error("sigma2 must be positive");
  if (n == 0) throw DimensionError("sample count must be positive");
  Shape shape;
  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    if (sigmas[k].size() == 0 || sigmas[k].rows() != sigmas[k].cols())
      throw DimensionError("covariance of mode " + std::to_string(k + 1) + " must be square");
    shape.push_back(static_cast<std::size_t>(sigmas[k].rows()));
  }
  shape.push_back(n);
  const auto chol = lower_factors(sigmas, shape, sigmas.size());
  Tensor z(shape);
  auto rng = rng_stream(seed, StreamPurpose::Sample, 0);
  fill_normal(z, rng);
  return std::sqrt(sigma2) * tucker_mult(chol, z);
}

}  // namespace holq
