#ifndef WPRIOR_INFER_HPP
#define WPRIOR_INFER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "wprior/dist.hpp"
#include "wprior/prior.hpp"

namespace wprior {

struct McmcConfig {
  std::size_t iterations = 30000;
  std::size_t burnin = 5000;
  std::size_t thinning = 25;
  /// 0 means "pick by dimension": 0.44 for d = 1, 0.234 otherwise.
  double target_accept = 0.0;
  std::vector<double> initial_scale;  // empty = default 0.5 per component

  void validate() const;
};

struct Chain {
  std::vector<std::vector<double>> draws;  // kept draws, natural scale
  double accept_rate = 0.0;
  std::uint64_t seed = 0;
  McmcConfig config;
  /// Proposal scales snapshotted every 100 iterations; constant after burn-in.
  std::vector<std::vector<double>> adaptation_trace;
  std::vector<double> final_scales;
};

struct PosteriorSummary {
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<double> cred_lo;  // equal-tailed 95%
  std::vector<double> cred_hi;
  std::optional<std::vector<double>> rmse_vs_truth;
};

struct MleResult {
  std::vector<double> params;
  double log_lik = 0.0;
  bool converged = false;
};

/// Sum of log pdf plus the prior log density; -inf outside the support.
double log_posterior(const Model& model, const PriorSpec& prior,
                     const std::vector<double>& data,
                     const std::vector<double>& params);

std::function<double(const std::vector<double>&)> make_log_posterior(
    const Model& model, const PriorSpec& prior, std::vector<double> data);

/// Nelder-Mead maximization of the log likelihood. Positivity-constrained
/// parameters are optimized on the log scale.
MleResult mle_fit(const Model& model, const std::vector<double>& data,
                  const std::vector<double>& init);

/// Componentwise Gaussian random-walk Metropolis with Robbins-Monro scale
/// adaptation during burn-in; adaptation is frozen afterwards so the kept
/// chain is Markov. sigma-like parameters are sampled on the log scale with
/// the Jacobian correction, and reported on the natural scale.
Chain mcmc_sample(const std::function<double(const std::vector<double>&)>& log_post,
                  const std::vector<bool>& positive,
                  const std::vector<double>& init, const McmcConfig& config,
                  std::uint64_t seed);

/// Type-7 quantile (linear interpolation between order statistics).
double quantile_type7(std::vector<double> values, double q);

PosteriorSummary summarize(const Chain& chain,
                           const std::vector<double>* truth = nullptr);

/// Pointwise average over kept draws of pdf(x | theta_draw).
std::vector<double> predictive_density(const Chain& chain, const Model& model,
                                       const std::vector<double>& xgrid);

}  // namespace wprior

#endif
