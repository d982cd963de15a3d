#include "wprior/infer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wprior/rng.hpp"

namespace wprior {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> to_unconstrained(const std::vector<double>& params,
                                     const std::vector<bool>& positive) {
  std::vector<double> z = params;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (positive[i]) z[i] = std::log(z[i]);
  return z;
}

std::vector<double> to_natural(const std::vector<double>& z,
                               const std::vector<bool>& positive) {
  std::vector<double> params = z;
  for (std::size_t i = 0; i < params.size(); ++i)
    if (positive[i]) params[i] = std::exp(params[i]);
  return params;
}

}  // namespace

void McmcConfig::validate() const {
  if (burnin >= iterations)
    throw std::invalid_argument("McmcConfig: burnin must be < iterations");
  if (thinning < 1)
    throw std::invalid_argument("McmcConfig: thinning must be >= 1");
  if (target_accept != 0.0 &&
      !(target_accept > 0.0 && target_accept < 1.0))
    throw std::invalid_argument("McmcConfig: targetAccept must lie in (0,1)");
}

double log_posterior(const Model& model, const PriorSpec& prior,
                     const std::vector<double>& data,
                     const std::vector<double>& params) {
  if (data.empty())
    throw std::invalid_argument("log_posterior: dataset is empty");
  const double lp = prior.log_density(params);
  if (!std::isfinite(lp)) return -kInf;
  double ll;
  try {
    ll = model.log_likelihood(params, data);
  } catch (const std::domain_error&) {
    return -kInf;
  }
  return std::isfinite(ll) ? ll + lp : -kInf;
}

std::function<double(const std::vector<double>&)> make_log_posterior(
    const Model& model, const PriorSpec& prior, std::vector<double> data) {
  return [&model, prior, data = std::move(data)](
             const std::vector<double>& params) {
    return log_posterior(model, prior, data, params);
  };
}

MleResult mle_fit(const Model& model, const std::vector<double>& data,
                  const std::vector<double>& init) {
  model.check_params(init);
  if (data.size() < model.dim())
    throw std::invalid_argument("mle_fit: need at least dim(model) observations");
  const auto positive = model.positive_params();
  const std::size_t d = model.dim();

  auto objective = [&](const std::vector<double>& z) {
    const auto params = to_natural(z, positive);
    double ll;
    try {
      ll = model.log_likelihood(params, data);
    } catch (const std::domain_error&) {
      return kInf;
    }
    return std::isfinite(ll) ? -ll : kInf;
  };

  // Nelder-Mead on the unconstrained scale.
  std::vector<std::vector<double>> simplex(d + 1, to_unconstrained(init, positive));
  for (std::size_t i = 0; i < d; ++i)
    simplex[i + 1][i] += 0.1 * (1.0 + std::abs(simplex[i + 1][i]));
  std::vector<double> fvals(d + 1);
  for (std::size_t i = 0; i <= d; ++i) fvals[i] = objective(simplex[i]);

  const std::size_t max_iter = 2000 * d;
  bool converged = false;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    // Order vertices by objective.
    std::vector<std::size_t> order(d + 1);
    for (std::size_t i = 0; i <= d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
    const std::size_t best = order[0], worst = order[d], second = order[d - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= d; ++i)
      for (std::size_t k = 0; k < d; ++k)
        diameter = std::max(diameter,
                            std::abs(simplex[i][k] - simplex[best][k]));
    if (diameter < 1e-8) {
      converged = true;
      break;
    }

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[i][k] / d;
    }
    auto blend = [&](double coef) {
      std::vector<double> pt(d);
      for (std::size_t k = 0; k < d; ++k)
        pt[k] = centroid[k] + coef * (centroid[k] - simplex[worst][k]);
      return pt;
    };

    auto reflected = blend(1.0);
    const double f_ref = objective(reflected);
    if (f_ref < fvals[best]) {
      auto expanded = blend(2.0);
      const double f_exp = objective(expanded);
      if (f_exp < f_ref) {
        simplex[worst] = std::move(expanded);
        fvals[worst] = f_exp;
      } else {
        simplex[worst] = std::move(reflected);
        fvals[worst] = f_ref;
      }
    } else if (f_ref < fvals[second]) {
      simplex[worst] = std::move(reflected);
      fvals[worst] = f_ref;
    } else {
      auto contracted = blend(f_ref < fvals[worst] ? 0.5 : -0.5);
      const double f_con = objective(contracted);
      if (f_con < std::min(f_ref, fvals[worst])) {
        simplex[worst] = std::move(contracted);
        fvals[worst] = f_con;
      } else {
        for (std::size_t i = 0; i <= d; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < d; ++k)
            simplex[i][k] = 0.5 * (simplex[i][k] + simplex[best][k]);
          fvals[i] = objective(simplex[i]);
        }
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= d; ++i)
    if (fvals[i] < fvals[best]) best = i;
  MleResult result;
  result.params = to_natural(simplex[best], positive);
  result.log_lik = -fvals[best];
  result.converged = converged;
  return result;
}

Chain mcmc_sample(
    const std::function<double(const std::vector<double>&)>& log_post,
    const std::vector<bool>& positive, const std::vector<double>& init,
    const McmcConfig& config, std::uint64_t seed) {
  config.validate();
  const std::size_t d = init.size();
  if (positive.size() != d)
    throw std::invalid_argument("mcmc_sample: positivity mask size mismatch");
  if (!std::isfinite(log_post(init)))
    throw std::invalid_argument(
        "mcmc_sample: log posterior is not finite at the initial point");

  const double target =
      config.target_accept != 0.0 ? config.target_accept : (d == 1 ? 0.44 : 0.234);
  std::vector<double> scales =
      config.initial_scale.empty() ? std::vector<double>(d, 0.5)
                                   : config.initial_scale;
  if (scales.size() != d)
    throw std::invalid_argument("mcmc_sample: initialScale size mismatch");
  std::vector<double> log_scales(d);
  for (std::size_t i = 0; i < d; ++i) log_scales[i] = std::log(scales[i]);

  // The target in unconstrained coordinates, with the log-scale Jacobian.
  auto target_log_density = [&](const std::vector<double>& z) {
    double jac = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      if (positive[i]) jac += z[i];
    const double lp = log_post(to_natural(z, positive));
    return std::isfinite(lp) ? lp + jac : -kInf;
  };

  Rng rng(seed);
  std::vector<double> z = to_unconstrained(init, positive);
  double current = target_log_density(z);

  Chain chain;
  chain.seed = seed;
  chain.config = config;
  const std::size_t kept =
      (config.iterations - config.burnin) / config.thinning +
      (((config.iterations - config.burnin) % config.thinning) ? 1 : 0);
  chain.draws.reserve(kept);

  std::size_t accepted_post = 0, proposals_post = 0;
  for (std::size_t t = 0; t < config.iterations; ++t) {
    const bool adapting = t < config.burnin;
    for (std::size_t i = 0; i < d; ++i) {
      const double old_zi = z[i];
      z[i] = old_zi + std::exp(log_scales[i]) * rng.normal();
      const double proposal = target_log_density(z);
      const double log_ratio = proposal - current;
      const double accept_prob =
          log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
      const bool accept = rng.uniform() < accept_prob;
      if (accept) {
        current = proposal;
      } else {
        z[i] = old_zi;
      }
      if (adapting) {
        const double gamma = 1.0 / std::pow(static_cast<double>(t) + 1.0, 0.6);
        log_scales[i] += gamma * (accept_prob - target);
        log_scales[i] = std::clamp(log_scales[i], -18.0, 18.0);
      } else {
        ++proposals_post;
        accepted_post += accept ? 1 : 0;
      }
    }
    if (t % 100 == 0) {
      std::vector<double> snapshot(d);
      for (std::size_t i = 0; i < d; ++i) snapshot[i] = std::exp(log_scales[i]);
      chain.adaptation_trace.push_back(std::move(snapshot));
    }
    if (t >= config.burnin && (t - config.burnin) % config.thinning == 0)
      chain.draws.push_back(to_natural(z, positive));
  }

  chain.accept_rate =
      proposals_post ? static_cast<double>(accepted_post) / proposals_post : 0.0;
  chain.final_scales.resize(d);
  for (std::size_t i = 0; i < d; ++i)
    chain.final_scales[i] = std::exp(log_scales[i]);
  return chain;
}

double quantile_type7(std::vector<double> values, double q) {
  if (values.empty())
    throw std::invalid_argument("quantile_type7: empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

PosteriorSummary summarize(const Chain& chain,
                           const std::vector<double>* truth) {
  if (chain.draws.empty())
    throw std::invalid_argument("summarize: chain is empty");
  const std::size_t k = chain.draws.size();
  const std::size_t d = chain.draws.front().size();
  PosteriorSummary out;
  out.mean.resize(d);
  out.sd.resize(d);
  out.cred_lo.resize(d);
  out.cred_hi.resize(d);
  if (truth) out.rmse_vs_truth = std::vector<double>(d);

  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> column(k);
    double mean = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      column[i] = chain.draws[i][j];
      mean += column[i];
    }
    mean /= static_cast<double>(k);
    double ss = 0.0;
    for (double v : column) ss += (v - mean) * (v - mean);
    out.mean[j] = mean;
    out.sd[j] = k > 1 ? std::sqrt(ss / static_cast<double>(k - 1)) : 0.0;
    out.cred_lo[j] = quantile_type7(column, 0.025);
    out.cred_hi[j] = quantile_type7(column, 0.975);
    if (truth) {
      double se = 0.0;
      for (double v : column) se += (v - (*truth)[j]) * (v - (*truth)[j]);
      (*out.rmse_vs_truth)[j] = std::sqrt(se / static_cast<double>(k));
    }
  }
  return out;
}

std::vector<double> predictive_density(const Chain& chain, const Model& model,
                                       const std::vector<double>& xgrid) {
  if (chain.draws.empty())
    throw std::invalid_argument("predictive_density: chain is empty");
  std::vector<double> out(xgrid.size(), 0.0);
  for (const auto& draw : chain.draws)
    for (std::size_t g = 0; g < xgrid.size(); ++g)
      out[g] += model.pdf(draw, xgrid[g]);
  for (double& v : out) v /= static_cast<double>(chain.draws.size());
  return out;
}

}  // namespace wprior
