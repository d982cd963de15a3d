#include "wprior/dist.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wprior/rng.hpp"
#include "wprior/special.hpp"

namespace wprior {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2 = 0.69314718055994530942;
constexpr double kPi = 3.1415926535897932385;

// Safeguarded Newton on cdf(x) = p inside a verified bracket.
double refine_quantile(const std::function<double(double)>& cdf,
                       const std::function<double(double)>& pdf, double p,
                       double lo, double hi) {
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double fx = cdf(x) - p;
    if (std::abs(fx) < 1e-14) return x;
    if (fx > 0.0)
      hi = x;
    else
      lo = x;
    const double dens = pdf(x);
    double next = dens > 0.0 ? x - fx / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) < 1e-15 * (1.0 + std::abs(x))) return next;
    x = next;
  }
  return x;
}
}  // namespace

// ---------------------------------------------------------------------------
// BaseDensity

BaseDensity BaseDensity::normal() { return {BaseKind::Normal, 0.0}; }
BaseDensity BaseDensity::laplace() { return {BaseKind::Laplace, 0.0}; }
BaseDensity BaseDensity::logistic() { return {BaseKind::Logistic, 0.0}; }
BaseDensity BaseDensity::student_t(double df) {
  if (!(df > 2.0))
    throw std::domain_error(
        "BaseDensity::student_t: df must exceed 2 for a finite second moment");
  return {BaseKind::StudentT, df};
}

std::string BaseDensity::name() const {
  switch (kind_) {
    case BaseKind::Normal: return "normal";
    case BaseKind::Laplace: return "laplace";
    case BaseKind::Logistic: return "logistic";
    case BaseKind::StudentT: return "student_t";
  }
  return "?";
}

double BaseDensity::log_pdf(double t) const {
  switch (kind_) {
    case BaseKind::Normal:
      return log_norm_pdf(t);
    case BaseKind::Laplace:
      return -std::abs(t) - kLog2;
    case BaseKind::Logistic: {
      const double a = -std::abs(t);
      return a - 2.0 * std::log1p(std::exp(a));
    }
    case BaseKind::StudentT:
      return std::log(student_t_pdf(t, df_));
  }
  return -kInf;
}

double BaseDensity::pdf(double t) const { return std::exp(log_pdf(t)); }

double BaseDensity::cdf(double t) const {
  switch (kind_) {
    case BaseKind::Normal:
      return norm_cdf(t);
    case BaseKind::Laplace:
      return t < 0.0 ? 0.5 * std::exp(t) : 1.0 - 0.5 * std::exp(-t);
    case BaseKind::Logistic:
      return 1.0 / (1.0 + std::exp(-t));
    case BaseKind::StudentT:
      return student_t_cdf(t, df_);
  }
  return 0.0;
}

double BaseDensity::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("BaseDensity::quantile: p must lie in (0,1)");
  switch (kind_) {
    case BaseKind::Normal:
      return norm_quantile(p);
    case BaseKind::Laplace:
      return p < 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p));
    case BaseKind::Logistic:
      return std::log(p / (1.0 - p));
    case BaseKind::StudentT: {
      // Bracket from the normal quantile, then safeguarded Newton.
      double lo = norm_quantile(p), hi = lo;
      double w = 1.0 + std::abs(lo);
      while (cdf(lo) > p) { lo -= w; w *= 2.0; }
      w = 1.0 + std::abs(hi);
      while (cdf(hi) < p) { hi += w; w *= 2.0; }
      return refine_quantile([this](double t) { return cdf(t); },
                             [this](double t) { return pdf(t); }, p, lo, hi);
    }
  }
  return 0.0;
}

double BaseDensity::second_moment() const {
  switch (kind_) {
    case BaseKind::Normal: return 1.0;
    case BaseKind::Laplace: return 2.0;
    case BaseKind::Logistic: return kPi * kPi / 3.0;
    case BaseKind::StudentT: return df_ / (df_ - 2.0);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Model defaults

Interval Model::support() const { return {-kInf, kInf}; }

std::vector<bool> Model::positive_params() const {
  return std::vector<bool>(dim(), false);
}

void Model::check_params(const std::vector<double>& params) const {
  if (params.size() != dim())
    throw std::domain_error(name() + ": expected " + std::to_string(dim()) +
                            " parameters, got " + std::to_string(params.size()));
  const auto positive = positive_params();
  const auto names = param_names();
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!std::isfinite(params[i]))
      throw std::domain_error(name() + ": parameter " + names[i] +
                              " is not finite");
    if (positive[i] && !(params[i] > 0.0))
      throw std::domain_error(name() + ": parameter " + names[i] +
                              " must be > 0");
  }
}

double Model::pdf(const std::vector<double>& params, double x) const {
  check_params(params);
  const double lp = log_pdf(params, x);
  return std::isfinite(lp) ? std::exp(lp) : 0.0;
}

double Model::bracket_center(const std::vector<double>&) const { return 0.0; }

double Model::quantile(const std::vector<double>& params, double p) const {
  check_params(params);
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error(name() + ": quantile requires p in (0,1)");
  const Interval sup = support();
  const double center = bracket_center(params);
  double lo = center - 1.0, hi = center + 1.0;
  double w = 1.0;
  while (cdf(params, lo) > p) {
    w *= 2.0;
    lo = std::isfinite(sup.lo) ? 0.5 * (lo + sup.lo) : center - w;
  }
  w = 1.0;
  while (cdf(params, hi) < p) {
    w *= 2.0;
    hi = std::isfinite(sup.hi) ? 0.5 * (hi + sup.hi) : center + w;
  }
  return refine_quantile([&](double x) { return cdf(params, x); },
                         [&](double x) { return pdf(params, x); }, p, lo, hi);
}

std::vector<double> Model::cdf_partials_fd(const std::vector<double>& params,
                                           double x) const {
  check_params(params);
  const auto positive = positive_params();
  std::vector<double> out(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    double h = std::max(1e-5, 1e-5 * std::abs(params[i]));
    if (positive[i] && params[i] - h <= 0.0) h = 0.5 * params[i];
    std::vector<double> up = params, down = params;
    up[i] += h;
    down[i] -= h;
    out[i] = (cdf(up, x) - cdf(down, x)) / (2.0 * h);
  }
  return out;
}

std::vector<double> Model::cdf_partials(const std::vector<double>& params,
                                        double x) const {
  return cdf_partials_fd(params, x);
}

std::vector<double> Model::sample(const std::vector<double>& params,
                                  std::size_t n, std::uint64_t seed) const {
  check_params(params);
  if (n < 1) throw std::domain_error(name() + ": sample requires n >= 1");
  Rng rng(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = quantile(params, rng.uniform());
  return out;
}

double Model::log_likelihood(const std::vector<double>& params,
                             const std::vector<double>& data) const {
  check_params(params);
  double total = 0.0;
  for (double x : data) {
    const double lp = log_pdf(params, x);
    if (!std::isfinite(lp)) return -kInf;
    total += lp;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Location-scale family

std::string LocationScaleModel::name() const {
  return "location_scale_" + base_.name();
}

double LocationScaleModel::bracket_center(
    const std::vector<double>& params) const {
  return params[0];
}

double LocationScaleModel::log_pdf(const std::vector<double>& params,
                                   double x) const {
  check_params(params);
  const double z = (x - params[0]) / params[1];
  return base_.log_pdf(z) - std::log(params[1]);
}

double LocationScaleModel::cdf(const std::vector<double>& params,
                               double x) const {
  check_params(params);
  return base_.cdf((x - params[0]) / params[1]);
}

double LocationScaleModel::quantile(const std::vector<double>& params,
                                    double p) const {
  check_params(params);
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error(name() + ": quantile requires p in (0,1)");
  return params[0] + params[1] * base_.quantile(p);
}

std::vector<double> LocationScaleModel::cdf_partials(
    const std::vector<double>& params, double x) const {
  check_params(params);
  const double sigma = params[1];
  const double z = (x - params[0]) / sigma;
  const double f0 = base_.pdf(z);
  return {-f0 / sigma, -z * f0 / sigma};
}

// ---------------------------------------------------------------------------
// Skew-normal, alpha only

double SkewNormalAlphaModel::log_pdf(const std::vector<double>& params,
                                     double x) const {
  check_params(params);
  return kLog2 + log_norm_pdf(x) + log_norm_cdf(params[0] * x);
}

double SkewNormalAlphaModel::cdf(const std::vector<double>& params,
                                 double x) const {
  check_params(params);
  return norm_cdf(x) - 2.0 * owens_t(x, params[0]);
}

std::vector<double> SkewNormalAlphaModel::cdf_partials(
    const std::vector<double>& params, double x) const {
  check_params(params);
  const double a = params[0];
  const double one_a2 = 1.0 + a * a;
  return {-std::exp(-0.5 * x * x * one_a2) / (kPi * one_a2)};
}

std::vector<double> SkewNormalAlphaModel::sample(
    const std::vector<double>& params, std::size_t n,
    std::uint64_t seed) const {
  check_params(params);
  if (n < 1) throw std::domain_error(name() + ": sample requires n >= 1");
  const double a = params[0];
  const double delta = a / std::sqrt(1.0 + a * a);
  const double comp = std::sqrt(1.0 - delta * delta);
  Rng rng(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z0 = rng.normal();
    const double z1 = rng.normal();
    out[i] = delta * std::abs(z0) + comp * z1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Skew-normal (mu, sigma, alpha)

double SkewNormalModel::bracket_center(const std::vector<double>& params) const {
  return params[0];
}

double SkewNormalModel::log_pdf(const std::vector<double>& params,
                                double x) const {
  check_params(params);
  const double z = (x - params[0]) / params[1];
  return kLog2 + log_norm_pdf(z) + log_norm_cdf(params[2] * z) -
         std::log(params[1]);
}

double SkewNormalModel::cdf(const std::vector<double>& params, double x) const {
  check_params(params);
  const double z = (x - params[0]) / params[1];
  return norm_cdf(z) - 2.0 * owens_t(z, params[2]);
}

std::vector<double> SkewNormalModel::cdf_partials(
    const std::vector<double>& params, double x) const {
  check_params(params);
  const double sigma = params[1], alpha = params[2];
  const double z = (x - params[0]) / sigma;
  const double sz = 2.0 * norm_pdf(z) * norm_cdf(alpha * z);
  const double one_a2 = 1.0 + alpha * alpha;
  return {-sz / sigma, -z * sz / sigma,
          -std::exp(-0.5 * z * z * one_a2) / (kPi * one_a2)};
}

std::vector<double> SkewNormalModel::sample(const std::vector<double>& params,
                                            std::size_t n,
                                            std::uint64_t seed) const {
  check_params(params);
  SkewNormalAlphaModel standard;
  auto z = standard.sample({params[2]}, n, seed);
  for (double& v : z) v = params[0] + params[1] * v;
  return z;
}

// ---------------------------------------------------------------------------
// Exponential (scale theta)

Interval ExponentialModel::support() const { return {0.0, kInf}; }

double ExponentialModel::log_pdf(const std::vector<double>& params,
                                 double x) const {
  check_params(params);
  if (x < 0.0) return -kInf;
  return -x / params[0] - std::log(params[0]);
}

double ExponentialModel::cdf(const std::vector<double>& params,
                             double x) const {
  check_params(params);
  return x <= 0.0 ? 0.0 : -std::expm1(-x / params[0]);
}

double ExponentialModel::quantile(const std::vector<double>& params,
                                  double p) const {
  check_params(params);
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error(name() + ": quantile requires p in (0,1)");
  return -params[0] * std::log1p(-p);
}

std::vector<double> ExponentialModel::cdf_partials(
    const std::vector<double>& params, double x) const {
  check_params(params);
  const double theta = params[0];
  if (x <= 0.0) return {0.0};
  return {-(x / (theta * theta)) * std::exp(-x / theta)};
}

std::vector<double> ExponentialModel::sample(const std::vector<double>& params,
                                             std::size_t n,
                                             std::uint64_t seed) const {
  check_params(params);
  if (n < 1) throw std::domain_error(name() + ": sample requires n >= 1");
  Rng rng(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = params[0] * rng.exponential();
  return out;
}

// ---------------------------------------------------------------------------
// Normal linear regression

NormalLinRegModel::NormalLinRegModel(Eigen::MatrixXd design)
    : design_(std::move(design)) {
  if (design_.rows() < 1 || design_.cols() < 1)
    throw std::domain_error("linear_regression: design matrix is empty");
}

bool NormalLinRegModel::full_column_rank() const {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design_);
  const auto& sv = svd.singularValues();
  if (design_.rows() < design_.cols()) return false;
  return sv(sv.size() - 1) > 1e-10 * sv(0);
}

std::vector<std::string> NormalLinRegModel::param_names() const {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < n_cov(); ++k)
    names.push_back("beta" + std::to_string(k));
  names.push_back("sigma");
  return names;
}

std::vector<bool> NormalLinRegModel::positive_params() const {
  std::vector<bool> mask(dim(), false);
  mask.back() = true;
  return mask;
}

double NormalLinRegModel::log_pdf(const std::vector<double>&, double) const {
  throw std::logic_error(
      "linear_regression: density is per-observation; use log_pdf_obs");
}

double NormalLinRegModel::cdf(const std::vector<double>&, double) const {
  throw std::logic_error(
      "linear_regression: cdf is per-observation; use cdf_obs");
}

double NormalLinRegModel::log_pdf_obs(std::size_t i,
                                      const std::vector<double>& params,
                                      double y) const {
  check_params(params);
  const double sigma = params.back();
  double mean = 0.0;
  for (std::size_t k = 0; k < n_cov(); ++k) mean += design_(i, k) * params[k];
  return log_norm_pdf((y - mean) / sigma) - std::log(sigma);
}

double NormalLinRegModel::cdf_obs(std::size_t i,
                                  const std::vector<double>& params,
                                  double y) const {
  check_params(params);
  const double sigma = params.back();
  double mean = 0.0;
  for (std::size_t k = 0; k < n_cov(); ++k) mean += design_(i, k) * params[k];
  return norm_cdf((y - mean) / sigma);
}

std::vector<double> NormalLinRegModel::cdf_partials_obs(
    std::size_t i, const std::vector<double>& params, double y) const {
  check_params(params);
  const double sigma = params.back();
  double mean = 0.0;
  for (std::size_t k = 0; k < n_cov(); ++k) mean += design_(i, k) * params[k];
  const double u = (y - mean) / sigma;
  const double dens = norm_pdf(u);
  std::vector<double> out(dim());
  for (std::size_t k = 0; k < n_cov(); ++k)
    out[k] = -design_(i, k) / sigma * dens;
  out.back() = -u / sigma * dens;
  return out;
}

double NormalLinRegModel::log_likelihood(const std::vector<double>& params,
                                         const std::vector<double>& data) const {
  check_params(params);
  if (data.size() != n_obs())
    throw std::invalid_argument(
        "linear_regression: response length must match design rows");
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    total += log_pdf_obs(i, params, data[i]);
  return total;
}

std::vector<double> NormalLinRegModel::sample(const std::vector<double>& params,
                                              std::size_t n,
                                              std::uint64_t seed) const {
  check_params(params);
  if (n != n_obs())
    throw std::domain_error(
        "linear_regression: sample size must equal design rows");
  const double sigma = params.back();
  Rng rng(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (std::size_t k = 0; k < n_cov(); ++k) mean += design_(i, k) * params[k];
    out[i] = mean + sigma * rng.normal();
  }
  return out;
}

// ---------------------------------------------------------------------------

double expectation(const Model& model, const std::vector<double>& params,
                   const std::function<double(double)>& g, double tol) {
  model.check_params(params);
  auto integrand = [&](double x) {
    const double dens = model.pdf(params, x);
    return dens == 0.0 ? 0.0 : g(x) * dens;
  };
  const Interval sup = model.support();
  QuadOptions opt;
  opt.abs_tol = tol;
  opt.rel_tol = tol;
  if (std::isinf(sup.lo) && std::isinf(sup.hi))
    return integrate_real_line(integrand, opt).value;
  if (std::isinf(sup.hi))
    return integrate_half_line(integrand, sup.lo, opt).value;
  return integrate_interval(integrand, sup.lo, sup.hi, opt).value;
}

}  // namespace wprior
