#ifndef WPRIOR_DIST_HPP
#define WPRIOR_DIST_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "wprior/quad.hpp"

namespace wprior {

struct Interval {
  double lo;
  double hi;
};

enum class BaseKind { Normal, Laplace, Logistic, StudentT };

/// Symmetric unimodal density with mode 0, used as the kernel of the
/// location-scale family. All four built-ins are scale mixtures of normals.
class BaseDensity {
 public:
  static BaseDensity normal();
  static BaseDensity laplace();
  static BaseDensity logistic();
  static BaseDensity student_t(double df);  // requires df > 2

  BaseKind kind() const { return kind_; }
  double df() const { return df_; }
  std::string name() const;

  double pdf(double t) const;
  double log_pdf(double t) const;
  double cdf(double t) const;
  double quantile(double p) const;
  double second_moment() const;

  /// Whether the sqrt-moment of the normal mixing distribution is finite
  /// (the propriety condition for location-scale posteriors).
  bool mixing_sqrt_moment_finite() const { return true; }

 private:
  BaseDensity(BaseKind kind, double df) : kind_(kind), df_(df) {}
  BaseKind kind_;
  double df_;
};

/// A univariate parametric family. Operations are pure; instances are
/// immutable after construction and safe to share across threads.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  virtual Interval support() const;
  virtual std::vector<std::string> param_names() const = 0;
  /// Mask of parameters constrained to be strictly positive.
  virtual std::vector<bool> positive_params() const;

  /// Throws std::domain_error naming the violated constraint.
  virtual void check_params(const std::vector<double>& params) const;

  virtual double log_pdf(const std::vector<double>& params, double x) const = 0;
  virtual double pdf(const std::vector<double>& params, double x) const;
  virtual double cdf(const std::vector<double>& params, double x) const = 0;

  /// Inverse cdf. Default: bracketed bisection refined with Newton steps.
  virtual double quantile(const std::vector<double>& params, double p) const;

  /// Partial derivatives of the cdf in the parameters. Default: central
  /// finite differences with step max(1e-5, 1e-5|theta_i|).
  virtual std::vector<double> cdf_partials(const std::vector<double>& params,
                                           double x) const;

  /// Finite-difference partials, kept callable so analytic overrides can be
  /// cross-checked against it.
  std::vector<double> cdf_partials_fd(const std::vector<double>& params,
                                      double x) const;

  /// Deterministic given the seed. Default: inverse-cdf sampling.
  virtual std::vector<double> sample(const std::vector<double>& params,
                                     std::size_t n, std::uint64_t seed) const;

  virtual double log_likelihood(const std::vector<double>& params,
                                const std::vector<double>& data) const;

 protected:
  /// Center of the initial quantile bracket (a point well inside the support).
  virtual double bracket_center(const std::vector<double>& params) const;
};

class LocationScaleModel final : public Model {
 public:
  explicit LocationScaleModel(BaseDensity base) : base_(base) {}
  const BaseDensity& base() const { return base_; }

  std::string name() const override;
  std::size_t dim() const override { return 2; }
  std::vector<std::string> param_names() const override { return {"mu", "sigma"}; }
  std::vector<bool> positive_params() const override { return {false, true}; }
  double log_pdf(const std::vector<double>& params, double x) const override;
  double cdf(const std::vector<double>& params, double x) const override;
  double quantile(const std::vector<double>& params, double p) const override;
  std::vector<double> cdf_partials(const std::vector<double>& params,
                                   double x) const override;

 private:
  double bracket_center(const std::vector<double>& params) const override;
  BaseDensity base_;
};

/// Skew-normal with unit location/scale; the single parameter is the
/// skewness alpha (sometimes written lambda in the literature).
class SkewNormalAlphaModel final : public Model {
 public:
  std::string name() const override { return "skew_normal_alpha"; }
  std::size_t dim() const override { return 1; }
  std::vector<std::string> param_names() const override { return {"alpha"}; }
  double log_pdf(const std::vector<double>& params, double x) const override;
  double cdf(const std::vector<double>& params, double x) const override;
  std::vector<double> cdf_partials(const std::vector<double>& params,
                                   double x) const override;
  std::vector<double> sample(const std::vector<double>& params, std::size_t n,
                             std::uint64_t seed) const override;
};

/// Three-parameter skew-normal (mu, sigma, alpha).
class SkewNormalModel final : public Model {
 public:
  std::string name() const override { return "skew_normal"; }
  std::size_t dim() const override { return 3; }
  std::vector<std::string> param_names() const override {
    return {"mu", "sigma", "alpha"};
  }
  std::vector<bool> positive_params() const override {
    return {false, true, false};
  }
  double log_pdf(const std::vector<double>& params, double x) const override;
  double cdf(const std::vector<double>& params, double x) const override;
  std::vector<double> cdf_partials(const std::vector<double>& params,
                                   double x) const override;
  std::vector<double> sample(const std::vector<double>& params, std::size_t n,
                             std::uint64_t seed) const override;

 private:
  double bracket_center(const std::vector<double>& params) const override;
};

/// Exponential with scale parameter theta (mean theta).
class ExponentialModel final : public Model {
 public:
  std::string name() const override { return "exponential"; }
  std::size_t dim() const override { return 1; }
  Interval support() const override;
  std::vector<std::string> param_names() const override { return {"theta"}; }
  std::vector<bool> positive_params() const override { return {true}; }
  double log_pdf(const std::vector<double>& params, double x) const override;
  double cdf(const std::vector<double>& params, double x) const override;
  double quantile(const std::vector<double>& params, double p) const override;
  std::vector<double> cdf_partials(const std::vector<double>& params,
                                   double x) const override;
  std::vector<double> sample(const std::vector<double>& params, std::size_t n,
                             std::uint64_t seed) const override;
};

/// Normal linear regression y_i = x_i' beta + eps_i. Parameters are
/// (beta_1..beta_p, sigma); "data" passed to likelihood/sampling are the
/// responses, paired row-by-row with the stored design matrix.
class NormalLinRegModel final : public Model {
 public:
  explicit NormalLinRegModel(Eigen::MatrixXd design);

  const Eigen::MatrixXd& design() const { return design_; }
  std::size_t n_obs() const { return static_cast<std::size_t>(design_.rows()); }
  std::size_t n_cov() const { return static_cast<std::size_t>(design_.cols()); }
  bool full_column_rank() const;

  std::string name() const override { return "linear_regression"; }
  std::size_t dim() const override { return n_cov() + 1; }
  std::vector<std::string> param_names() const override;
  std::vector<bool> positive_params() const override;

  // Scalar pdf/cdf/quantile are per-observation concepts here.
  double log_pdf(const std::vector<double>& params, double x) const override;
  double cdf(const std::vector<double>& params, double x) const override;

  double log_pdf_obs(std::size_t i, const std::vector<double>& params,
                     double y) const;
  double cdf_obs(std::size_t i, const std::vector<double>& params,
                 double y) const;
  std::vector<double> cdf_partials_obs(std::size_t i,
                                       const std::vector<double>& params,
                                       double y) const;

  double log_likelihood(const std::vector<double>& params,
                        const std::vector<double>& data) const override;
  std::vector<double> sample(const std::vector<double>& params, std::size_t n,
                             std::uint64_t seed) const override;

 private:
  Eigen::MatrixXd design_;
};

/// E[g(X)] under the model, by quadrature of g * pdf over the support.
double expectation(const Model& model, const std::vector<double>& params,
                   const std::function<double(double)>& g, double tol = 1e-8);

}  // namespace wprior

#endif
