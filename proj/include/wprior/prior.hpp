#ifndef WPRIOR_PRIOR_HPP
#define WPRIOR_PRIOR_HPP

#include <functional>
#include <string>
#include <vector>

#include "wprior/dist.hpp"

namespace wprior {

enum class PriorKind {
  Wasserstein,
  IndependenceWasserstein,
  IndependenceJeffreys,
  Flat,
  StudentTApprox
};

std::string prior_kind_name(PriorKind kind);
PriorKind prior_kind_from_name(const std::string& name);

/// Unnormalized log prior density over a model's parameter vector.
/// Returns -inf outside the support.
struct PriorSpec {
  PriorKind kind = PriorKind::Flat;
  std::string description;
  std::function<double(const std::vector<double>&)> log_density;
};

struct ProprietyCondition {
  std::string name;
  bool satisfied;
  std::string detail;
};

/// proper == conjunction of all condition flags. "proper=false" means the
/// sufficient conditions were not verified, not a proof of impropriety.
struct ProprietyVerdict {
  bool proper = false;
  std::vector<ProprietyCondition> conditions;
};

/// Raised when an operation refuses to run because the sufficient
/// propriety conditions failed. Carries the full verdict.
class ProprietyRefusedError : public std::runtime_error {
 public:
  ProprietyRefusedError(const std::string& msg, ProprietyVerdict v)
      : std::runtime_error(msg), verdict(std::move(v)) {}
  ProprietyVerdict verdict;
};

/// sqrt(max(det W(theta), 0)); closed-form WIM when available.
double wprior_density(const Model& model, const std::vector<double>& params);

/// The Wasserstein prior for a model, as a PriorSpec. Constant (flat) for
/// location-scale, exponential and regression families.
PriorSpec wasserstein_prior(const Model& model);

/// pi_W(alpha) = sqrt(W(alpha)) for the skew-normal skewness parameter.
double sn_alpha_wprior(double alpha, double tol = 1e-10);

/// Normalizing constant of pi_W(alpha). The integral is computed numerically
/// up to |alpha| = truncation and closed off with the alpha^{-5/2} tail
/// order, with the tail constant matched at the truncation point.
double sn_alpha_wprior_normconst(double tol = 1e-8, double truncation = 1e4);

/// Student-t density with nu = 3/2, scale 0.757, location 0 (normalized).
double student_t_approx(double alpha);

/// Jeffreys prior of the skewness parameter: sqrt of the Fisher information
/// I(alpha) = 2 int x^2 phi(x) phi(alpha x)^2 / Phi(alpha x) dx. Unnormalized.
double sn_alpha_jeffreys(double alpha, double tol = 1e-10);

/// Product prior over (mu, sigma, alpha): flat in (mu, sigma), pi_W in alpha.
PriorSpec independence_prior_sn(double tol = 1e-9);

/// Comparison baseline: 1/sigma times the Jeffreys alpha-prior.
PriorSpec independence_jeffreys_sn(double tol = 1e-9);

/// Flat (improper) prior respecting the model's positivity constraints.
PriorSpec flat_prior(const Model& model);

/// Sufficient posterior-propriety conditions for the Wasserstein prior of
/// the given family, evaluated against the dataset size (and the design
/// matrix, for regression).
ProprietyVerdict check_propriety(const Model& model,
                                 const std::vector<double>& data);

}  // namespace wprior

#endif
