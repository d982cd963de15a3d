#ifndef WPRIOR_WIM_HPP
#define WPRIOR_WIM_HPP

#include <Eigen/Dense>
#include <stdexcept>

#include "wprior/dist.hpp"

namespace wprior {

enum class WimMethod { ClosedForm, Quadrature };

struct WimMatrix {
  Eigen::MatrixXd entries;
  WimMethod method = WimMethod::Quadrature;
  double tol_used = 0.0;
};

/// Requested operation is not available for the given family.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wasserstein information matrix by quadrature of the defining
/// expectation, entry by entry. For the regression family the
/// per-observation matrices are summed over the design rows.
WimMatrix wim_generic(const Model& model, const std::vector<double>& params,
                      double tol = 1e-8);

/// Closed forms: location-scale diag(1, second moment); exponential [[2]];
/// regression blockdiag(X'X, 1); skew-normal alpha via its one remaining
/// quadrature. Throws CapabilityError for other families.
WimMatrix wim_closed_form(const Model& model, const std::vector<double>& params);

/// W(alpha) for the skew-normal skewness parameter, evaluated on a
/// rescaled axis so the integrand stays O(1) for any alpha.
double sn_alpha_wim(double alpha, double tol = 1e-10);

/// J' W J for the reparameterisation theta = h^{-1}(phi), J_ij = dtheta_i/dphi_j.
WimMatrix wim_reparam(const WimMatrix& w, const Eigen::MatrixXd& jacobian);

/// Wasserstein-2 distance via the quantile-function integral, clipped to
/// [eps, 1-eps] with eps = 1e-10.
double wasserstein2_distance(const Model& model_a,
                             const std::vector<double>& params_a,
                             const Model& model_b,
                             const std::vector<double>& params_b,
                             double tol = 1e-10);

/// |Dist^2(theta, theta+delta) - delta' W(theta) delta|.
double check_local_expansion(const Model& model,
                             const std::vector<double>& params,
                             const std::vector<double>& delta);

}  // namespace wprior

#endif
