#include "wprior/wim.hpp"

#include <cmath>

#include "wprior/special.hpp"

namespace wprior {

namespace {
constexpr double kPi = 3.1415926535897932385;

QuadResult integrate_support(const Model& model,
                             const std::function<double(double)>& f,
                             const QuadOptions& opt) {
  const Interval sup = model.support();
  if (std::isinf(sup.lo) && std::isinf(sup.hi))
    return integrate_real_line(f, opt);
  if (std::isinf(sup.hi)) return integrate_half_line(f, sup.lo, opt);
  return integrate_interval(f, sup.lo, sup.hi, opt);
}

Eigen::MatrixXd regression_wim_sum(const NormalLinRegModel& model,
                                   const std::vector<double>& params,
                                   const QuadOptions& opt) {
  const std::size_t d = model.dim();
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t obs = 0; obs < model.n_obs(); ++obs) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) {
        auto integrand = [&](double y) {
          const double lp = model.log_pdf_obs(obs, params, y);
          if (!std::isfinite(lp)) return 0.0;
          const auto partials = model.cdf_partials_obs(obs, params, y);
          const double num = partials[i] * partials[j];
          return num == 0.0 ? 0.0 : num / std::exp(lp);
        };
        double entry;
        try {
          entry = integrate_real_line(integrand, opt).value;
        } catch (const BudgetExceededError& e) {
          throw std::runtime_error("wim_generic: quadrature failed at entry (" +
                                   std::to_string(i) + "," + std::to_string(j) +
                                   "), observation " + std::to_string(obs) +
                                   ": " + e.what());
        }
        total(i, j) += entry;
        if (i != j) total(j, i) += entry;
      }
    }
  }
  return total;
}

}  // namespace

WimMatrix wim_generic(const Model& model, const std::vector<double>& params,
                      double tol) {
  model.check_params(params);
  QuadOptions opt;
  opt.abs_tol = tol;
  opt.rel_tol = tol;

  if (const auto* reg = dynamic_cast<const NormalLinRegModel*>(&model)) {
    return {regression_wim_sum(*reg, params, opt), WimMethod::Quadrature, tol};
  }

  const std::size_t d = model.dim();
  Eigen::MatrixXd w(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      auto integrand = [&](double x) {
        const double lp = model.log_pdf(params, x);
        if (!std::isfinite(lp)) return 0.0;
        const auto partials = model.cdf_partials(params, x);
        const double num = partials[i] * partials[j];
        // Where the density underflows the numerator has already vanished.
        return num == 0.0 ? 0.0 : num / std::exp(lp);
      };
      double entry;
      try {
        entry = integrate_support(model, integrand, opt).value;
      } catch (const BudgetExceededError& e) {
        throw std::runtime_error("wim_generic: quadrature failed at entry (" +
                                 std::to_string(i) + "," + std::to_string(j) +
                                 "): " + e.what());
      }
      w(i, j) = entry;
      w(j, i) = entry;
    }
  }
  return {w, WimMethod::Quadrature, tol};
}

double sn_alpha_wim(double alpha, double tol) {
  const double one_a2 = 1.0 + alpha * alpha;
  const double scale = std::sqrt(2.0 * alpha * alpha + 1.0);
  const double kappa = alpha / scale;
  // After y = x * sqrt(2 alpha^2 + 1) the integrand is O(1) with unit width;
  // the 1/(erf+1) factor is evaluated through log Phi to avoid 0/0 in the tail.
  auto integrand = [kappa](double y) {
    return std::exp(-0.5 * y * y - std::log(2.0) - log_norm_cdf(kappa * y));
  };
  QuadOptions opt;
  opt.abs_tol = tol;
  opt.rel_tol = tol;
  const double core = integrate_real_line(integrand, opt).value;
  return std::sqrt(2.0) / (std::pow(kPi, 1.5) * one_a2 * one_a2 * scale) * core;
}

WimMatrix wim_closed_form(const Model& model,
                          const std::vector<double>& params) {
  model.check_params(params);
  if (const auto* ls = dynamic_cast<const LocationScaleModel*>(&model)) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(2, 2);
    w(1, 1) = ls->base().second_moment();
    return {w, WimMethod::ClosedForm, 0.0};
  }
  if (dynamic_cast<const SkewNormalAlphaModel*>(&model)) {
    Eigen::MatrixXd w(1, 1);
    w(0, 0) = sn_alpha_wim(params[0]);
    return {w, WimMethod::ClosedForm, 1e-10};
  }
  if (dynamic_cast<const ExponentialModel*>(&model)) {
    Eigen::MatrixXd w(1, 1);
    w(0, 0) = 2.0;
    return {w, WimMethod::ClosedForm, 0.0};
  }
  if (const auto* reg = dynamic_cast<const NormalLinRegModel*>(&model)) {
    if (!reg->full_column_rank())
      throw std::domain_error(
          "wim_closed_form: design matrix must have full column rank");
    const auto p = static_cast<Eigen::Index>(reg->n_cov());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p + 1, p + 1);
    w.topLeftCorner(p, p) = reg->design().transpose() * reg->design();
    w(p, p) = 1.0;
    return {w, WimMethod::ClosedForm, 0.0};
  }
  throw CapabilityError("wim_closed_form: no closed form for family '" +
                        model.name() + "'; use wim_generic");
}

WimMatrix wim_reparam(const WimMatrix& w, const Eigen::MatrixXd& jacobian) {
  if (w.entries.rows() != jacobian.rows() ||
      w.entries.cols() != jacobian.rows())
    throw std::invalid_argument("wim_reparam: dimension mismatch");
  WimMatrix out = w;
  out.entries = jacobian.transpose() * w.entries * jacobian;
  return out;
}

double wasserstein2_distance(const Model& model_a,
                             const std::vector<double>& params_a,
                             const Model& model_b,
                             const std::vector<double>& params_b, double tol) {
  model_a.check_params(params_a);
  model_b.check_params(params_b);
  constexpr double kEps = 1e-10;
  auto integrand = [&](double u) {
    const double diff =
        model_a.quantile(params_a, u) - model_b.quantile(params_b, u);
    return diff * diff;
  };
  QuadOptions opt;
  opt.abs_tol = tol;
  opt.rel_tol = tol;
  const QuadResult r = integrate_interval(integrand, kEps, 1.0 - kEps, opt);
  return std::sqrt(std::max(r.value, 0.0));
}

double check_local_expansion(const Model& model,
                             const std::vector<double>& params,
                             const std::vector<double>& delta) {
  model.check_params(params);
  if (delta.size() != model.dim())
    throw std::invalid_argument("check_local_expansion: delta dimension");
  std::vector<double> shifted = params;
  for (std::size_t i = 0; i < delta.size(); ++i) shifted[i] += delta[i];
  model.check_params(shifted);

  const double dist =
      wasserstein2_distance(model, params, model, shifted, 1e-13);
  WimMatrix w;
  try {
    w = wim_closed_form(model, params);
  } catch (const CapabilityError&) {
    w = wim_generic(model, params, 1e-10);
  }
  Eigen::Map<const Eigen::VectorXd> d(delta.data(),
                                      static_cast<Eigen::Index>(delta.size()));
  const double quadratic_form = d.dot(w.entries * d);
  return std::abs(dist * dist - quadratic_form);
}

}  // namespace wprior
