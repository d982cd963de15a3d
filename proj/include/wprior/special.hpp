#ifndef WPRIOR_SPECIAL_HPP
#define WPRIOR_SPECIAL_HPP

#include <cstdint>

namespace wprior {

double norm_pdf(double x);
double log_norm_pdf(double x);
double norm_cdf(double x);

/// log Phi(x), stable on the whole real line (asymptotic series in the
/// far left tail where erfc underflows).
double log_norm_cdf(double x);

/// Inverse of the standard normal cdf, accurate to ~1e-15 after one
/// Halley refinement of a rational initial guess.
double norm_quantile(double p);

/// Owen's T function T(h, a) = (1/2pi) int_0^a exp(-h^2(1+t^2)/2)/(1+t^2) dt,
/// computed by adaptive quadrature of the defining integral (target 1e-12).
double owens_t(double h, double a);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Student-t cdf with nu degrees of freedom (location 0, scale 1).
double student_t_cdf(double x, double nu);
double student_t_pdf(double x, double nu);

}  // namespace wprior

#endif
