#include "wprior/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wprior/quad.hpp"

namespace wprior {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrt2Pi = 2.5066282746310005024;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kTwoPi = 6.2831853071795864769;
}  // namespace

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double log_norm_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double log_norm_cdf(double x) {
  if (x > -26.0) {
    return std::log(0.5 * std::erfc(-x / kSqrt2));
  }
  // Far left tail: Phi(x) ~ phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...)
  const double x2 = x * x;
  const double series =
      1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2) +
      105.0 / (x2 * x2 * x2 * x2);
  return -0.5 * x2 - std::log(-x) - kLogSqrt2Pi + std::log(series);
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("norm_quantile: p must lie in (0,1)");

  // Acklam's rational approximation, then one Halley step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double e = norm_cdf(x) - p;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double owens_t(double h, double a) {
  if (!std::isfinite(h) || !std::isfinite(a))
    throw std::domain_error("owens_t: arguments must be finite");
  if (a == 0.0) return 0.0;
  const double hh = std::abs(h);  // T(-h, a) = T(h, a)
  const double sign_a = a > 0.0 ? 1.0 : -1.0;
  const double aa = std::abs(a);  // T(h, -a) = -T(h, a)
  if (hh == 0.0) return sign_a * std::atan(aa) / kTwoPi;

  // Beyond t ~ 8.7/h the integrand tail is below 1e-17.
  const double cutoff = std::max(1.0, 8.7 / hh);
  const double upper = std::min(aa, cutoff);
  const double h2 = hh * hh;
  auto integrand = [h2](double t) {
    return std::exp(-0.5 * h2 * (1.0 + t * t)) / (1.0 + t * t);
  };
  QuadOptions opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-13;
  const QuadResult r = integrate_interval(integrand, 0.0, upper, opt);
  return sign_a * r.value / kTwoPi;
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete_beta: continued fraction diverged");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0))
    throw std::domain_error("incomplete_beta: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double x, double nu) {
  if (!(nu > 0.0)) throw std::domain_error("student_t_cdf: nu must be > 0");
  if (x == 0.0) return 0.5;
  const double ib = incomplete_beta(0.5 * nu, 0.5, nu / (nu + x * x));
  return x > 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

double student_t_pdf(double x, double nu) {
  if (!(nu > 0.0)) throw std::domain_error("student_t_pdf: nu must be > 0");
  const double log_norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                          0.5 * std::log(nu * M_PI);
  return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

}  // namespace wprior
