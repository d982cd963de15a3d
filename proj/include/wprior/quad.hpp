#ifndef WPRIOR_QUAD_HPP
#define WPRIOR_QUAD_HPP

#include <cstddef>
#include <functional>
#include <stdexcept>

namespace wprior {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Thrown when the evaluation budget runs out before the tolerance is met.
/// Carries the best estimate obtained so far.
class BudgetExceededError : public std::runtime_error {
 public:
  BudgetExceededError(const std::string& msg, QuadResult best)
      : std::runtime_error(msg), best_estimate(best) {}
  QuadResult best_estimate;
};

struct QuadOptions {
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  std::size_t max_evaluations = 1'000'000;
};

/// Globally adaptive 15/7-point Gauss-Kronrod integration over [a, b].
QuadResult integrate_interval(const std::function<double(double)>& f, double a,
                              double b, const QuadOptions& opt = {});

QuadResult integrate_interval(const std::function<double(double)>& f, double a,
                              double b, double tol);

/// Integral over the whole real line via the substitution x = t/(1-t^2).
QuadResult integrate_real_line(const std::function<double(double)>& f,
                               const QuadOptions& opt = {});

/// Integral over [a, +inf) via x = a + t/(1-t).
QuadResult integrate_half_line(const std::function<double(double)>& f,
                               double a, const QuadOptions& opt = {});

}  // namespace wprior

#endif
