#include <cmath>
#include <doctest.h>

#include "wprior/quad.hpp"
#include "wprior/special.hpp"

using namespace wprior;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("finite-interval oracles") {
  auto poly = [](double x) { return 3.0 * x * x; };
  CHECK(integrate_interval(poly, 0.0, 2.0, 1e-12).value ==
        doctest::Approx(8.0).epsilon(1e-12));

  auto osc = [](double x) { return std::sin(10.0 * x); };
  CHECK(integrate_interval(osc, 0.0, kPi, 1e-12).value ==
        doctest::Approx((1.0 - std::cos(10.0 * kPi)) / 10.0).epsilon(1e-10));

  // Integrable endpoint singularity.
  auto sqrt_sing = [](double x) { return 1.0 / std::sqrt(x); };
  CHECK(integrate_interval(sqrt_sing, 1e-300, 1.0, 1e-9).value ==
        doctest::Approx(2.0).epsilon(1e-6));

  // Quantile-side oracle: int_0^1 (Phi^{-1}(p))^2 dp = 1.
  auto q2 = [](double p) {
    const double z = norm_quantile(p);
    return z * z;
  };
  CHECK(integrate_interval(q2, 1e-12, 1.0 - 1e-12, 1e-10).value ==
        doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("real-line oracles") {
  auto gauss = [](double x) { return std::exp(-x * x); };
  CHECK(integrate_real_line(gauss, {}).value ==
        doctest::Approx(std::sqrt(kPi)).epsilon(1e-10));

  auto norm_x2 = [](double x) { return x * x * norm_pdf(x); };
  CHECK(integrate_real_line(norm_x2, {}).value ==
        doctest::Approx(1.0).epsilon(1e-9));

  // Laplace second moment = 2.
  auto lap_x2 = [](double x) { return 0.5 * x * x * std::exp(-std::abs(x)); };
  CHECK(integrate_real_line(lap_x2, {}).value ==
        doctest::Approx(2.0).epsilon(1e-9));

  // Heavy-ish tails: Cauchy-like normalization.
  auto cauchy = [](double x) { return 1.0 / (kPi * (1.0 + x * x)); };
  CHECK(integrate_real_line(cauchy, {}).value ==
        doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("half-line oracles") {
  auto expd = [](double x) { return std::exp(-x); };
  CHECK(integrate_half_line(expd, 0.0, {}).value ==
        doctest::Approx(1.0).epsilon(1e-10));

  auto gamma3 = [](double x) { return x * x * std::exp(-x); };
  CHECK(integrate_half_line(gamma3, 0.0, {}).value ==
        doctest::Approx(2.0).epsilon(1e-9));

  // Shifted origin.
  auto shifted = [](double x) { return std::exp(-(x - 5.0)); };
  CHECK(integrate_half_line(shifted, 5.0, {}).value ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("error estimate and symmetry") {
  auto f = [](double x) { return std::exp(-x * x / 2.0) * std::cos(3.0 * x); };
  const QuadResult r = integrate_real_line(f, {});
  const double exact =
      std::sqrt(2.0 * kPi) * std::exp(-4.5);  // sqrt(2pi) e^{-9/2}
  CHECK(std::abs(r.value - exact) <= std::max(1e-8, 10.0 * r.error_estimate));

  // Even integrand: halving the domain doubles up consistently.
  auto even = [](double x) { return std::exp(-std::abs(x)) * x * x; };
  const double whole = integrate_real_line(even, {}).value;
  const double half = integrate_half_line(even, 0.0, {}).value;
  CHECK(whole == doctest::Approx(2.0 * half).epsilon(1e-9));
}

TEST_CASE("budget enforcement") {
  QuadOptions tight;
  tight.abs_tol = 1e-14;
  tight.rel_tol = 1e-14;
  tight.max_evaluations = 60;  // fewer than one refinement round needs

  auto nasty = [](double x) { return std::sqrt(std::abs(std::sin(50.0 * x))); };
  CHECK_THROWS_AS(integrate_interval(nasty, 0.0, 1.0, tight),
                  BudgetExceededError);

  // The exception carries the best value so far.
  try {
    integrate_interval(nasty, 0.0, 1.0, tight);
  } catch (const BudgetExceededError& e) {
    CHECK(std::isfinite(e.best_estimate.value));
    CHECK(e.best_estimate.evaluations <= 2 * tight.max_evaluations);
  }

  // A generous budget on the same integrand succeeds.
  QuadOptions loose;
  loose.abs_tol = 1e-6;
  loose.rel_tol = 1e-6;
  CHECK_NOTHROW(integrate_interval(nasty, 0.0, 1.0, loose));
}

TEST_CASE("tolerance monotonicity") {
  auto f = [](double x) { return std::log1p(x * x) * std::exp(-x); };
  const QuadResult coarse = integrate_half_line(f, 0.0, {1e-4, 1e-4, 1000000});
  const QuadResult fine = integrate_half_line(f, 0.0, {1e-12, 1e-12, 1000000});
  CHECK(fine.evaluations >= coarse.evaluations);
  CHECK(std::abs(coarse.value - fine.value) < 1e-4);
}
