#include <cmath>
#include <doctest.h>
#include <vector>

#include "wprior/prior.hpp"
#include "wprior/quad.hpp"
#include "wprior/special.hpp"
#include "wprior/wim.hpp"

using namespace wprior;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("prior kind names round-trip") {
  for (PriorKind kind :
       {PriorKind::Wasserstein, PriorKind::IndependenceWasserstein,
        PriorKind::IndependenceJeffreys, PriorKind::Flat,
        PriorKind::StudentTApprox}) {
    CHECK(prior_kind_from_name(prior_kind_name(kind)) == kind);
  }
  CHECK(prior_kind_from_name("jeffreys") == PriorKind::IndependenceJeffreys);
  CHECK_THROWS_AS(prior_kind_from_name("nonsense"), std::invalid_argument);
}

TEST_CASE("skew-normal alpha prior: value, symmetry, shape") {
  CHECK(sn_alpha_wprior(0.0) == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-8));
  CHECK(sn_alpha_wprior(1.0) ==
        doctest::Approx(std::sqrt(sn_alpha_wim(1.0))).epsilon(1e-12));

  for (double a = 0.0; a <= 20.0; a += 0.8)
    CHECK(std::abs(sn_alpha_wprior(a) - sn_alpha_wprior(-a)) < 1e-10);

  // Strictly decreasing on [0, inf).
  double prev = sn_alpha_wprior(0.0);
  for (double a : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0}) {
    const double v = sn_alpha_wprior(a);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
}

TEST_CASE("normalizing constant") {
  const double nc = sn_alpha_wprior_normconst();
  CHECK(nc == doctest::Approx(1.9620869221).epsilon(1e-8));  // frozen value

  // Stable under doubling of the quadrature truncation point.
  const double nc2 = sn_alpha_wprior_normconst(1e-8, 2e4);
  CHECK(std::abs(nc - nc2) / nc < 1e-4);

  // Two-level brute-force oracle: integrate pi_W over [0, 300] directly and
  // bound the remainder with the monotone tail.
  const double body =
      integrate_interval([](double a) { return sn_alpha_wprior(a, 1e-8); }, 0.0,
                         300.0, 1e-7)
          .value;
  const double tail_bound = sn_alpha_wprior(300.0) * 300.0;  // < int c a^-5/2
  CHECK(2.0 * body <= nc + 1e-6);
  CHECK(nc <= 2.0 * (body + tail_bound));
}

TEST_CASE("tail orders") {
  // pi_W ~ c alpha^{-5/2}: the compensated product is flat.
  const double w100 = sn_alpha_wprior(100.0) * std::pow(100.0, 2.5);
  const double w800 = sn_alpha_wprior(800.0) * std::pow(800.0, 2.5);
  CHECK(std::abs(w100 - w800) / w100 < 0.05);

  // pi_J ~ c alpha^{-3/2}.
  const double j100 = sn_alpha_jeffreys(100.0) * std::pow(100.0, 1.5);
  const double j800 = sn_alpha_jeffreys(800.0) * std::pow(800.0, 1.5);
  CHECK(std::abs(j100 - j800) / j100 < 0.05);

  // So the ratio pi_J / pi_W grows ~ alpha: Jeffreys has the heavier tail.
  CHECK(sn_alpha_jeffreys(400.0) / sn_alpha_wprior(400.0) >
        2.0 * sn_alpha_jeffreys(100.0) / sn_alpha_wprior(100.0));
}

TEST_CASE("Jeffreys alpha prior") {
  CHECK(sn_alpha_jeffreys(0.0) == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-8));
  for (double a : {0.5, 2.0, 30.0})
    CHECK(sn_alpha_jeffreys(a) ==
          doctest::Approx(sn_alpha_jeffreys(-a)).epsilon(1e-10));

  // Brute-force oracle for the Fisher information integral.
  for (double a : {0.5, 1.5, 3.0}) {
    auto integrand = [a](double x) {
      // log-space: phi(ax)^2 / Phi(ax) underflows far out otherwise.
      const double lg =
          2.0 * log_norm_pdf(a * x) - log_norm_cdf(a * x) + log_norm_pdf(x);
      return x * x * std::exp(lg);
    };
    const double direct =
        2.0 * integrate_real_line(integrand, {1e-9, 1e-9, 4000000}).value;
    CHECK(sn_alpha_jeffreys(a) == doctest::Approx(std::sqrt(direct)).epsilon(1e-6));
  }
}

TEST_CASE("Student-t approximation") {
  // Normalized density: integrates to 1.
  CHECK(integrate_real_line([](double a) { return student_t_approx(a); }, {})
            .value == doctest::Approx(1.0).epsilon(1e-8));

  // Ratio band against the normalized Wasserstein prior on |alpha| <= 10.
  const double nc = sn_alpha_wprior_normconst();
  for (double a = -10.0; a <= 10.0; a += 0.5) {
    const double ratio = (sn_alpha_wprior(a) / nc) / student_t_approx(a);
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
  }

  // Same tail order alpha^{-5/2}: the ratio stays bounded far out.
  const double r100 = (sn_alpha_wprior(100.0) / nc) / student_t_approx(100.0);
  const double r800 = (sn_alpha_wprior(800.0) / nc) / student_t_approx(800.0);
  CHECK(std::abs(r100 - r800) / r100 < 0.1);
}

TEST_CASE("wprior_density and family priors") {
  const LocationScaleModel laplace(BaseDensity::laplace());
  // sqrt(det diag(1, m2)) is parameter-free.
  CHECK(wprior_density(laplace, {3.0, 0.4}) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  const ExponentialModel expm;
  CHECK(wprior_density(expm, {0.7}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

  // Flat specs: constant on the support, -inf off it.
  const PriorSpec ls_prior = wasserstein_prior(laplace);
  CHECK(ls_prior.log_density({0.0, 1.0}) == ls_prior.log_density({5.0, 9.0}));
  CHECK(ls_prior.log_density({0.0, -1.0}) == -kInf);
  const PriorSpec exp_prior = wasserstein_prior(expm);
  CHECK(exp_prior.log_density({2.0}) == exp_prior.log_density({0.1}));
  CHECK(exp_prior.log_density({-2.0}) == -kInf);

  // Alpha-model prior follows pi_W.
  const SkewNormalAlphaModel sn1;
  const PriorSpec alpha_prior = wasserstein_prior(sn1);
  CHECK(alpha_prior.log_density({1.3}) ==
        doctest::Approx(std::log(sn_alpha_wprior(1.3))).epsilon(1e-8));

  // Independence priors over (mu, sigma, alpha).
  const PriorSpec indep = independence_prior_sn();
  CHECK(indep.log_density({0.0, 1.0, 2.0}) - indep.log_density({5.0, 3.0, 2.0}) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(indep.log_density({0.0, 1.0, 2.0}) - indep.log_density({0.0, 1.0, 0.0}) ==
        doctest::Approx(std::log(sn_alpha_wprior(2.0) / sn_alpha_wprior(0.0)))
            .epsilon(1e-8));
  CHECK(indep.log_density({0.0, -1.0, 0.0}) == -kInf);

  const PriorSpec jeff = independence_jeffreys_sn();
  CHECK(jeff.log_density({0.0, 2.0, 1.0}) - jeff.log_density({0.0, 1.0, 1.0}) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-10));
  CHECK(jeff.log_density({0.0, 1.0, 2.0}) - jeff.log_density({0.0, 1.0, 0.0}) ==
        doctest::Approx(std::log(sn_alpha_jeffreys(2.0) / sn_alpha_jeffreys(0.0)))
            .epsilon(1e-8));

  // Flat prior respects positivity masks.
  const PriorSpec flat = flat_prior(laplace);
  CHECK(flat.log_density({0.0, 1.0}) == 0.0);
  CHECK(flat.log_density({0.0, 0.0}) == -kInf);
}

TEST_CASE("prior density transforms with the Jacobian") {
  // Exponential scale <-> rate: pi(lambda) = pi(theta(lambda)) |dtheta/dlambda|
  // = sqrt(2)/lambda^2; verified through the matrix transformation law.
  const ExponentialModel expm;
  for (double lam : {0.3, 1.0, 2.2}) {
    const WimMatrix w = wim_closed_form(expm, {1.0 / lam});
    Eigen::MatrixXd j(1, 1);
    j << -1.0 / (lam * lam);
    const double transported =
        std::sqrt(wim_reparam(w, j).entries.determinant());
    CHECK(transported ==
          doctest::Approx(std::sqrt(2.0) / (lam * lam)).epsilon(1e-12));
  }
}

TEST_CASE("propriety verdicts") {
  // Exponential: proper iff n > 1.
  const ExponentialModel expm;
  CHECK_FALSE(check_propriety(expm, {1.0}).proper);
  CHECK(check_propriety(expm, {1.0, 2.0}).proper);

  // Location-scale SMN: n > 2 and finite mixing sqrt-moment.
  const LocationScaleModel logistic(BaseDensity::logistic());
  CHECK_FALSE(check_propriety(logistic, {1.0, 2.0}).proper);
  CHECK(check_propriety(logistic, {1.0, 2.0, 3.0}).proper);

  // Skew-normal: n > 2.
  const SkewNormalModel sn;
  CHECK(check_propriety(sn, {0.1, 0.5, 0.9}).proper);
  CHECK_FALSE(check_propriety(sn, {0.1, 0.5}).proper);

  // Regression: n > p + 1, full rank, y outside the column space.
  Eigen::MatrixXd design(4, 2);
  design << 1, 0.5, 1, -0.3, 1, 1.2, 1, 0.1;
  const NormalLinRegModel reg(design);
  CHECK(check_propriety(reg, {0.3, 1.9, -2.0, 0.4}).proper);

  Eigen::MatrixXd small = design.topRows(3);  // n = p + 1
  const NormalLinRegModel reg_small(small);
  const ProprietyVerdict v_small = check_propriety(reg_small, {0.3, 1.9, -2.0});
  CHECK_FALSE(v_small.proper);
  bool some_failed = false;
  for (const auto& c : v_small.conditions) some_failed |= !c.satisfied;
  CHECK(some_failed);

  Eigen::MatrixXd collinear(4, 2);
  collinear << 1, 2, 1, 2, 1, 2, 1, 2;
  CHECK_FALSE(
      check_propriety(NormalLinRegModel(collinear), {1.0, 1.0, 1.0, 1.0}).proper);

  // Exact fit: y in the column space of X.
  Eigen::VectorXd beta(2);
  beta << 1.0, -0.5;
  const Eigen::VectorXd fitted = design * beta;
  std::vector<double> y_exact(fitted.data(), fitted.data() + fitted.size());
  CHECK_FALSE(check_propriety(reg, y_exact).proper);
}
