#include <cmath>
#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <vector>

#include "wprior/sim.hpp"

using namespace wprior;
namespace fs = std::filesystem;

namespace {

McmcConfig tiny_mcmc() {
  McmcConfig cfg;
  cfg.iterations = 3000;
  cfg.burnin = 1000;
  cfg.thinning = 4;
  return cfg;
}

Scenario small_regression() {
  Scenario sc;
  sc.kind = ScenarioKind::Regression;
  sc.truth = {1.0, 0.0, 0.5, 1.0, 0.5};
  sc.priors = {PriorKind::Wasserstein};
  sc.sample_sizes = {40};
  sc.replicates = 4;
  sc.mcmc = tiny_mcmc();
  sc.seed = 321;
  return sc;
}

Scenario small_skew_normal() {
  Scenario sc;
  sc.kind = ScenarioKind::SkewNormal;
  sc.truth = {10.0, 1.0, 3.0};
  sc.priors = {PriorKind::IndependenceWasserstein, PriorKind::IndependenceJeffreys};
  sc.sample_sizes = {40};
  sc.replicates = 3;
  sc.mcmc = tiny_mcmc();
  sc.seed = 97;
  return sc;
}

}  // namespace

TEST_CASE("aggregate arithmetic") {
  PosteriorSummary s1, s2;
  s1.mean = {1.0};
  s1.sd = {0.5};
  s1.cred_lo = {0.0};
  s1.cred_hi = {1.0};
  s1.rmse_vs_truth = std::vector<double>{1.2};
  s2.mean = {3.0};
  s2.sd = {0.7};
  s2.cred_lo = {0.0};
  s2.cred_hi = {3.0};
  s2.rmse_vs_truth = std::vector<double>{0.8};
  const std::vector<double> mle1 = {1.9}, mle2 = {2.1};

  const auto rows = aggregate({&s1, &s2}, {&mle1, &mle2}, {2.0}, {"theta"},
                              "wasserstein", 40, true);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].m_mean == doctest::Approx(2.0));
  CHECK(rows[0].m_sd == doctest::Approx(0.6));
  CHECK(rows[0].m_rmse == doctest::Approx(1.0));
  // Truth 2 inside [0,3] but outside [0,1].
  CHECK(rows[0].coverage == doctest::Approx(0.5));
  CHECK(rows[0].m_mle == doctest::Approx(2.0));
  CHECK(rows[0].rmse_mle == doctest::Approx(0.1));

  // Singleton aggregation copies the replicate verbatim.
  const auto one = aggregate({&s1}, {&mle1}, {2.0}, {"theta"}, "flat", 40, true);
  CHECK(one[0].m_mean == s1.mean[0]);
  CHECK(one[0].m_sd == s1.sd[0]);
  CHECK(one[0].m_rmse == (*s1.rmse_vs_truth)[0]);
  CHECK(one[0].coverage == 0.0);
  CHECK(one[0].m_mle == mle1[0]);

  // MLE columns are NaN when the cell does not own them.
  const auto no_mle =
      aggregate({&s1}, {&mle1}, {2.0}, {"theta"}, "jeffreys", 40, false);
  CHECK(std::isnan(no_mle[0].m_mle));
  CHECK(std::isnan(no_mle[0].rmse_mle));
}

TEST_CASE("generate_design") {
  // Intercept column, unit variances, target pairwise correlation.
  const Eigen::MatrixXd x = generate_design(100000, 3, 0.5, 7);
  REQUIRE(x.cols() == 4);
  CHECK((x.col(0).array() == 1.0).all());
  for (int k = 1; k <= 3; ++k) {
    const double var =
        (x.col(k).array() - x.col(k).mean()).square().mean();
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
  }
  for (int a = 1; a <= 3; ++a)
    for (int b = a + 1; b <= 3; ++b) {
      const double corr =
          ((x.col(a).array() - x.col(a).mean()) *
           (x.col(b).array() - x.col(b).mean()))
              .mean();
      CHECK(std::abs(corr - 0.5) < 0.02);
    }

  // Independence case.
  const Eigen::MatrixXd z = generate_design(40000, 2, 0.0, 9);
  const double cross =
      ((z.col(1).array() - z.col(1).mean()) *
       (z.col(2).array() - z.col(2).mean()))
          .mean();
  CHECK(std::abs(cross) < 3.0 / std::sqrt(40000.0));

  // Single covariate, any admissible correlation.
  const Eigen::MatrixXd one = generate_design(10000, 1, 0.3, 11);
  const double var1 = (one.col(1).array() - one.col(1).mean()).square().mean();
  CHECK(var1 == doctest::Approx(1.0).epsilon(0.10));

  CHECK_THROWS_AS(generate_design(10, 3, 1.0, 1), std::domain_error);
  CHECK_THROWS_AS(generate_design(10, 3, -0.6, 1), std::domain_error);

  // Determinism.
  CHECK(generate_design(50, 3, 0.5, 123) == generate_design(50, 3, 0.5, 123));
}

TEST_CASE("scenario json parsing and validation") {
  const auto j = nlohmann::json::parse(R"({
    "kind": "regression",
    "truth": [1, 0, 0.5, 1, 0.5],
    "sample_sizes": [50, 250],
    "replicates": 10,
    "seed": 42,
    "mcmc": {"iterations": 5000, "burnin": 1000, "thinning": 4},
    "pairwise_corr": 0.5
  })");
  const Scenario sc = scenario_from_json(j);
  CHECK(sc.kind == ScenarioKind::Regression);
  CHECK(sc.sample_sizes == std::vector<std::size_t>{50, 250});
  CHECK(sc.replicates == 10);
  CHECK(sc.seed == 42);
  CHECK(sc.mcmc.iterations == 5000);
  CHECK(sc.priors == std::vector<PriorKind>{PriorKind::Wasserstein});

  auto j2 = j;
  j2["kind"] = "skew_normal";
  j2["truth"] = {10.0, 1.0, 1.0};
  const Scenario sn = scenario_from_json(j2);
  CHECK(sn.priors == std::vector<PriorKind>{PriorKind::IndependenceWasserstein,
                                            PriorKind::IndependenceJeffreys});

  auto bad = j;
  bad["kind"] = "weibull";
  CHECK_THROWS_AS(scenario_from_json(bad), std::invalid_argument);

  Scenario invalid = small_regression();
  invalid.replicates = 0;
  CHECK_THROWS_AS(invalid.validate(), std::invalid_argument);
  invalid = small_regression();
  invalid.truth = {1.0, 2.0};
  CHECK_THROWS_AS(invalid.validate(), std::invalid_argument);
  invalid = small_skew_normal();
  invalid.truth[1] = -1.0;
  CHECK_THROWS_AS(invalid.validate(), std::invalid_argument);
}

TEST_CASE("propriety precheck refuses hopeless sample sizes") {
  Scenario sc = small_regression();
  sc.sample_sizes = {5};  // need n > p + 1 = 5
  CHECK_THROWS_AS(run_scenario_serial(sc), ProprietyRefusedError);
  try {
    run_scenario_serial(sc);
  } catch (const ProprietyRefusedError& e) {
    CHECK_FALSE(e.verdict.proper);
    CHECK(!e.verdict.conditions.empty());
  }

  Scenario sn = small_skew_normal();
  sn.sample_sizes = {2};
  CHECK_THROWS_AS(run_scenario_serial(sn), ProprietyRefusedError);
}

TEST_CASE("determinism: serial equals parallel, reruns identical") {
  const Scenario sc = small_regression();
  const ScenarioReport serial = run_scenario_serial(sc);
  const ScenarioReport parallel = run_scenario(sc, 4);
  const ScenarioReport again = run_scenario(sc, 2);
  CHECK(reports_equal(serial, parallel));
  CHECK(reports_equal(parallel, again));

  Scenario other = sc;
  other.seed = 999;
  CHECK_FALSE(reports_equal(serial, run_scenario_serial(other)));
}

TEST_CASE("regression scenario end to end") {
  Scenario sc = small_regression();
  sc.replicates = 6;
  const ScenarioReport report = run_scenario(sc);
  // |priors| x |sample_sizes| x d rows.
  REQUIRE(report.rows.size() == 1 * 1 * 5);
  CHECK(report.excluded_replicates == 0);
  for (const auto& row : report.rows) {
    CHECK(row.coverage >= 0.0);
    CHECK(row.coverage <= 1.0);
    CHECK(std::isfinite(row.m_mean));
    // Jensen-type bound: mRMSE >= |mMean - truth|.
    const auto j = static_cast<std::size_t>(&row - report.rows.data());
    CHECK(row.m_rmse >= std::abs(row.m_mean - sc.truth[j]) - 1e-12);
    // First (only) prior owns the MLE columns.
    CHECK(std::isfinite(row.m_mle));
  }
  // Sanity on recovery at this small scale.
  CHECK(std::abs(report.rows[0].m_mean - 1.0) < 0.3);
  CHECK(std::abs(report.rows[4].m_mean - 0.5) < 0.2);  // sigma
}

TEST_CASE("skew-normal scenario, plots and report files") {
  const Scenario sc = small_skew_normal();
  const ScenarioReport report = run_scenario(sc);
  REQUIRE(report.rows.size() == 2 * 1 * 3);
  // Second prior's rows carry NaN MLE columns.
  CHECK(std::isfinite(report.rows[0].m_mle));
  CHECK(std::isnan(report.rows[3].m_mle));
  REQUIRE(report.plots.size() == 2);

  // Plot pdf columns integrate to ~1 on the emitted grid (trapezoid).
  for (const auto& block : report.plots) {
    for (const auto* col : {&block.pdf_true, &block.pdf_pred, &block.pdf_mle}) {
      double integral = 0.0;
      for (std::size_t g = 1; g < block.x.size(); ++g)
        integral += 0.5 * ((*col)[g] + (*col)[g - 1]) *
                    (block.x[g] - block.x[g - 1]);
      CHECK(integral == doctest::Approx(1.0).epsilon(0.02));
    }
  }

  // Emission round-trip and cross-format row counts.
  const fs::path base = fs::temp_directory_path() / "wprior_test_report";
  const auto csv_files = emit_report(report, ReportFormat::Csv, base);
  REQUIRE(csv_files.size() == 1);
  const ScenarioReport parsed = parse_report_csv(csv_files[0]);
  CHECK(reports_equal(report, parsed));

  const auto md_files = emit_report(report, ReportFormat::Markdown, base);
  std::ifstream md(md_files[0]);
  std::string line;
  std::size_t md_rows = 0;
  while (std::getline(md, line))
    if (!line.empty() && line[0] == '|') ++md_rows;
  CHECK(md_rows - 2 == report.rows.size());  // header + separator

  const auto plot_files = emit_report(report, ReportFormat::PlotData, base);
  CHECK(plot_files.size() == report.plots.size());
  std::ifstream pf(plot_files[0]);
  std::getline(pf, line);
  CHECK(line == "x,pdf_true,pdf_pred,pdf_mle");

  for (const auto& f : csv_files) fs::remove(f);
  for (const auto& f : md_files) fs::remove(f);
  for (const auto& f : plot_files) fs::remove(f);
}

TEST_CASE("coverage of a well-specified flat-prior regression is nominal") {
  Scenario sc = small_regression();
  sc.replicates = 200;
  sc.sample_sizes = {30};
  sc.mcmc.iterations = 4000;
  sc.mcmc.burnin = 1000;
  sc.mcmc.thinning = 3;
  const ScenarioReport report = run_scenario(sc);
  double total = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    total += report.rows[j].coverage;
    CHECK(std::abs(report.rows[j].coverage - 0.95) < 0.05);
  }
  // Binomial bound on the mean coverage across coefficients at N = 200.
  CHECK(std::abs(total / 4.0 - 0.95) < 2.0 * std::sqrt(0.95 * 0.05 / 200.0) + 0.01);
}
