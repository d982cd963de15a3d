#ifndef WPRIOR_SIM_HPP
#define WPRIOR_SIM_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

// vendored single-header nlohmann/json
#include <json.hpp>

#include "wprior/infer.hpp"

namespace wprior {

enum class ScenarioKind { SkewNormal, Regression };

struct Scenario {
  ScenarioKind kind = ScenarioKind::SkewNormal;
  std::vector<double> truth;
  std::vector<PriorKind> priors;
  std::vector<std::size_t> sample_sizes;
  std::size_t replicates = 50;
  McmcConfig mcmc;
  std::uint64_t seed = 0;
  // Regression only.
  std::size_t covariates = 3;       // excluding the intercept column
  double pairwise_corr = 0.5;
  bool redraw_design = true;        // redraw the design per replicate

  void validate() const;
};

Scenario scenario_from_json(const nlohmann::json& j);

struct ReportRow {
  std::string prior;
  std::size_t n = 0;
  std::string parameter;
  double m_mean = 0.0;
  double m_sd = 0.0;
  double m_rmse = 0.0;
  double coverage = 0.0;
  // MLE metrics are data properties, not prior properties: reported on the
  // first prior's rows only, NaN elsewhere.
  double m_mle = 0.0;
  double rmse_mle = 0.0;
};

/// Predictive-density panel for one (prior, n) cell (skew-normal scenarios).
struct PlotBlock {
  std::string prior;
  std::size_t n = 0;
  std::vector<double> x;
  std::vector<double> pdf_true;
  std::vector<double> pdf_pred;  // mean posterior predictive across replicates
  std::vector<double> pdf_mle;   // mean MLE-fitted pdf across replicates
};

struct ScenarioReport {
  std::vector<ReportRow> rows;
  std::vector<PlotBlock> plots;
  std::size_t excluded_replicates = 0;
};

bool reports_equal(const ScenarioReport& a, const ScenarioReport& b);

/// Per-replicate result, pre-aggregation.
struct ReplicateOutcome {
  std::vector<PosteriorSummary> summaries;  // one per prior
  std::vector<double> mle;
  bool mle_converged = false;
  bool failed = false;
  std::string failure_reason;
  // Skew-normal scenarios: predictive / MLE-fitted pdfs on the plot grid.
  std::vector<std::vector<double>> predictive;  // one per prior
  std::vector<double> mle_pdf;
};

/// Rows i.i.d. from the zero-mean unit-variance equicorrelation Gaussian,
/// with an intercept column of ones prepended. `p` counts the covariates.
Eigen::MatrixXd generate_design(std::size_t n, std::size_t p,
                                double pairwise_corr, std::uint64_t seed);

/// Fold one (prior, n) cell of replicate summaries into report rows.
/// MLE metric slots are filled only when `with_mle` is set.
std::vector<ReportRow> aggregate(
    const std::vector<const PosteriorSummary*>& summaries,
    const std::vector<const std::vector<double>*>& mles,
    const std::vector<double>& truth,
    const std::vector<std::string>& param_names, const std::string& prior,
    std::size_t n, bool with_mle);

using ProgressSink = std::function<void(const std::string&)>;

/// Runs every (n, replicate) cell; replicates execute in parallel (OpenMP)
/// with seeds derived from (scenario seed, replicate index), so the report
/// is byte-identical for any thread count. threads <= 0 means the OpenMP
/// default.
ScenarioReport run_scenario(const Scenario& scenario, int threads = 0,
                            const ProgressSink& progress = {});

/// Serial reference implementation; must produce a report identical to
/// run_scenario for the same scenario.
ScenarioReport run_scenario_serial(const Scenario& scenario,
                                   const ProgressSink& progress = {});

enum class ReportFormat { Csv, Markdown, PlotData };

/// Writes the report; returns the list of files created (write-to-temp,
/// atomic rename). For PlotData one file per (prior, n) panel.
std::vector<std::filesystem::path> emit_report(
    const ScenarioReport& report, ReportFormat format,
    const std::filesystem::path& base_path);

ScenarioReport parse_report_csv(const std::filesystem::path& path);

}  // namespace wprior

#endif
