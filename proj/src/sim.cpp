#include "wprior/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "wprior/rng.hpp"
#include "wprior/wim.hpp"

namespace wprior {

namespace {

bool same_value(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return a == b;
}

std::string kind_name(ScenarioKind kind) {
  return kind == ScenarioKind::SkewNormal ? "skew_normal" : "regression";
}

struct ScenarioContext {
  const Scenario& sc;
  std::vector<PriorSpec> priors;
  std::vector<std::string> prior_names;
  std::vector<std::string> param_names;
  std::vector<double> plot_grid;  // skew-normal scenarios only
};

PriorSpec prior_for(const Scenario& sc, PriorKind kind) {
  if (sc.kind == ScenarioKind::SkewNormal) {
    switch (kind) {
      case PriorKind::Wasserstein:
      case PriorKind::IndependenceWasserstein:
        return independence_prior_sn();
      case PriorKind::IndependenceJeffreys:
        return independence_jeffreys_sn();
      case PriorKind::Flat:
        return flat_prior(SkewNormalModel{});
      default:
        break;
    }
    throw std::invalid_argument("scenario: unsupported prior for skew-normal");
  }
  // Regression: the Wasserstein prior is flat over (beta, sigma>0).
  if (kind == PriorKind::Wasserstein || kind == PriorKind::Flat) {
    PriorSpec spec;
    spec.kind = kind;
    spec.description = "flat (wasserstein) prior over (beta, sigma)";
    spec.log_density = [](const std::vector<double>& params) {
      return params.back() > 0.0
                 ? 0.0
                 : -std::numeric_limits<double>::infinity();
    };
    return spec;
  }
  throw std::invalid_argument("scenario: unsupported prior for regression");
}

ScenarioContext make_context(const Scenario& sc) {
  ScenarioContext ctx{sc, {}, {}, {}, {}};
  for (PriorKind kind : sc.priors) {
    ctx.priors.push_back(prior_for(sc, kind));
    ctx.prior_names.push_back(prior_kind_name(kind));
  }
  if (sc.kind == ScenarioKind::SkewNormal) {
    ctx.param_names = {"mu", "sigma", "alpha"};
    const double mu = sc.truth[0], sigma = sc.truth[1];
    for (int i = 0; i <= 320; ++i)
      ctx.plot_grid.push_back(mu - 8.0 * sigma + 0.05 * sigma * i);
  } else {
    for (std::size_t k = 0; k <= sc.covariates; ++k)
      ctx.param_names.push_back("beta" + std::to_string(k));
    ctx.param_names.push_back("sigma");
  }
  return ctx;
}

ReplicateOutcome run_skew_normal_replicate(const ScenarioContext& ctx,
                                           std::size_t n, std::size_t rep) {
  const Scenario& sc = ctx.sc;
  ReplicateOutcome out;
  const std::uint64_t rep_seed = substream_seed(sc.seed, n, rep);
  static const SkewNormalModel model;
  try {
    const auto data = model.sample(sc.truth, n, substream_seed(rep_seed, 1));

    double mean = 0.0;
    for (double x : data) mean += x;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0;
    for (double x : data) {
      m2 += (x - mean) * (x - mean);
      m3 += (x - mean) * (x - mean) * (x - mean);
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    const std::vector<double> moments_init = {mean, std::sqrt(m2),
                                              m3 >= 0.0 ? 1.0 : -1.0};

    const MleResult mle = mle_fit(model, data, moments_init);
    out.mle = mle.params;
    out.mle_converged = mle.converged;

    // Initialize chains at the MLE when usable; the likelihood is flat in
    // alpha near symmetry, so a runaway alpha-hat falls back to moments.
    std::vector<double> init = mle.params;
    if (!std::isfinite(init[0]) || !std::isfinite(init[1]) ||
        !(init[1] > 0.0) || std::abs(init[2]) > 25.0)
      init = moments_init;

    out.mle_pdf.resize(ctx.plot_grid.size());
    for (std::size_t g = 0; g < ctx.plot_grid.size(); ++g)
      out.mle_pdf[g] = model.pdf(mle.params, ctx.plot_grid[g]);

    for (std::size_t pi = 0; pi < ctx.priors.size(); ++pi) {
      auto log_post = make_log_posterior(model, ctx.priors[pi], data);
      std::vector<double> chain_init =
          std::isfinite(log_post(init)) ? init : moments_init;
      Chain chain =
          mcmc_sample(log_post, model.positive_params(), chain_init, sc.mcmc,
                      substream_seed(rep_seed, 100 + pi));
      out.summaries.push_back(summarize(chain, &sc.truth));
      out.predictive.push_back(
          predictive_density(chain, model, ctx.plot_grid));
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.failure_reason = e.what();
  }
  return out;
}

ReplicateOutcome run_regression_replicate(const ScenarioContext& ctx,
                                          std::size_t n, std::size_t rep) {
  const Scenario& sc = ctx.sc;
  ReplicateOutcome out;
  const std::uint64_t rep_seed = substream_seed(sc.seed, n, rep);
  try {
    const std::uint64_t design_seed = sc.redraw_design
                                          ? substream_seed(rep_seed, 7)
                                          : substream_seed(sc.seed, 7, n);
    const Eigen::MatrixXd design =
        generate_design(n, sc.covariates, sc.pairwise_corr, design_seed);
    const NormalLinRegModel model(design);
    const auto data = model.sample(sc.truth, n, substream_seed(rep_seed, 1));

    const ProprietyVerdict verdict = check_propriety(model, data);
    if (!verdict.proper) {
      out.failed = true;
      out.failure_reason = "propriety conditions not verified";
      return out;
    }

    // Normal-equations start, then Nelder-Mead polish.
    Eigen::Map<const Eigen::VectorXd> y(data.data(),
                                        static_cast<Eigen::Index>(n));
    Eigen::VectorXd beta_hat = design.colPivHouseholderQr().solve(y);
    const double sigma_hat =
        (y - design * beta_hat).norm() / std::sqrt(static_cast<double>(n));
    std::vector<double> init(beta_hat.data(), beta_hat.data() + beta_hat.size());
    init.push_back(std::max(sigma_hat, 1e-8));

    const MleResult mle = mle_fit(model, data, init);
    out.mle = mle.params;
    out.mle_converged = mle.converged;

    for (std::size_t pi = 0; pi < ctx.priors.size(); ++pi) {
      auto log_post = make_log_posterior(model, ctx.priors[pi], data);
      Chain chain =
          mcmc_sample(log_post, model.positive_params(), mle.params, sc.mcmc,
                      substream_seed(rep_seed, 100 + pi));
      out.summaries.push_back(summarize(chain, &sc.truth));
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.failure_reason = e.what();
  }
  return out;
}

ReplicateOutcome run_replicate(const ScenarioContext& ctx, std::size_t n,
                               std::size_t rep) {
  return ctx.sc.kind == ScenarioKind::SkewNormal
             ? run_skew_normal_replicate(ctx, n, rep)
             : run_regression_replicate(ctx, n, rep);
}

void precheck_propriety(const Scenario& sc) {
  for (std::size_t n : sc.sample_sizes) {
    ProprietyVerdict verdict;
    if (sc.kind == ScenarioKind::SkewNormal) {
      verdict.conditions.push_back(
          {"n > 2", n > 2, "sample size n = " + std::to_string(n)});
    } else {
      const std::size_t p = sc.covariates + 1;  // plus intercept
      verdict.conditions.push_back(
          {"n > p + 1", n > p + 1,
           "n = " + std::to_string(n) + ", p = " + std::to_string(p)});
    }
    verdict.proper = true;
    for (const auto& c : verdict.conditions) verdict.proper &= c.satisfied;
    if (!verdict.proper)
      throw ProprietyRefusedError(
          "scenario refused: propriety conditions fail at n = " +
              std::to_string(n),
          verdict);
  }
}

ScenarioReport run_impl(const Scenario& sc, bool parallel, int threads,
                        const ProgressSink& progress) {
  sc.validate();
  precheck_propriety(sc);
  const ScenarioContext ctx = make_context(sc);

  ScenarioReport report;
  for (std::size_t n : sc.sample_sizes) {
    std::vector<ReplicateOutcome> outcomes(sc.replicates);
    const auto total = static_cast<std::int64_t>(sc.replicates);
    if (parallel) {
#ifdef _OPENMP
      if (threads > 0) omp_set_num_threads(threads);
#pragma omp parallel for schedule(dynamic)
#endif
      for (std::int64_t rep = 0; rep < total; ++rep) {
        outcomes[static_cast<std::size_t>(rep)] =
            run_replicate(ctx, n, static_cast<std::size_t>(rep));
        if (progress) {
#ifdef _OPENMP
#pragma omp critical(wprior_progress)
#endif
          progress("n=" + std::to_string(n) + " replicate " +
                   std::to_string(rep) + " done");
        }
      }
    } else {
      for (std::int64_t rep = 0; rep < total; ++rep) {
        outcomes[static_cast<std::size_t>(rep)] =
            run_replicate(ctx, n, static_cast<std::size_t>(rep));
        if (progress)
          progress("n=" + std::to_string(n) + " replicate " +
                   std::to_string(rep) + " done");
      }
    }

    // Deterministic fold in replicate order.
    std::vector<const ReplicateOutcome*> kept;
    for (const auto& o : outcomes) {
      if (o.failed)
        ++report.excluded_replicates;
      else
        kept.push_back(&o);
    }
    if (kept.empty())
      throw std::runtime_error("run_scenario: every replicate failed at n = " +
                               std::to_string(n));

    for (std::size_t pi = 0; pi < ctx.priors.size(); ++pi) {
      std::vector<const PosteriorSummary*> summaries;
      std::vector<const std::vector<double>*> mles;
      for (const auto* o : kept) {
        summaries.push_back(&o->summaries[pi]);
        mles.push_back(&o->mle);
      }
      auto rows = aggregate(summaries, mles, sc.truth, ctx.param_names,
                            ctx.prior_names[pi], n, pi == 0);
      report.rows.insert(report.rows.end(), rows.begin(), rows.end());

      if (sc.kind == ScenarioKind::SkewNormal) {
        PlotBlock block;
        block.prior = ctx.prior_names[pi];
        block.n = n;
        block.x = ctx.plot_grid;
        static const SkewNormalModel model;
        block.pdf_true.resize(ctx.plot_grid.size());
        for (std::size_t g = 0; g < ctx.plot_grid.size(); ++g)
          block.pdf_true[g] = model.pdf(sc.truth, ctx.plot_grid[g]);
        block.pdf_pred.assign(ctx.plot_grid.size(), 0.0);
        block.pdf_mle.assign(ctx.plot_grid.size(), 0.0);
        for (const auto* o : kept) {
          for (std::size_t g = 0; g < ctx.plot_grid.size(); ++g) {
            block.pdf_pred[g] += o->predictive[pi][g];
            block.pdf_mle[g] += o->mle_pdf[g];
          }
        }
        for (std::size_t g = 0; g < ctx.plot_grid.size(); ++g) {
          block.pdf_pred[g] /= static_cast<double>(kept.size());
          block.pdf_mle[g] /= static_cast<double>(kept.size());
        }
        report.plots.push_back(std::move(block));
      }
    }
  }
  return report;
}

}  // namespace

void Scenario::validate() const {
  if (replicates < 1)
    throw std::invalid_argument("scenario: replicates must be >= 1");
  if (sample_sizes.empty())
    throw std::invalid_argument("scenario: sample_sizes is empty");
  if (priors.empty())
    throw std::invalid_argument("scenario: priors is empty");
  mcmc.validate();
  const std::size_t want =
      kind == ScenarioKind::SkewNormal ? 3 : covariates + 2;
  if (truth.size() != want)
    throw std::invalid_argument("scenario: truth must have " +
                                std::to_string(want) + " entries for kind " +
                                kind_name(kind));
  if (kind == ScenarioKind::SkewNormal && !(truth[1] > 0.0))
    throw std::invalid_argument("scenario: sigma truth must be > 0");
  if (kind == ScenarioKind::Regression && !(truth.back() > 0.0))
    throw std::invalid_argument("scenario: sigma truth must be > 0");
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario sc;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "skew_normal")
    sc.kind = ScenarioKind::SkewNormal;
  else if (kind == "regression" || kind == "linear_regression")
    sc.kind = ScenarioKind::Regression;
  else
    throw std::invalid_argument("scenario: unknown kind '" + kind + "'");

  sc.truth = j.at("truth").get<std::vector<double>>();
  sc.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
  if (j.contains("replicates")) sc.replicates = j.at("replicates");
  if (j.contains("seed")) sc.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("priors")) {
    sc.priors.clear();
    for (const auto& name : j.at("priors"))
      sc.priors.push_back(prior_kind_from_name(name.get<std::string>()));
  } else {
    sc.priors = sc.kind == ScenarioKind::SkewNormal
                    ? std::vector<PriorKind>{PriorKind::IndependenceWasserstein,
                                             PriorKind::IndependenceJeffreys}
                    : std::vector<PriorKind>{PriorKind::Wasserstein};
  }
  if (j.contains("mcmc")) {
    const auto& m = j.at("mcmc");
    if (m.contains("iterations")) sc.mcmc.iterations = m.at("iterations");
    if (m.contains("burnin")) sc.mcmc.burnin = m.at("burnin");
    if (m.contains("thinning")) sc.mcmc.thinning = m.at("thinning");
    if (m.contains("target_accept")) sc.mcmc.target_accept = m.at("target_accept");
    if (m.contains("initial_scale"))
      sc.mcmc.initial_scale = m.at("initial_scale").get<std::vector<double>>();
  }
  if (j.contains("covariates")) sc.covariates = j.at("covariates");
  if (j.contains("pairwise_corr")) sc.pairwise_corr = j.at("pairwise_corr");
  if (j.contains("redraw_design")) sc.redraw_design = j.at("redraw_design");
  sc.validate();
  return sc;
}

Eigen::MatrixXd generate_design(std::size_t n, std::size_t p,
                                double pairwise_corr, std::uint64_t seed) {
  if (n < 1 || p < 1) throw std::domain_error("generate_design: n, p >= 1");
  const double lower = p > 1 ? -1.0 / (static_cast<double>(p) - 1.0) : -1.0;
  if (!(pairwise_corr > lower && pairwise_corr < 1.0))
    throw std::domain_error(
        "generate_design: correlation outside the positive-definite range");

  // Equicorrelation square root: sqrt(S) = a I + b 11', closed form.
  const double a = std::sqrt(1.0 - pairwise_corr);
  const double b =
      (std::sqrt(1.0 - pairwise_corr + static_cast<double>(p) * pairwise_corr) -
       a) /
      static_cast<double>(p);

  Rng rng(seed);
  Eigen::MatrixXd design(n, p + 1);
  std::vector<double> z(p);
  for (std::size_t i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    double zsum = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      z[k] = rng.normal();
      zsum += z[k];
    }
    for (std::size_t k = 0; k < p; ++k)
      design(i, k + 1) = a * z[k] + b * zsum;
  }
  return design;
}

std::vector<ReportRow> aggregate(
    const std::vector<const PosteriorSummary*>& summaries,
    const std::vector<const std::vector<double>*>& mles,
    const std::vector<double>& truth,
    const std::vector<std::string>& param_names, const std::string& prior,
    std::size_t n, bool with_mle) {
  if (summaries.empty())
    throw std::invalid_argument("aggregate: no replicates");
  const std::size_t reps = summaries.size();
  const std::size_t d = truth.size();
  std::vector<ReportRow> rows(d);
  for (std::size_t j = 0; j < d; ++j) {
    ReportRow& row = rows[j];
    row.prior = prior;
    row.n = n;
    row.parameter = param_names[j];
    double cover = 0.0, mle_mean = 0.0, mle_sq = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const PosteriorSummary& s = *summaries[r];
      row.m_mean += s.mean[j];
      row.m_sd += s.sd[j];
      row.m_rmse += s.rmse_vs_truth ? (*s.rmse_vs_truth)[j] : 0.0;
      if (s.cred_lo[j] <= truth[j] && truth[j] <= s.cred_hi[j]) cover += 1.0;
      const double mle_j = (*mles[r])[j];
      mle_mean += mle_j;
      mle_sq += (mle_j - truth[j]) * (mle_j - truth[j]);
    }
    const auto k = static_cast<double>(reps);
    row.m_mean /= k;
    row.m_sd /= k;
    row.m_rmse /= k;
    row.coverage = cover / k;
    if (with_mle) {
      row.m_mle = mle_mean / k;
      row.rmse_mle = std::sqrt(mle_sq / k);
    } else {
      row.m_mle = std::numeric_limits<double>::quiet_NaN();
      row.rmse_mle = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return rows;
}

ScenarioReport run_scenario(const Scenario& scenario, int threads,
                            const ProgressSink& progress) {
  return run_impl(scenario, true, threads, progress);
}

ScenarioReport run_scenario_serial(const Scenario& scenario,
                                   const ProgressSink& progress) {
  return run_impl(scenario, false, 1, progress);
}

bool reports_equal(const ScenarioReport& a, const ScenarioReport& b) {
  if (a.rows.size() != b.rows.size() ||
      a.excluded_replicates != b.excluded_replicates)
    return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    if (x.prior != y.prior || x.n != y.n || x.parameter != y.parameter ||
        !same_value(x.m_mean, y.m_mean) || !same_value(x.m_sd, y.m_sd) ||
        !same_value(x.m_rmse, y.m_rmse) ||
        !same_value(x.coverage, y.coverage) ||
        !same_value(x.m_mle, y.m_mle) || !same_value(x.rmse_mle, y.rmse_mle))
      return false;
  }
  return true;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& body) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << body;
    if (!out.good()) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::vector<std::filesystem::path> emit_report(
    const ScenarioReport& report, ReportFormat format,
    const std::filesystem::path& base_path) {
  if (report.rows.empty())
    throw std::invalid_argument("emit_report: report is empty");
  std::vector<std::filesystem::path> written;

  if (format == ReportFormat::Csv) {
    std::ostringstream out;
    out << "# excluded_replicates=" << report.excluded_replicates << "\n";
    out << "prior,n,parameter,mMean,mSD,mRMSE,coverage,mMLE,rmseMLE\n";
    for (const auto& r : report.rows)
      out << r.prior << ',' << r.n << ',' << r.parameter << ','
          << format_double(r.m_mean) << ',' << format_double(r.m_sd) << ','
          << format_double(r.m_rmse) << ',' << format_double(r.coverage) << ','
          << format_double(r.m_mle) << ',' << format_double(r.rmse_mle)
          << '\n';
    std::filesystem::path path = base_path;
    path += ".csv";
    atomic_write(path, out.str());
    written.push_back(path);
  } else if (format == ReportFormat::Markdown) {
    std::ostringstream out;
    out << "| prior | n | parameter | mMean | mSD | mRMSE | Coverage | mMLE |"
           " RMSE-MLE |\n";
    out << "|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : report.rows)
      out << "| " << r.prior << " | " << r.n << " | " << r.parameter << " | "
          << format_double(r.m_mean) << " | " << format_double(r.m_sd)
          << " | " << format_double(r.m_rmse) << " | "
          << format_double(r.coverage) << " | " << format_double(r.m_mle)
          << " | " << format_double(r.rmse_mle) << " |\n";
    std::filesystem::path path = base_path;
    path += ".md";
    atomic_write(path, out.str());
    written.push_back(path);
  } else {
    for (const auto& block : report.plots) {
      std::ostringstream out;
      out << "x,pdf_true,pdf_pred,pdf_mle\n";
      for (std::size_t g = 0; g < block.x.size(); ++g)
        out << format_double(block.x[g]) << ','
            << format_double(block.pdf_true[g]) << ','
            << format_double(block.pdf_pred[g]) << ','
            << format_double(block.pdf_mle[g]) << '\n';
      std::filesystem::path path = base_path;
      path += "_plot_" + block.prior + "_n" + std::to_string(block.n) + ".csv";
      atomic_write(path, out.str());
      written.push_back(path);
    }
  }
  return written;
}

ScenarioReport parse_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  ScenarioReport report;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("excluded_replicates=");
      if (pos != std::string::npos)
        report.excluded_replicates =
            std::stoul(line.substr(pos + std::string("excluded_replicates=").size()));
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::istringstream fields(line);
    std::string token;
    ReportRow row;
    std::getline(fields, row.prior, ',');
    std::getline(fields, token, ',');
    row.n = std::stoul(token);
    std::getline(fields, row.parameter, ',');
    double* slots[] = {&row.m_mean, &row.m_sd,    &row.m_rmse,
                       &row.coverage, &row.m_mle, &row.rmse_mle};
    for (double* slot : slots) {
      std::getline(fields, token, ',');
      *slot = std::stod(token);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace wprior
