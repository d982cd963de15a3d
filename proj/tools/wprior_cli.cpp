// wprior: Wasserstein information matrices, Wasserstein priors, Bayesian
// fitting and simulation studies from the command line.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wprior/infer.hpp"
#include "wprior/prior.hpp"
#include "wprior/rng.hpp"
#include "wprior/sim.hpp"
#include "wprior/wim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wprior;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitPropriety = 4;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

/// Resolves relative output paths against $WPRIOR_OUTPUT_DIR when set.
fs::path resolve_output(const fs::path& path) {
  if (path.is_absolute()) return path;
  if (const char* dir = std::getenv("WPRIOR_OUTPUT_DIR"))
    return fs::path(dir) / path;
  return path;
}

void atomic_write(const fs::path& path, const std::string& body) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << body;
    if (!out.good()) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_or_print(const std::string& output, const std::string& body) {
  if (output.empty()) {
    std::cout << body;
  } else {
    atomic_write(resolve_output(output), body);
  }
}

struct ModelSpec {
  std::shared_ptr<Model> model;
  std::vector<double> params;
};

ModelSpec parse_model(const json& j) {
  ModelSpec spec;
  std::string family;
  try {
    family = j.at("family").get<std::string>();
    if (j.contains("params"))
      spec.params = j.at("params").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model spec: ") + e.what());
  }

  if (family == "exponential") {
    spec.model = std::make_shared<ExponentialModel>();
  } else if (family == "location_scale") {
    const std::string base =
        j.value("base", std::string("normal"));
    BaseDensity density = BaseDensity::normal();
    if (base == "normal")
      density = BaseDensity::normal();
    else if (base == "laplace")
      density = BaseDensity::laplace();
    else if (base == "logistic")
      density = BaseDensity::logistic();
    else if (base == "student_t")
      density = BaseDensity::student_t(j.value("df", 5.0));
    else
      throw ConfigError("unknown base density '" + base + "'");
    spec.model = std::make_shared<LocationScaleModel>(density);
  } else if (family == "skew_normal") {
    spec.model = std::make_shared<SkewNormalModel>();
  } else if (family == "skew_normal_alpha") {
    spec.model = std::make_shared<SkewNormalAlphaModel>();
  } else if (family == "linear_regression") {
    if (!j.contains("design"))
      throw ConfigError("linear_regression spec needs a \"design\" matrix");
    const auto rows = j.at("design").get<std::vector<std::vector<double>>>();
    if (rows.empty()) throw ConfigError("design matrix is empty");
    Eigen::MatrixXd design(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.front().size())
        throw ConfigError("design matrix rows have unequal lengths");
      for (std::size_t k = 0; k < rows[i].size(); ++k)
        design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
            rows[i][k];
    }
    spec.model = std::make_shared<NormalLinRegModel>(std::move(design));
  } else {
    throw ConfigError("unknown family '" + family + "'");
  }

  if (spec.params.empty() && family != "linear_regression")
    throw ConfigError("model spec: \"params\" is required");
  try {
    if (!spec.params.empty()) spec.model->check_params(spec.params);
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("model params: ") + e.what());
  }
  return spec;
}

json verdict_to_json(const ProprietyVerdict& verdict) {
  json out;
  out["proper"] = verdict.proper;
  out["conditions"] = json::array();
  for (const auto& c : verdict.conditions)
    out["conditions"].push_back(
        {{"name", c.name}, {"satisfied", c.satisfied}, {"detail", c.detail}});
  return out;
}

std::uint64_t require_seed(const std::optional<std::uint64_t>& flag,
                           const json& config) {
  if (flag) return *flag;
  if (config.contains("seed")) return config.at("seed").get<std::uint64_t>();
  throw ConfigError(
      "no seed given: set \"seed\" in the config or pass --seed "
      "(wall-clock seeding is deliberately unsupported)");
}

// ---------------------------------------------------------------------------

int cmd_wim(const fs::path& config_path, const std::string& output) {
  const json config = load_json(config_path);
  const ModelSpec spec = parse_model(config);
  const std::string method = config.value("method", std::string("generic"));
  const double tol = config.value("tolerance", 1e-8);

  WimMatrix wim;
  if (method == "generic")
    wim = wim_generic(*spec.model, spec.params, tol);
  else if (method == "closed_form")
    wim = wim_closed_form(*spec.model, spec.params);
  else
    throw ConfigError("method must be \"generic\" or \"closed_form\"");

  json out;
  out["family"] = spec.model->name();
  out["params"] = spec.params;
  out["method"] =
      wim.method == WimMethod::ClosedForm ? "closed_form" : "quadrature";
  out["tolerance"] = wim.tol_used;
  out["matrix"] = json::array();
  for (Eigen::Index i = 0; i < wim.entries.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < wim.entries.cols(); ++k)
      row.push_back(wim.entries(i, k));
    out["matrix"].push_back(std::move(row));
  }
  write_or_print(output, out.dump(2) + "\n");
  return kExitOk;
}

int cmd_prior(const fs::path& config_path, const std::string& output) {
  const json config = load_json(config_path);
  double lo, hi, step;
  try {
    lo = config.at("lo").get<double>();
    hi = config.at("hi").get<double>();
    step = config.at("step").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("grid spec: ") + e.what());
  }
  if (!(step > 0.0) || !(hi >= lo))
    throw ConfigError("grid spec: need step > 0 and hi >= lo");
  const double tol = config.value("tolerance", 1e-9);
  const bool normalize = config.value("normalize", false);
  const double norm = normalize ? sn_alpha_wprior_normconst() : 1.0;

  std::ostringstream csv;
  csv.precision(12);
  csv << "alpha,pi_w,pi_j,t_approx\n";
  const auto steps = static_cast<long>(std::llround((hi - lo) / step));
  for (long i = 0; i <= steps; ++i) {
    const double alpha = lo + step * static_cast<double>(i);
    csv << alpha << ',' << sn_alpha_wprior(alpha, tol) / norm << ','
        << sn_alpha_jeffreys(alpha, tol) << ',' << student_t_approx(alpha)
        << '\n';
  }
  write_or_print(output, csv.str());
  return kExitOk;
}

int cmd_fit(const fs::path& config_path, const fs::path& data_path,
            const std::string& output, bool force,
            const std::optional<std::uint64_t>& seed_flag) {
  const json config = load_json(config_path);
  const ModelSpec spec = parse_model(config);
  const std::uint64_t seed = require_seed(seed_flag, config);

  std::ifstream in(data_path);
  if (!in) throw ConfigError("cannot open data file: " + data_path.string());
  std::vector<double> data;
  double value;
  while (in >> value) data.push_back(value);
  if (data.empty()) throw ConfigError("data file holds no numbers");

  const ProprietyVerdict verdict = check_propriety(*spec.model, data);
  if (!verdict.proper && !force)
    throw ProprietyRefusedError(
        "posterior propriety not verified (rerun with --force to override)",
        verdict);

  const std::string prior_name =
      config.value("prior", std::string("wasserstein"));
  const PriorKind prior_kind = prior_kind_from_name(prior_name);
  PriorSpec prior;
  if (dynamic_cast<const SkewNormalModel*>(spec.model.get())) {
    prior = prior_kind == PriorKind::IndependenceJeffreys
                ? independence_jeffreys_sn()
                : independence_prior_sn();
  } else if (prior_kind == PriorKind::Flat) {
    prior = flat_prior(*spec.model);
  } else {
    prior = wasserstein_prior(*spec.model);
  }

  McmcConfig mcmc;
  if (config.contains("mcmc")) {
    const auto& m = config.at("mcmc");
    if (m.contains("iterations")) mcmc.iterations = m.at("iterations");
    if (m.contains("burnin")) mcmc.burnin = m.at("burnin");
    if (m.contains("thinning")) mcmc.thinning = m.at("thinning");
  }

  const MleResult mle = mle_fit(*spec.model, data, spec.params);
  auto log_post = make_log_posterior(*spec.model, prior, data);
  const std::vector<double> init =
      std::isfinite(log_post(mle.params)) ? mle.params : spec.params;
  const Chain chain = mcmc_sample(log_post, spec.model->positive_params(),
                                  init, mcmc, substream_seed(seed, 1));
  const PosteriorSummary summary = summarize(chain);

  json out;
  out["family"] = spec.model->name();
  out["prior"] = prior_kind_name(prior_kind);
  out["n"] = data.size();
  out["seed"] = seed;
  out["propriety"] = verdict_to_json(verdict);
  out["mle"] = {{"params", mle.params},
                {"log_likelihood", mle.log_lik},
                {"converged", mle.converged}};
  out["posterior"] = {{"mean", summary.mean},
                      {"sd", summary.sd},
                      {"cred_lo", summary.cred_lo},
                      {"cred_hi", summary.cred_hi},
                      {"kept_draws", chain.draws.size()},
                      {"accept_rate", chain.accept_rate}};
  out["parameters"] = spec.model->param_names();
  write_or_print(output, out.dump(2) + "\n");
  return kExitOk;
}

int cmd_simulate(const fs::path& config_path, const std::string& output,
                 const std::optional<std::uint64_t>& seed_flag, int threads,
                 bool verbose) {
  const json config = load_json(config_path);
  Scenario scenario;
  try {
    scenario = scenario_from_json(config);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario config: ") + e.what());
  }
  scenario.seed = require_seed(seed_flag, config);

  ProgressSink progress;
  if (verbose)
    progress = [](const std::string& msg) { std::cerr << msg << '\n'; };

  const ScenarioReport report = run_scenario(scenario, threads, progress);

  const fs::path base =
      resolve_output(output.empty() ? "wprior_report" : output);
  auto files = emit_report(report, ReportFormat::Csv, base);
  auto md = emit_report(report, ReportFormat::Markdown, base);
  files.insert(files.end(), md.begin(), md.end());
  if (!report.plots.empty()) {
    auto plots = emit_report(report, ReportFormat::PlotData, base);
    files.insert(files.end(), plots.begin(), plots.end());
  }

  // One summary line per (prior, n).
  std::string last_key;
  for (const auto& row : report.rows) {
    const std::string key = row.prior + "/" + std::to_string(row.n);
    if (key == last_key) continue;
    last_key = key;
    std::cout << "prior=" << row.prior << " n=" << row.n
              << " first-parameter mMean=" << row.m_mean
              << " coverage=" << row.coverage << '\n';
  }
  if (report.excluded_replicates > 0)
    std::cout << "excluded replicates: " << report.excluded_replicates << '\n';
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
  return kExitOk;
}

int cmd_report(const fs::path& input, const std::string& output,
               const std::string& format) {
  ScenarioReport report;
  try {
    report = parse_report_csv(input);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot parse report CSV: ") + e.what());
  }
  if (report.rows.empty()) throw ConfigError("report CSV holds no rows");
  ReportFormat fmt;
  if (format == "markdown")
    fmt = ReportFormat::Markdown;
  else if (format == "csv")
    fmt = ReportFormat::Csv;
  else
    throw ConfigError("report format must be \"csv\" or \"markdown\"");
  const fs::path base =
      resolve_output(output.empty() ? input.stem().string() : output);
  for (const auto& f : emit_report(report, fmt, base))
    std::cout << "wrote " << f.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein information matrices and Wasserstein priors"};
  app.require_subcommand(1);

  std::string config, output, data, input, format = "markdown";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool force = false, verbose = false;

  auto* wim = app.add_subcommand("wim", "compute a Wasserstein information matrix");
  wim->add_option("--config", config, "model spec JSON")->required();
  wim->add_option("--output", output, "output file (default: stdout)");

  auto* prior = app.add_subcommand(
      "prior", "tabulate skew-normal skewness priors on a grid");
  prior->add_option("--config", config, "grid spec JSON")->required();
  prior->add_option("--output", output, "output CSV (default: stdout)");

  auto* fit = app.add_subcommand("fit", "MLE + posterior fit of a dataset");
  fit->add_option("--config", config, "model/prior/mcmc spec JSON")->required();
  fit->add_option("--data", data, "data file, one number per line")->required();
  fit->add_option("--output", output, "output JSON (default: stdout)");
  fit->add_option("--seed", seed, "RNG seed (overrides config)");
  fit->add_flag("--force", force, "run even when propriety is not verified");

  auto* simulate = app.add_subcommand("simulate", "run a simulation scenario");
  simulate->add_option("--config", config, "scenario JSON")->required();
  simulate->add_option("--output", output, "report base path");
  simulate->add_option("--seed", seed, "RNG seed (overrides config)");
  simulate->add_option("--threads", threads, "worker cap (0 = default)");
  simulate->add_flag("--verbose", verbose, "per-replicate progress on stderr");

  auto* report = app.add_subcommand("report", "re-emit a report CSV");
  report->add_option("--input", input, "report CSV")->required();
  report->add_option("--output", output, "output base path");
  report->add_option("--format", format, "csv or markdown");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (wim->parsed()) return cmd_wim(config, output);
    if (prior->parsed()) return cmd_prior(config, output);
    if (fit->parsed()) return cmd_fit(config, data, output, force, seed);
    if (simulate->parsed())
      return cmd_simulate(config, output, seed, threads, verbose);
    if (report->parsed()) return cmd_report(input, output, format);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ProprietyRefusedError& e) {
    std::cerr << "propriety refusal: " << e.what() << '\n';
    for (const auto& c : e.verdict.conditions)
      std::cerr << "  [" << (c.satisfied ? "ok" : "FAIL") << "] " << c.name
                << " — " << c.detail << '\n';
    return kExitPropriety;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitConfig;
}
