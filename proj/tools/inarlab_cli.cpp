// inarlab command-line front end: simulate | fit | boot.
//
// Exit codes: 0 success, 2 flag validation, 3 data/model validation,
// 4 estimation failure, 5 bootstrap failure rate above one half.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "inarlab/inarlab.hpp"

namespace {

using inarlab::Errc;
using inarlab::Error;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kSchemaVersion = "1";

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::csv_parse:
    case Errc::invalid_pmf:
    case Errc::non_stationary:
    case Errc::coefficient_out_of_range:
    case Errc::unsupported_order:
    case Errc::invalid_family_parameter:
    case Errc::truncation_loss:
    case Errc::invalid_argument:
      return 3;
    case Errc::too_many_failures:
      return 5;
    default:
      return 4;
  }
}

std::string fmt_double(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "'" + item + "' is not a number");
    }
  }
  if (out.empty()) throw CLI::ValidationError(flag, "expected a comma-separated list");
  return out;
}

inarlab::ParametricFamily parse_family_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw CLI::ValidationError("--family", "expected name:params, e.g. poisson:2");
  const std::string name = text.substr(0, colon);
  const std::vector<double> params = parse_double_list(text.substr(colon + 1), "--family");
  if (name == "poisson" && params.size() == 1) return inarlab::Poisson{params[0]};
  if (name == "geometric" && params.size() == 1) return inarlab::Geometric{params[0]};
  if (name == "negbin" && params.size() == 2) return inarlab::NegBin{params[0], params[1]};
  throw CLI::ValidationError(
      "--family", "expected poisson:<lambda>, geometric:<pi>, or negbin:<r>,<pi>");
}

inarlab::FamilyKind parse_family_kind(const std::string& name) {
  if (name == "poisson") return inarlab::FamilyKind::poisson;
  if (name == "geometric") return inarlab::FamilyKind::geometric;
  if (name == "negbin") return inarlab::FamilyKind::negbin;
  throw CLI::ValidationError("--family", "expected poisson, geometric, or negbin");
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("INARLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

ordered_json family_json(const inarlab::ParametricFamily& family) {
  ordered_json params;
  const auto names = family.parameter_names();
  const auto values = family.parameters();
  for (std::size_t i = 0; i < names.size(); ++i) params[names[i]] = values[i];
  return ordered_json{{"name", family.name()}, {"params", params}};
}

ordered_json manifest_json(const std::string& command, const ordered_json& params,
                           std::optional<std::uint64_t> seed,
                           const std::optional<std::string>& input_path) {
  ordered_json m;
  m["command"] = command;
  m["library_version"] = inarlab::kVersion;
  if (seed)
    m["seed"] = *seed;
  else
    m["seed"] = nullptr;
  if (input_path)
    m["input_checksum"] = inarlab::file_checksum(*input_path);
  else
    m["input_checksum"] = nullptr;
  m["params"] = params;
  return m;
}

void emit_manifest_stderr(ordered_json manifest, std::chrono::steady_clock::time_point started) {
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  manifest["duration_ms"] = elapsed.count();
  std::cerr << manifest.dump() << "\n";
}

void write_report(const std::string& out_path, const ordered_json& report) {
  if (out_path.empty() || out_path == "-") {
    std::cout << report.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) inarlab::fail(Errc::invalid_argument, "cannot write '" + out_path + "'");
  out << report.dump(2) << "\n";
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  int p = 1;
  std::string alpha_text;
  std::string family_text;
  std::string pmf_text;
  int n = 0;
  int burn_in = 500;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string manifest_path;
};

int run_simulate(const SimulateArgs& args) {
  const auto started = std::chrono::steady_clock::now();
  const std::vector<double> alpha = parse_double_list(args.alpha_text, "--alpha");
  if (static_cast<int>(alpha.size()) != args.p)
    throw CLI::ValidationError("--alpha", "expected exactly " + std::to_string(args.p) +
                                               " coefficients for --p " + std::to_string(args.p));

  inarlab::InarCoefficients coeffs{alpha};
  inarlab::InarModel model = [&] {
    if (!args.family_text.empty())
      return inarlab::InarModel(coeffs, parse_family_spec(args.family_text));
    return inarlab::InarModel(
        coeffs, inarlab::InnovationPmf(parse_double_list(args.pmf_text, "--pmf")));
  }();

  const inarlab::SimulationConfig config{args.n, args.burn_in, args.seed};
  const inarlab::CountSeries series = inarlab::simulate_inar(model, config);

  if (args.out_path.empty() || args.out_path == "-")
    inarlab::write_count_csv(std::cout, series);
  else
    inarlab::write_count_csv(args.out_path, series);

  ordered_json params;
  params["p"] = args.p;
  params["alpha"] = alpha;
  if (!args.family_text.empty())
    params["family"] = args.family_text;
  else
    params["pmf"] = parse_double_list(args.pmf_text, "--pmf");
  params["n"] = args.n;
  params["burn_in"] = args.burn_in;
  params["seed"] = args.seed;
  params["out"] = args.out_path.empty() ? "-" : args.out_path;

  ordered_json manifest = manifest_json("simulate", params, args.seed, std::nullopt);
  if (!args.manifest_path.empty()) {
    std::ofstream mf(args.manifest_path, std::ios::binary);
    if (!mf) inarlab::fail(Errc::invalid_argument, "cannot write '" + args.manifest_path + "'");
    mf << manifest.dump(2) << "\n";
  }
  emit_manifest_stderr(manifest, started);
  return 0;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string in_path;
  int p = 1;
  std::string method;
  std::string family;
  double eta1 = -1.0;  // sentinel: not given
  double eta2 = -1.0;
  bool validate = false;
  std::string eta_grid_text;
  double split_fraction = 0.8;
  std::string out_path;
};

ordered_json parametric_fit_json(const inarlab::ParametricFit& fit) {
  ordered_json r;
  r["method"] = inarlab::fit_method_name(fit.method);
  r["alpha_hat"] = std::vector<double>(fit.alpha_hat.values().begin(), fit.alpha_hat.values().end());
  r["family"] = family_json(fit.family_hat);
  if (fit.loglik)
    r["loglik"] = *fit.loglik;
  else
    r["loglik"] = nullptr;
  if (fit.method == inarlab::FitMethod::ml) r["converged"] = true;
  r["n_used"] = fit.n_used;
  return r;
}

ordered_json semiparametric_fit_json(const inarlab::SemiparametricFit& fit, bool penalized) {
  ordered_json r;
  r["method"] = penalized ? "sp-penal" : "sp";
  r["alpha_hat"] = std::vector<double>(fit.alpha_hat.values().begin(), fit.alpha_hat.values().end());
  r["g_hat"] = std::vector<double>(fit.g_hat.probs().begin(), fit.g_hat.probs().end());
  r["support_max"] = fit.g_hat.support_max();
  r["loglik"] = fit.loglik;
  r["eta1"] = fit.eta1;
  r["eta2"] = fit.eta2;
  r["converged"] = fit.converged;
  r["iterations"] = fit.iterations;
  return r;
}

int run_fit(const FitArgs& args) {
  const auto started = std::chrono::steady_clock::now();
  const bool parametric = args.method == "moments" || args.method == "ml";
  if (parametric && args.family.empty())
    throw CLI::ValidationError("--family", "required for parametric methods");
  if (args.method == "sp-penal") {
    const bool explicit_etas = args.eta1 >= 0.0 && args.eta2 >= 0.0;
    if (args.validate && args.eta_grid_text.empty())
      throw CLI::ValidationError("--eta-grid", "required with --validate");
    if (!args.validate && !explicit_etas)
      throw CLI::ValidationError("--eta1", "sp-penal needs --eta1/--eta2 or --validate");
  }

  const inarlab::CountSeries series = inarlab::read_count_csv(args.in_path);

  ordered_json params;
  params["in"] = args.in_path;
  params["p"] = args.p;
  params["method"] = args.method;
  if (!args.family.empty()) params["family"] = args.family;

  ordered_json results;
  if (parametric) {
    const inarlab::FamilyKind kind = parse_family_kind(args.family);
    const inarlab::ParametricFit fit =
        args.method == "moments" ? inarlab::estimate_moments(series, args.p, kind)
                                 : inarlab::estimate_ml_parametric(series, args.p, kind);
    results = parametric_fit_json(fit);
  } else if (args.method == "sp") {
    results = semiparametric_fit_json(inarlab::estimate_semiparametric(series, args.p), false);
  } else {  // sp-penal
    if (args.validate) {
      const std::vector<double> grid_values = parse_double_list(args.eta_grid_text, "--eta-grid");
      inarlab::PenaltyGrid grid{grid_values, grid_values, args.split_fraction};
      const inarlab::PenaltyValidation validation =
          inarlab::validate_penalization(series, args.p, grid);
      const inarlab::SemiparametricFit fit =
          inarlab::estimate_penalized(series, args.p, validation.eta1, validation.eta2);
      results = semiparametric_fit_json(fit, true);
      ordered_json scores = ordered_json::array();
      for (const auto& s : validation.scores)
        scores.push_back({{"eta1", s.eta1}, {"eta2", s.eta2}, {"score", s.score}});
      results["validation"] = {{"selected", {{"eta1", validation.eta1}, {"eta2", validation.eta2}}},
                               {"split_fraction", args.split_fraction},
                               {"scores", scores}};
      params["eta_grid"] = grid_values;
      params["split_fraction"] = args.split_fraction;
      params["validate"] = true;
    } else {
      results = semiparametric_fit_json(
          inarlab::estimate_penalized(series, args.p, args.eta1, args.eta2), true);
      params["eta1"] = args.eta1;
      params["eta2"] = args.eta2;
    }
  }
  params["out"] = args.out_path.empty() ? "-" : args.out_path;

  ordered_json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = "fit";
  report["params"] = params;
  report["results"] = results;
  report["manifest"] = manifest_json("fit", params, std::nullopt, args.in_path);
  write_report(args.out_path, report);
  emit_manifest_stderr(report["manifest"], started);
  return 0;
}

// -------------------------------------------------------------------- boot

struct BootArgs {
  std::string in_path;
  int p = 1;
  std::string mode;
  std::string estimator;
  int replicates = 199;
  double level = 0.95;
  std::uint64_t seed = 0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  std::string out_path;
  std::string replicates_path;
  int threads = 0;
};

int run_boot(const BootArgs& args) {
  const auto started = std::chrono::steady_clock::now();
  inarlab::BootstrapSpec spec;
  spec.replicates = args.replicates;
  spec.seed = args.seed;
  spec.level = args.level;
  spec.eta1 = args.eta1;
  spec.eta2 = args.eta2;

  if (args.mode == "sp") {
    spec.mode = inarlab::BootstrapMode::semiparametric;
    spec.estimator = inarlab::EstimatorKind::semiparametric;
    if (!args.estimator.empty() && args.estimator != "sp")
      throw CLI::ValidationError("--estimator", "sp mode requires the sp estimator");
  } else if (args.mode.rfind("param:", 0) == 0) {
    spec.mode = inarlab::BootstrapMode::parametric;
    spec.family = parse_family_kind(args.mode.substr(6));
    spec.estimator = inarlab::EstimatorKind::ml;
    if (!args.estimator.empty()) {
      if (args.estimator == "moments")
        spec.estimator = inarlab::EstimatorKind::moments;
      else if (args.estimator == "ml")
        spec.estimator = inarlab::EstimatorKind::ml;
      else
        throw CLI::ValidationError("--estimator", "param mode pairs with moments or ml");
    }
  } else {
    throw CLI::ValidationError("--mode", "expected param:<family> or sp");
  }

  const int threads = resolve_threads(args.threads);
  const inarlab::CountSeries series = inarlab::read_count_csv(args.in_path);
  const inarlab::BootstrapResult result = inarlab::inar_bootstrap(series, args.p, spec, threads);

  if (!args.replicates_path.empty()) {
    std::ofstream reps(args.replicates_path, std::ios::binary);
    if (!reps)
      inarlab::fail(Errc::invalid_argument, "cannot write '" + args.replicates_path + "'");
    for (std::size_t c = 0; c < result.parameter_names.size(); ++c)
      reps << (c ? "," : "") << result.parameter_names[c];
    reps << "\n";
    for (const auto& row : result.replicate_rows) {
      for (std::size_t c = 0; c < row.size(); ++c) reps << (c ? "," : "") << fmt_double(row[c]);
      reps << "\n";
    }
  }

  ordered_json params;
  params["in"] = args.in_path;
  params["p"] = args.p;
  params["mode"] = args.mode;
  params["estimator"] = inarlab::estimator_kind_name(spec.estimator);
  params["B"] = args.replicates;
  params["level"] = args.level;
  params["seed"] = args.seed;
  if (spec.mode == inarlab::BootstrapMode::semiparametric) {
    params["eta1"] = args.eta1;
    params["eta2"] = args.eta2;
  }
  params["threads"] = threads;
  params["out"] = args.out_path.empty() ? "-" : args.out_path;
  if (!args.replicates_path.empty()) params["replicates"] = args.replicates_path;

  ordered_json point;
  if (const auto* par = std::get_if<inarlab::ParametricFit>(&result.point))
    point = parametric_fit_json(*par);
  else
    point = semiparametric_fit_json(std::get<inarlab::SemiparametricFit>(result.point),
                                    spec.eta1 > 0.0 || spec.eta2 > 0.0);

  ordered_json intervals = ordered_json::array();
  for (const auto& ci : result.intervals)
    intervals.push_back({{"name", ci.name}, {"lo", ci.lo}, {"hi", ci.hi}});

  ordered_json results;
  results["point"] = point;
  results["intervals"] = intervals;
  results["B"] = result.requested;
  results["failed"] = result.failed;
  results["level"] = args.level;

  ordered_json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = "boot";
  report["params"] = params;
  report["results"] = results;
  report["manifest"] = manifest_json("boot", params, args.seed, args.in_path);
  write_report(args.out_path, report);
  emit_manifest_stderr(report["manifest"], started);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inarlab: INAR(p) count time series toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "simulate an INAR(p) series to CSV");
  simulate->add_option("--p", sim.p, "model order")->required()->check(CLI::Range(1, 2));
  simulate->add_option("--alpha", sim.alpha_text, "comma-separated coefficients")->required();
  auto* fam_opt = simulate->add_option("--family", sim.family_text,
                                       "parametric innovations, e.g. poisson:2");
  auto* pmf_opt = simulate->add_option("--pmf", sim.pmf_text, "explicit innovation pmf");
  fam_opt->excludes(pmf_opt);
  pmf_opt->excludes(fam_opt);
  simulate->add_option("--n", sim.n, "series length")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--burn-in", sim.burn_in, "discarded prefix length")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", sim.seed, "RNG seed")->required();
  simulate->add_option("--out", sim.out_path, "output CSV path (default stdout)");
  simulate->add_option("--manifest", sim.manifest_path, "write the run manifest to this path");

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "estimate an INAR(p) model from CSV");
  fit_cmd->add_option("--in", fit.in_path, "input CSV path")->required();
  fit_cmd->add_option("--p", fit.p, "model order")->required()->check(CLI::Range(1, 2));
  fit_cmd->add_option("--method", fit.method, "moments | ml | sp | sp-penal")
      ->required()
      ->check(CLI::IsMember({"moments", "ml", "sp", "sp-penal"}));
  fit_cmd->add_option("--family", fit.family, "poisson | geometric | negbin");
  fit_cmd->add_option("--eta1", fit.eta1, "first-difference penalty weight")
      ->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--eta2", fit.eta2, "second-difference penalty weight")
      ->check(CLI::NonNegativeNumber);
  fit_cmd->add_flag("--validate", fit.validate, "choose penalties on a temporal split");
  fit_cmd->add_option("--eta-grid", fit.eta_grid_text, "comma list used for both penalty axes");
  fit_cmd->add_option("--split-fraction", fit.split_fraction, "training fraction")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  fit_cmd->add_option("--out", fit.out_path, "report path (default stdout)");

  BootArgs boot;
  CLI::App* boot_cmd = app.add_subcommand("boot", "model-based bootstrap from CSV");
  boot_cmd->add_option("--in", boot.in_path, "input CSV path")->required();
  boot_cmd->add_option("--p", boot.p, "model order")->required()->check(CLI::Range(1, 2));
  boot_cmd->add_option("--mode", boot.mode, "param:<family> | sp")->required();
  boot_cmd->add_option("--estimator", boot.estimator, "moments | ml | sp (default by mode)");
  boot_cmd->add_option("--B", boot.replicates, "replicate count")
      ->required()
      ->check(CLI::PositiveNumber);
  boot_cmd->add_option("--level", boot.level, "CI level")->capture_default_str()
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  boot_cmd->add_option("--seed", boot.seed, "RNG seed")->required();
  boot_cmd->add_option("--eta1", boot.eta1, "sp-mode first-difference penalty")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  boot_cmd->add_option("--eta2", boot.eta2, "sp-mode second-difference penalty")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  boot_cmd->add_option("--out", boot.out_path, "report path (default stdout)");
  boot_cmd->add_option("--replicates", boot.replicates_path, "dump replicate estimates as CSV");
  boot_cmd->add_option("--threads", boot.threads,
                       "worker threads (default: INARLAB_THREADS or all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (fit_cmd->parsed()) return run_fit(fit);
    if (boot_cmd->parsed()) return run_boot(boot);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
