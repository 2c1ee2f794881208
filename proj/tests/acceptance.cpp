// Acceptance suite: one checkable criterion per number, each printing a
// single PASS/FAIL line. Run with no arguments for all criteria or with a
// list of criterion numbers.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "inarlab/inarlab.hpp"
#include "oracles.hpp"

using namespace inarlab;
namespace fs = std::filesystem;

namespace {

// ------------------------------------------------------------------ helpers

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double rmse(const std::vector<double>& errors) {
  double s = 0.0;
  for (double e : errors) s += e * e;
  return std::sqrt(s / static_cast<double>(errors.size()));
}

CountSeries poisson_inar1(double alpha, double lambda, int n, std::uint64_t seed) {
  return simulate_inar({InarCoefficients({alpha}), ParametricFamily(Poisson{lambda})},
                       {n, 500, seed});
}

std::vector<double> random_pmf(std::mt19937& rng, int cells) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::vector<double> g(static_cast<std::size_t>(cells));
  double total = 0.0;
  for (double& x : g) {
    x = unif(rng);
    total += x;
  }
  for (double& x : g) x /= total;
  return g;
}

struct RandomCase {
  std::vector<double> alpha;
  std::vector<double> g;
  std::vector<int> lags;
};

RandomCase random_case(std::mt19937& rng, int max_lag, int max_support) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RandomCase c;
  const int p = 1 + static_cast<int>(rng() % 2);
  if (p == 1) {
    c.alpha = {0.05 + 0.9 * unif(rng)};
  } else {
    const double a1 = 0.05 + 0.55 * unif(rng);
    c.alpha = {a1, 0.05 + (0.92 - a1 - 0.05) * unif(rng)};
  }
  c.g = random_pmf(rng, 1 + static_cast<int>(rng() % (max_support + 1)));
  c.lags.push_back(static_cast<int>(rng() % (max_lag + 1)));
  if (p == 2) c.lags.push_back(static_cast<int>(rng() % (max_lag + 1)));
  return c;
}

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(INARLAB_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {};
  std::string output;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, got);
  return {WEXITSTATUS(pclose(pipe)), output};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "inarlab_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Fixture for the exit-5 row of the taxonomy matrix (see criterion 10): the
// point fit succeeds with a small coefficient, but most replicate re-fits
// land outside (0,1).
constexpr const char* kFailureFixtureCsv = "x\n2\n0\n1\n0\n1\n2\n2\n2\n0\n0\n1\n0\n1\n1\n";
constexpr std::uint64_t kFailureFixtureSeed = 1;

#define EXPECT(cond, message)            \
  do {                                   \
    if (!(cond)) {                       \
      detail = (message);                \
      return false;                      \
    }                                    \
  } while (false)

// ---------------------------------------------------------------- criteria

// 200 randomized transitions match full thinning enumeration to 1e-12.
bool criterion1(std::string& detail) {
  std::mt19937 rng(4242);
  for (int rep = 0; rep < 200; ++rep) {
    const RandomCase c = random_case(rng, 10, 8);
    const InarCoefficients coeffs{c.alpha};
    const InnovationPmf pmf{c.g};
    const TransitionContext ctx{c.lags};
    int reach = pmf.support_max();
    for (int l : c.lags) reach += l;
    for (int k = 0; k <= reach; ++k) {
      const double expected = oracles::transition_pmf(c.alpha, c.g, k, c.lags);
      const double got = transition_pmf(coeffs, pmf, k, ctx);
      EXPECT(std::abs(got - expected) <= 1e-12,
             "case " + std::to_string(rep) + " k=" + std::to_string(k) + ": |" +
                 std::to_string(got) + " - " + std::to_string(expected) + "| > 1e-12");
    }
  }
  return true;
}

// Transition pmf sums to 1 within 1e-9 on 100 randomized (alpha, g, ctx).
bool criterion2(std::string& detail) {
  std::mt19937 rng(99991);
  for (int rep = 0; rep < 100; ++rep) {
    const RandomCase c = random_case(rng, 15, 10);
    const InarCoefficients coeffs{c.alpha};
    const InnovationPmf pmf{c.g};
    const TransitionContext ctx{c.lags};
    int reach = pmf.support_max();
    for (int l : c.lags) reach += l;
    double total = 0.0;
    for (int k = 0; k <= reach; ++k) total += transition_pmf(coeffs, pmf, k, ctx);
    EXPECT(std::abs(total - 1.0) <= 1e-9,
           "case " + std::to_string(rep) + ": sum " + std::to_string(total));
  }
  return true;
}

// INAR(1) alpha=0.5 Poisson(2) n=1e5: sample mean and lag-1 autocorrelation.
bool criterion3(std::string& detail) {
  const int n = 100000;
  const CountSeries series = poisson_inar1(0.5, 2.0, n, 424241);
  double mean = 0.0;
  for (int x : series.values()) mean += x;
  mean /= n;
  const double band = 3.0 * std::sqrt(8.0 / 3.0 / n);
  EXPECT(std::abs(mean - 4.0) < band,
         "sample mean " + std::to_string(mean) + " outside 4 +- " + std::to_string(band));

  double c0 = 0.0, c1 = 0.0;
  for (int t = 0; t < n; ++t) {
    const double d = series[t] - mean;
    c0 += d * d;
    if (t + 1 < n) c1 += d * (series[t + 1] - mean);
  }
  const double rho1 = c1 / c0;
  EXPECT(std::abs(rho1 - 0.5) < 0.02, "acf(1) " + std::to_string(rho1));
  return true;
}

// Yule-Walker RMSE halves (+-30%) from n=2000 to n=8000 over 50 replicates.
bool criterion4(std::string& detail) {
  std::vector<double> err_small, err_large;
  for (int rep = 0; rep < 50; ++rep) {
    const CountSeries small = poisson_inar1(0.5, 1.0, 2000, split_seed(1111, rep));
    const CountSeries large = poisson_inar1(0.5, 1.0, 8000, split_seed(2222, rep));
    err_small.push_back(estimate_moments(small, 1, FamilyKind::poisson).alpha_hat[0] - 0.5);
    err_large.push_back(estimate_moments(large, 1, FamilyKind::poisson).alpha_hat[0] - 0.5);
  }
  const double ratio = rmse(err_small) / rmse(err_large);
  EXPECT(ratio >= 1.4 && ratio <= 2.6, "RMSE ratio " + std::to_string(ratio));
  return true;
}

// Parametric ML on 20 replicates of n=5000 recovers (alpha, lambda) and
// never scores below its moment start.
bool criterion5(std::string& detail) {
  std::vector<double> alpha_err, lambda_err;
  for (int rep = 0; rep < 20; ++rep) {
    const CountSeries series = poisson_inar1(0.5, 2.0, 5000, split_seed(3333, rep));
    const ParametricFit moments = estimate_moments(series, 1, FamilyKind::poisson);
    const ParametricFit ml = estimate_ml_parametric(series, 1, FamilyKind::poisson);
    alpha_err.push_back(std::abs(ml.alpha_hat[0] - 0.5));
    lambda_err.push_back(std::abs(std::get<Poisson>(ml.family_hat.dist()).lambda - 2.0));

    const InnovationPmf g0 = family_pmf_auto(moments.family_hat, 1e-10, series.max_value());
    const double start_ll = conditional_loglik(moments.alpha_hat, g0, series);
    EXPECT(ml.loglik && *ml.loglik >= start_ll,
           "replicate " + std::to_string(rep) + ": ml " + std::to_string(*ml.loglik) +
               " below start " + std::to_string(start_ll));
  }
  EXPECT(median(alpha_err) <= 0.03, "median |alpha err| " + std::to_string(median(alpha_err)));
  EXPECT(median(lambda_err) <= 0.10, "median |lambda err| " + std::to_string(median(lambda_err)));
  return true;
}

// Semiparametric MLE: recovery across 20 seeds plus the tiny-instance
// exhaustive grid oracle.
bool criterion6(std::string& detail) {
  const ParametricFamily pois{Poisson{1.0}};
  std::vector<double> tv_dist, alpha_err;
  for (int rep = 0; rep < 20; ++rep) {
    const CountSeries series = poisson_inar1(0.5, 1.0, 5000, split_seed(4444, rep));
    const SemiparametricFit fit = estimate_semiparametric(series, 1);
    alpha_err.push_back(std::abs(fit.alpha_hat[0] - 0.5));
    double tv = 0.0;
    for (int k = 0; k <= fit.g_hat.support_max(); ++k) tv += std::abs(fit.g_hat(k) - pois.pmf(k));
    tv_dist.push_back(tv / 2.0);
  }
  EXPECT(median(tv_dist) <= 0.05, "median TV " + std::to_string(median(tv_dist)));
  EXPECT(median(alpha_err) <= 0.05, "median |alpha err| " + std::to_string(median(alpha_err)));

  const CountSeries tiny({1, 2, 1, 0, 0, 0});
  const SemiparametricFit fit = estimate_semiparametric(tiny, 1);
  double grid_best = -std::numeric_limits<double>::infinity();
  const std::vector<int> values(tiny.values().begin(), tiny.values().end());
  for (int ai = 1; ai <= 99; ++ai) {
    const std::vector<double> alpha{ai * 0.01};
    for (int g0 = 0; g0 <= 50; ++g0)
      for (int g1 = 0; g1 + g0 <= 50; ++g1) {
        const std::vector<double> g{g0 * 0.02, g1 * 0.02, (50 - g0 - g1) * 0.02};
        grid_best = std::max(grid_best, oracles::conditional_loglik(alpha, g, values));
      }
  }
  EXPECT(std::abs(fit.loglik - grid_best) <= 1e-4,
         "tiny instance: fit " + std::to_string(fit.loglik) + " vs grid " +
             std::to_string(grid_best));
  return true;
}

// Penalization identities: zero-penalty reduction, uniform limit, and
// roughness monotonicity in each penalty weight.
bool criterion7(std::string& detail) {
  const CountSeries series = poisson_inar1(0.5, 1.0, 300, 5555);

  const SemiparametricFit plain = estimate_semiparametric(series, 1);
  const SemiparametricFit zero = estimate_penalized(series, 1, 0.0, 0.0);
  EXPECT(std::abs(plain.loglik - zero.loglik) <= 1e-6,
         "zero-penalty gap " + std::to_string(std::abs(plain.loglik - zero.loglik)));

  const SemiparametricFit flat = estimate_penalized(series, 1, 1e6, 0.0);
  const double uniform = 1.0 / (flat.g_hat.support_max() + 1);
  double tv = 0.0;
  for (double p : flat.g_hat.probs()) tv += std::abs(p - uniform);
  EXPECT(tv / 2.0 <= 0.01, "uniform TV " + std::to_string(tv / 2.0));

  const CountSeries rough_series = poisson_inar1(0.5, 1.0, 100, 6565);
  const SemiparametricFit base = estimate_penalized(rough_series, 1, 0.0, 0.0);
  const SemiparametricInit init{
      {base.alpha_hat.values().begin(), base.alpha_hat.values().end()},
      {base.g_hat.probs().begin(), base.g_hat.probs().end()}};
  double prev1 = roughness_first(base.g_hat.probs());
  for (double eta1 : {0.1, 1.0, 10.0, 100.0}) {
    const SemiparametricFit fit = estimate_penalized(rough_series, 1, eta1, 0.0, init);
    const double r = roughness_first(fit.g_hat.probs());
    EXPECT(r <= prev1 + 1e-6, "first-difference roughness rose at eta1=" + std::to_string(eta1));
    prev1 = r;
  }
  double prev2 = roughness_second(base.g_hat.probs());
  for (double eta2 : {0.1, 1.0, 10.0, 100.0}) {
    const SemiparametricFit fit = estimate_penalized(rough_series, 1, 0.0, eta2, init);
    const double r = roughness_second(fit.g_hat.probs());
    EXPECT(r <= prev2 + 1e-6, "second-difference roughness rose at eta2=" + std::to_string(eta2));
    prev2 = r;
  }
  return true;
}

// Validation: the returned pair attains the table argmax; constructed ties
// break toward the smaller penalty; the selected tail score dominates (0,0).
bool criterion8(std::string& detail) {
  const CountSeries series = poisson_inar1(0.5, 1.0, 500, 7777);
  const PenaltyGrid grid{{0.0, 0.1, 1.0, 10.0}, {0.0, 0.1, 1.0, 10.0}, 0.8};
  const PenaltyValidation v = validate_penalization(series, 1, grid);
  EXPECT(v.scores.size() == 16, "table size " + std::to_string(v.scores.size()));

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : v.scores) best = std::max(best, s.score);
  double returned = -std::numeric_limits<double>::infinity();
  double zero_score = -std::numeric_limits<double>::infinity();
  for (const auto& s : v.scores) {
    if (s.eta1 == v.eta1 && s.eta2 == v.eta2) returned = s.score;
    if (s.eta1 == 0.0 && s.eta2 == 0.0) zero_score = s.score;
  }
  EXPECT(returned == best, "returned pair does not attain the argmax");
  EXPECT(returned >= zero_score, "selected score below the (0,0) score");

  // Constructed tie: two-cell support kills the second-difference penalty,
  // so all eta2 candidates score identically and the smaller must win.
  std::vector<int> values;
  for (int t = 0; t < 120; ++t) values.push_back((t * 7 % 13) < 6 ? 1 : 0);
  const CountSeries binary{values};
  EXPECT(binary.max_value() == 1, "tie fixture must have max 1");
  const PenaltyValidation tie = validate_penalization(binary, 1, {{0.0}, {5.0, 0.0, 2.0}, 0.8});
  EXPECT(tie.scores[0].score == tie.scores[1].score && tie.scores[1].score == tie.scores[2].score,
         "tie fixture did not tie");
  EXPECT(tie.eta2 == 0.0, "tie broke toward eta2=" + std::to_string(tie.eta2));
  return true;
}

// Semiparametric bootstrap coverage of alpha over 100 outer replicates, plus
// determinism across thread counts.
bool criterion9(std::string& detail) {
  BootstrapSpec spec;
  spec.mode = BootstrapMode::semiparametric;
  spec.estimator = EstimatorKind::semiparametric;
  spec.replicates = 199;
  spec.level = 0.95;

  int covered = 0, outer = 100;
  for (int i = 0; i < outer; ++i) {
    const CountSeries series = poisson_inar1(0.5, 1.0, 500, split_seed(8888, i));
    spec.seed = split_seed(9999, i);
    const BootstrapResult result = inar_bootstrap(series, 1, spec, 1);
    const auto& ci = result.intervals[0];  // alpha1
    if (ci.lo <= 0.5 && 0.5 <= ci.hi) ++covered;
  }
  const double coverage = covered / static_cast<double>(outer);
  EXPECT(coverage >= 0.85 && coverage <= 0.99, "coverage " + std::to_string(coverage));

  const CountSeries series = poisson_inar1(0.5, 1.0, 500, 31415);
  spec.seed = 2718;
  const BootstrapResult serial = inar_bootstrap(series, 1, spec, 1);
  const BootstrapResult threaded = inar_bootstrap(series, 1, spec, 3);
  EXPECT(serial.replicate_rows.size() == threaded.replicate_rows.size(),
         "row count differs across thread counts");
  for (std::size_t r = 0; r < serial.replicate_rows.size(); ++r)
    for (std::size_t c = 0; c < serial.replicate_rows[r].size(); ++c)
      EXPECT(serial.replicate_rows[r][c] == threaded.replicate_rows[r][c],
             "replicate matrix differs across thread counts");
  return true;
}

// CLI pipeline determinism plus the exit-code taxonomy matrix.
bool criterion10(std::string& detail) {
  const fs::path dir = work_dir();
  const fs::path data = dir / "pipeline.csv";
  const std::string simulate_cmd =
      "simulate --p 1 --alpha 0.5 --family poisson:2 --n 1000 --seed 7 --out " + data.string();

  std::vector<std::string> first;
  for (int round = 0; round < 2; ++round) {
    EXPECT(run_cli(simulate_cmd).exit_code == 0, "simulate failed");
    const fs::path fit_ml = dir / "fit_ml.json";
    const fs::path fit_sp = dir / "fit_sp.json";
    const fs::path boot = dir / "boot.json";
    EXPECT(run_cli("fit --in " + data.string() + " --p 1 --method ml --family poisson --out " +
                   fit_ml.string())
                   .exit_code == 0,
           "fit ml failed");
    EXPECT(run_cli("fit --in " + data.string() + " --p 1 --method sp --out " + fit_sp.string())
                   .exit_code == 0,
           "fit sp failed");
    EXPECT(run_cli("boot --in " + data.string() +
                   " --p 1 --mode param:poisson --B 19 --seed 99 --threads 2 --out " +
                   boot.string())
                   .exit_code == 0,
           "boot failed");
    const std::vector<std::string> bytes{slurp(data), slurp(fit_ml), slurp(fit_sp), slurp(boot)};
    if (round == 0) {
      first = bytes;
      for (const fs::path& p : {data, fit_ml, fit_sp, boot}) fs::remove(p);
    } else {
      EXPECT(first == bytes, "pipeline outputs differ between runs");
    }
  }

  // Exit-code matrix: 2 flags, 3 data/model, 4 estimation, 5 bootstrap.
  EXPECT(run_cli("fit --in " + data.string() + " --p 1 --method ml").exit_code == 2,
         "missing --family should exit 2");
  EXPECT(run_cli("simulate --p 2 --alpha 0.7,0.4 --family poisson:1 --n 10 --seed 1").exit_code ==
             3,
         "nonstationary alpha should exit 3");
  const fs::path bad = dir / "bad.csv";
  std::ofstream(bad) << "x\n1\n-2\n";
  EXPECT(run_cli("fit --in " + bad.string() + " --p 1 --method sp").exit_code == 3,
         "negative count should exit 3");
  const fs::path constant = dir / "constant.csv";
  {
    std::ofstream c(constant);
    c << "x\n";
    for (int i = 0; i < 12; ++i) c << "2\n";
  }
  EXPECT(run_cli("fit --in " + constant.string() + " --p 1 --method moments --family poisson")
                 .exit_code == 4,
         "degenerate series should exit 4");

  // Near-white noise with a barely positive lag-1 autocorrelation: the
  // moment re-fits on most replicates land outside (0,1), tripping the
  // failure cap. Frozen after checking the seed deterministically fails.
  const fs::path failures = dir / "failures.csv";
  std::ofstream(failures) << kFailureFixtureCsv;
  const RunResult too_many =
      run_cli("boot --in " + failures.string() +
              " --p 1 --mode param:poisson --estimator moments --B 5 --seed " +
              std::to_string(kFailureFixtureSeed) + " --threads 1");
  EXPECT(too_many.exit_code == 5,
         "bootstrap failure cascade should exit 5, got " + std::to_string(too_many.exit_code));
  return true;
}

using Criterion = std::function<bool(std::string&)>;

struct Entry {
  int number;
  const char* description;
  Criterion fn;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Entry> criteria{
      {1, "transition pmf matches full thinning enumeration (1e-12)", criterion1},
      {2, "transition pmf normalizes to 1 (1e-9)", criterion2},
      {3, "simulation reproduces stationary mean and acf", criterion3},
      {4, "Yule-Walker RMSE scales as 1/sqrt(n)", criterion4},
      {5, "parametric ML recovery and dominance over its start", criterion5},
      {6, "semiparametric recovery and tiny-instance grid oracle", criterion6},
      {7, "penalization identities and roughness monotonicity", criterion7},
      {8, "penalty validation argmax and tie-breaking", criterion8},
      {9, "semiparametric bootstrap coverage and determinism", criterion9},
      {10, "CLI pipeline determinism and exit-code taxonomy", criterion10},
  };

  std::vector<int> requested;
  for (int i = 1; i < argc; ++i) requested.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const Entry& entry : criteria) {
    if (!requested.empty() &&
        std::find(requested.begin(), requested.end(), entry.number) == requested.end())
      continue;
    std::string detail;
    bool ok = false;
    try {
      ok = entry.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (ok) {
      std::cout << "PASS " << entry.number << ": " << entry.description << "\n";
    } else {
      std::cout << "FAIL " << entry.number << ": " << entry.description << " -- " << detail
                << "\n";
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}
