#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "inarlab/errors.hpp"
#include "inarlab/estimate_parametric.hpp"
#include "inarlab/estimate_semiparametric.hpp"
#include "inarlab/model.hpp"
#include "inarlab/rng.hpp"
#include "inarlab/simulate.hpp"

namespace inarlab {

enum class BootstrapMode { parametric, semiparametric };
enum class EstimatorKind { moments, ml, semiparametric };

inline const char* estimator_kind_name(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::moments: return "moments";
    case EstimatorKind::ml: return "ml";
    case EstimatorKind::semiparametric: return "sp";
  }
  return "?";
}

struct BootstrapSpec {
  BootstrapMode mode = BootstrapMode::parametric;
  std::optional<FamilyKind> family;  ///< required for parametric mode
  double eta1 = 0.0;                 ///< semiparametric penalty weights
  double eta2 = 0.0;
  int replicates = 199;              ///< B
  std::uint64_t seed = 0;
  EstimatorKind estimator = EstimatorKind::ml;
  double level = 0.95;               ///< CI level in (0,1)

  void validate() const {
    if (replicates < 1) fail(Errc::invalid_spec, "replicate count B must be >= 1");
    if (!(level > 0.0 && level < 1.0)) fail(Errc::invalid_spec, "CI level must lie in (0,1)");
    if (!(eta1 >= 0.0) || !(eta2 >= 0.0)) fail(Errc::negative_penalty, "penalties must be >= 0");
    if (mode == BootstrapMode::parametric) {
      if (!family) fail(Errc::invalid_spec, "parametric mode needs an innovation family");
      if (estimator == EstimatorKind::semiparametric)
        fail(Errc::invalid_spec, "parametric mode pairs with the moments or ml estimator");
    } else if (estimator != EstimatorKind::semiparametric) {
      fail(Errc::invalid_spec, "semiparametric mode requires the semiparametric estimator");
    }
  }
};

struct ParameterCi {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
};

struct BootstrapResult {
  std::variant<ParametricFit, SemiparametricFit> point;
  std::vector<std::string> parameter_names;
  std::vector<double> point_values;
  std::vector<std::vector<double>> replicate_rows;  ///< converged replicates, replicate order
  std::vector<ParameterCi> intervals;
  int failed = 0;
  int requested = 0;
};

/// Empirical percentile interval at the given level: type-7 quantiles
/// (linear interpolation between order statistics) at (1-level)/2 and
/// 1-(1-level)/2.
inline std::pair<double, double> percentile_ci(std::span<const double> values, double level) {
  if (values.empty()) fail(Errc::empty_input, "cannot take quantiles of an empty sample");
  if (!(level > 0.0 && level < 1.0)) fail(Errc::invalid_argument, "level must lie in (0,1)");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto quantile = [&](double q) {
    const double h = q * static_cast<double>(sorted.size() - 1);
    const std::size_t i = static_cast<std::size_t>(std::floor(h));
    if (i + 1 >= sorted.size()) return sorted.back();
    return sorted[i] + (h - static_cast<double>(i)) * (sorted[i + 1] - sorted[i]);
  };
  const double half_tail = (1.0 - level) / 2.0;
  return {quantile(half_tail), quantile(1.0 - half_tail)};
}

namespace detail {

using AnyFit = std::variant<ParametricFit, SemiparametricFit>;

inline AnyFit run_estimator(const CountSeries& series, int order, const BootstrapSpec& spec) {
  switch (spec.estimator) {
    case EstimatorKind::moments: return estimate_moments(series, order, *spec.family);
    case EstimatorKind::ml: return estimate_ml_parametric(series, order, *spec.family);
    case EstimatorKind::semiparametric:
      return estimate_penalized(series, order, spec.eta1, spec.eta2);
  }
  fail(Errc::invalid_spec, "unknown estimator");
}

inline InarModel fitted_model(const AnyFit& fit) {
  if (const auto* par = std::get_if<ParametricFit>(&fit))
    return InarModel(par->alpha_hat, par->family_hat);
  const auto& sp = std::get<SemiparametricFit>(fit);
  return InarModel(sp.alpha_hat, sp.g_hat);
}

inline std::vector<std::string> fit_parameter_names(const AnyFit& fit) {
  std::vector<std::string> names;
  const auto add_alpha = [&](const InarCoefficients& alpha) {
    for (int i = 0; i < alpha.order(); ++i) names.push_back("alpha" + std::to_string(i + 1));
  };
  if (const auto* par = std::get_if<ParametricFit>(&fit)) {
    add_alpha(par->alpha_hat);
    for (const auto& pn : par->family_hat.parameter_names()) names.push_back(pn);
  } else {
    const auto& sp = std::get<SemiparametricFit>(fit);
    add_alpha(sp.alpha_hat);
    for (int k = 0; k <= sp.g_hat.support_max(); ++k) names.push_back("g" + std::to_string(k));
  }
  return names;
}

/// Flattens a fit to the fixed column layout of the point fit; semiparametric
/// pmfs are padded with zeros or truncated to the point support.
inline std::vector<double> flatten_fit(const AnyFit& fit, std::size_t columns) {
  std::vector<double> row;
  if (const auto* par = std::get_if<ParametricFit>(&fit)) {
    for (double a : par->alpha_hat.values()) row.push_back(a);
    for (double v : par->family_hat.parameters()) row.push_back(v);
  } else {
    const auto& sp = std::get<SemiparametricFit>(fit);
    for (double a : sp.alpha_hat.values()) row.push_back(a);
    for (double p : sp.g_hat.probs()) row.push_back(p);
  }
  row.resize(columns, 0.0);
  return row;
}

}  // namespace detail

/// Model-based INAR bootstrap: fit the chosen specification on the observed
/// series, simulate B replicate series of the same length from the fitted
/// model (replicate b seeded by split_seed(seed, b), burn-in 500), re-fit
/// each with the chosen estimator, and summarize the replicate estimates by
/// percentile intervals. Replicates whose estimation fails are counted and
/// excluded; more than B/2 failures abort. The result is a pure function of
/// (series, order, spec), independent of the thread count.
inline BootstrapResult inar_bootstrap(const CountSeries& series, int order,
                                      const BootstrapSpec& spec, int threads = 1) {
  spec.validate();
  if (threads < 1) fail(Errc::invalid_argument, "thread count must be >= 1");

  detail::AnyFit point = detail::run_estimator(series, order, spec);
  const InarModel model = detail::fitted_model(point);
  const std::vector<std::string> names = detail::fit_parameter_names(point);
  const std::vector<double> point_values = detail::flatten_fit(point, names.size());

  const int b_total = spec.replicates;
  std::vector<std::optional<std::vector<double>>> slots(static_cast<std::size_t>(b_total));
  const auto run_replicate = [&](int b) {
    const SimulationConfig cfg{series.size(), 500, split_seed(spec.seed, static_cast<std::uint64_t>(b + 1))};
    try {
      const CountSeries replicate = simulate_inar(model, cfg);
      const detail::AnyFit fit = detail::run_estimator(replicate, order, spec);
      slots[static_cast<std::size_t>(b)] = detail::flatten_fit(fit, names.size());
    } catch (const Error&) {
      slots[static_cast<std::size_t>(b)] = std::nullopt;
    }
  };

  if (threads == 1 || b_total == 1) {
    for (int b = 0; b < b_total; ++b) run_replicate(b);
  } else {
    std::atomic<int> next{0};
    const int workers = std::min(threads, b_total);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int b = next.fetch_add(1); b < b_total; b = next.fetch_add(1)) run_replicate(b);
      });
    for (auto& t : pool) t.join();
  }

  BootstrapResult out{std::move(point), names, point_values, {}, {}, 0, b_total};
  for (auto& slot : slots) {
    if (slot)
      out.replicate_rows.push_back(std::move(*slot));
    else
      ++out.failed;
  }
  if (out.failed * 2 > b_total)
    fail(Errc::too_many_failures, std::to_string(out.failed) + " of " + std::to_string(b_total) +
                                      " bootstrap replicates failed to converge");

  std::vector<double> column(out.replicate_rows.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    for (std::size_t r = 0; r < out.replicate_rows.size(); ++r) column[r] = out.replicate_rows[r][c];
    const auto [lo, hi] = percentile_ci(column, spec.level);
    out.intervals.push_back({names[c], lo, hi});
  }
  return out;
}

}  // namespace inarlab
