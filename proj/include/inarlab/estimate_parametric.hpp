#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "inarlab/errors.hpp"
#include "inarlab/family.hpp"
#include "inarlab/likelihood.hpp"
#include "inarlab/model.hpp"
#include "inarlab/optimize.hpp"

namespace inarlab {

inline double sample_mean(const CountSeries& series) {
  double s = 0.0;
  for (int x : series.values()) s += static_cast<double>(x);
  return s / static_cast<double>(series.size());
}

/// Biased-denominator (1/n) sample autocovariance at the given lag.
inline double sample_autocovariance(const CountSeries& series, int lag) {
  const int n = series.size();
  if (lag < 0 || lag >= n) fail(Errc::invalid_argument, "lag out of range");
  const double m = sample_mean(series);
  double s = 0.0;
  for (int t = 0; t + lag < n; ++t)
    s += (static_cast<double>(series[t]) - m) * (static_cast<double>(series[t + lag]) - m);
  return s / static_cast<double>(n);
}

inline double sample_autocorrelation(const CountSeries& series, int lag) {
  const double c0 = sample_autocovariance(series, 0);
  if (!(c0 > 0.0)) fail(Errc::degenerate_series, "series has zero sample variance");
  return sample_autocovariance(series, lag) / c0;
}

enum class FitMethod { moments, ml };

inline const char* fit_method_name(FitMethod m) noexcept {
  return m == FitMethod::moments ? "moments" : "ml";
}

struct ParametricFit {
  InarCoefficients alpha_hat;
  ParametricFamily family_hat;
  std::optional<double> loglik;  ///< present iff method == ml
  FitMethod method = FitMethod::moments;
  int n_used = 0;                ///< series length consumed by the fit
};

namespace detail {

/// Innovation variance implied by the stationary INAR variance relations at
/// the given coefficients and sample moments (mean, lag-0/1 autocovariance).
inline double implied_innovation_variance(std::span<const double> alpha, double mean, double c0,
                                          double c1) {
  if (alpha.size() == 1) {
    const double a = alpha[0];
    return (1.0 - a * a) * c0 - a * (1.0 - a) * mean;
  }
  const double a1 = alpha[0], a2 = alpha[1];
  return (1.0 - a1 * a1 - a2 * a2) * c0 - 2.0 * a1 * a2 * c1 -
         (a1 * (1.0 - a1) + a2 * (1.0 - a2)) * mean;
}

inline ParametricFamily match_family_moments(FamilyKind kind, double mean, double variance) {
  if (!(mean > 0.0)) fail(Errc::estimate_out_of_range, "implied innovation mean is not positive");
  switch (kind) {
    case FamilyKind::poisson:
      return Poisson{mean};
    case FamilyKind::geometric:
      return Geometric{1.0 / (1.0 + mean)};
    case FamilyKind::negbin: {
      if (!(variance > mean))
        fail(Errc::overdispersion_required,
             "negbin innovations need implied variance above the mean");
      return NegBin{mean * mean / (variance - mean), mean / variance};
    }
  }
  fail(Errc::invalid_argument, "unknown family kind");
}

}  // namespace detail

/// Yule-Walker moment estimation: alpha from the lag-1/2 sample
/// autocorrelations, then the innovation family matched to the implied
/// innovation mean (and, for negbin, the implied innovation variance).
inline ParametricFit estimate_moments(const CountSeries& series, int order, FamilyKind family) {
  if (order != 1 && order != 2)
    fail(Errc::unsupported_order, "model order must be 1 or 2, got " + std::to_string(order));
  const int n = series.size();
  if (n < 10) fail(Errc::series_too_short, "moment estimation needs at least 10 observations");
  const double c0 = sample_autocovariance(series, 0);
  if (!(c0 > 0.0)) fail(Errc::degenerate_series, "series has zero sample variance");

  const double mean = sample_mean(series);
  const double rho1 = sample_autocovariance(series, 1) / c0;
  std::vector<double> alpha;
  if (order == 1) {
    alpha = {rho1};
  } else {
    const double rho2 = sample_autocovariance(series, 2) / c0;
    const double denom = 1.0 - rho1 * rho1;
    if (!(std::abs(denom) > 0.0))
      fail(Errc::estimate_out_of_range, "lag-1 autocorrelation of magnitude 1");
    alpha = {rho1 * (1.0 - rho2) / denom, (rho2 - rho1 * rho1) / denom};
  }
  for (double a : alpha)
    if (!(a > 0.0 && a < 1.0))
      fail(Errc::estimate_out_of_range,
           "moment estimate " + std::to_string(a) + " outside the open interval (0,1)");
  double alpha_sum = 0.0;
  for (double a : alpha) alpha_sum += a;
  if (!(alpha_sum < 1.0))
    fail(Errc::estimate_out_of_range, "moment estimates sum to " + std::to_string(alpha_sum));

  const double innov_mean = mean * (1.0 - alpha_sum);
  const double innov_var =
      detail::implied_innovation_variance(alpha, mean, c0, sample_autocovariance(series, 1));
  return ParametricFit{InarCoefficients(std::move(alpha)),
                       detail::match_family_moments(family, innov_mean, innov_var), std::nullopt,
                       FitMethod::moments, n};
}

namespace detail {

/// Start for ML when the moment estimator fails: alpha = 0.5/p per lag and
/// the family matched to the implied innovation mean at that alpha.
inline ParametricFit ml_fallback_start(const CountSeries& series, int order, FamilyKind kind) {
  std::vector<double> alpha(static_cast<std::size_t>(order), 0.5 / static_cast<double>(order));
  const double innov_mean = std::max(sample_mean(series) * 0.5, 0.1);
  ParametricFamily family = [&]() -> ParametricFamily {
    switch (kind) {
      case FamilyKind::poisson: return Poisson{innov_mean};
      case FamilyKind::geometric: return Geometric{1.0 / (1.0 + innov_mean)};
      case FamilyKind::negbin: return NegBin{innov_mean, 0.5};
    }
    fail(Errc::invalid_argument, "unknown family kind");
  }();
  return ParametricFit{InarCoefficients(std::move(alpha)), family, std::nullopt,
                       FitMethod::moments, series.size()};
}

inline std::vector<double> family_to_unconstrained(const ParametricFamily& family) {
  switch (family.kind()) {
    case FamilyKind::poisson: return {std::log(std::get<Poisson>(family.dist()).lambda)};
    case FamilyKind::geometric: return {logit(std::get<Geometric>(family.dist()).pi)};
    case FamilyKind::negbin: {
      const auto& nb = std::get<NegBin>(family.dist());
      return {std::log(nb.r), logit(nb.pi)};
    }
  }
  return {};
}

inline ParametricFamily family_from_unconstrained(FamilyKind kind, std::span<const double> theta) {
  switch (kind) {
    case FamilyKind::poisson: return Poisson{std::exp(theta[0])};
    case FamilyKind::geometric: return Geometric{logistic(theta[0])};
    case FamilyKind::negbin: return NegBin{std::exp(theta[0]), logistic(theta[1])};
  }
  fail(Errc::invalid_argument, "unknown family kind");
}

}  // namespace detail

/// Conditional maximum likelihood over (alpha, family parameters).
///
/// Coordinates are transformed so the search is unconstrained: alpha through
/// a componentwise logistic (non-stationary proposals rejected through the
/// -inf likelihood flag), open-interval probabilities through the logistic,
/// positive parameters through log. The family pmf entering each likelihood
/// evaluation is truncated at tail mass 1e-10 extended to max(series).
inline ParametricFit estimate_ml_parametric(const CountSeries& series, int order, FamilyKind family,
                                            const std::optional<ParametricFit>& init = {},
                                            const OptimizerSettings& settings = {}) {
  if (order != 1 && order != 2)
    fail(Errc::unsupported_order, "model order must be 1 or 2, got " + std::to_string(order));
  if (series.size() <= order)
    fail(Errc::series_too_short, "conditional likelihood needs more than p observations");

  ParametricFit start = [&] {
    if (init) return *init;
    try {
      return estimate_moments(series, order, family);
    } catch (const Error&) {
      return detail::ml_fallback_start(series, order, family);
    }
  }();

  LoglikEvaluator loglik(series, order);
  const int min_support = series.max_value();
  std::vector<double> alpha_scratch(static_cast<std::size_t>(order));
  const Objective objective = [&](std::span<const double> u) -> double {
    double alpha_sum = 0.0;
    for (int i = 0; i < order; ++i) {
      alpha_scratch[static_cast<std::size_t>(i)] = logistic(u[static_cast<std::size_t>(i)]);
      alpha_sum += alpha_scratch[static_cast<std::size_t>(i)];
    }
    if (!(alpha_sum < 1.0)) return kNegInf;
    try {
      const ParametricFamily cand =
          detail::family_from_unconstrained(family, u.subspan(static_cast<std::size_t>(order)));
      const InnovationPmf g = family_pmf_auto(cand, 1e-10, min_support);
      return loglik(alpha_scratch, g.probs());
    } catch (const Error&) {
      return kNegInf;  // degenerate proposals (overflowed parameters, lost mass)
    }
  };

  std::vector<double> u0;
  for (double a : start.alpha_hat.values()) u0.push_back(logit(a));
  for (double v : detail::family_to_unconstrained(start.family_hat)) u0.push_back(v);

  const OptimizeResult res = maximize(objective, std::move(u0), settings);
  if (!res.converged)
    fail(Errc::optimizer_failure, "conditional ML did not converge within the iteration budget");

  std::vector<double> alpha_hat;
  for (int i = 0; i < order; ++i) alpha_hat.push_back(logistic(res.x[static_cast<std::size_t>(i)]));
  const ParametricFamily family_hat = detail::family_from_unconstrained(
      family, std::span<const double>(res.x).subspan(static_cast<std::size_t>(order)));
  return ParametricFit{InarCoefficients(std::move(alpha_hat)), family_hat, res.value,
                       FitMethod::ml, series.size()};
}

}  // namespace inarlab
