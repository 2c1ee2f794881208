#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "inarlab/errors.hpp"
#include "inarlab/estimate_parametric.hpp"
#include "inarlab/likelihood.hpp"
#include "inarlab/model.hpp"
#include "inarlab/optimize.hpp"
#include "inarlab/pmf.hpp"

namespace inarlab {

/// Joint fit of the coefficients and a fully nonparametric innovation pmf on
/// {0,...,max(series)}.
struct SemiparametricFit {
  InarCoefficients alpha_hat;
  InnovationPmf g_hat;
  double loglik = 0.0;   ///< conditional log-likelihood at the fit (penalty excluded)
  double eta1 = 0.0;
  double eta2 = 0.0;
  bool converged = false;
  int iterations = 0;    ///< block sweeps performed
};

/// Optional warm start: alpha of length p, g of length max(series)+1.
struct SemiparametricInit {
  std::vector<double> alpha;
  std::vector<double> g;
};

/// Sum of squared first differences of the pmf.
inline double roughness_first(std::span<const double> g) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    const double d = g[k + 1] - g[k];
    s += d * d;
  }
  return s;
}

/// Sum of squared second differences of the pmf.
inline double roughness_second(std::span<const double> g) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k + 2 < g.size(); ++k) {
    const double d = g[k + 2] - 2.0 * g[k + 1] + g[k];
    s += d * d;
  }
  return s;
}

namespace detail {

inline std::vector<double> empirical_shrunk_start(const CountSeries& series, int support_max) {
  std::vector<double> g(static_cast<std::size_t>(support_max) + 1, 0.0);
  const double w = 1.0 / static_cast<double>(series.size());
  for (int x : series.values()) g[static_cast<std::size_t>(x)] += w;
  // Shrink toward uniform so no start cell sits at zero log-odds boundary.
  const double u = 1.0 / static_cast<double>(support_max + 1);
  for (double& p : g) p = 0.9 * p + 0.1 * u;
  return g;
}

inline std::vector<double> semiparametric_alpha_start(const CountSeries& series, int order) {
  try {
    const ParametricFit fit = estimate_moments(series, order, FamilyKind::poisson);
    return {fit.alpha_hat.values().begin(), fit.alpha_hat.values().end()};
  } catch (const Error&) {
    return std::vector<double>(static_cast<std::size_t>(order), 0.5 / static_cast<double>(order));
  }
}

}  // namespace detail

/// Roughness-penalized semiparametric conditional ML.
///
/// Maximizes loglik(alpha, g) - n * (eta1 * sum (dg)^2 + eta2 * sum (d2g)^2)
/// jointly over alpha (open stationarity region, componentwise logistic with
/// rejection of sum >= 1) and g (probability simplex on {0,...,max(series)}
/// through the pinned normalized-exponential map). Optimization alternates
/// an alpha block and a g block until the objective moves less than 1e-8
/// between sweeps (at most 200); a joint full-dimensional search takes over
/// when the sweeps stall.
inline SemiparametricFit estimate_penalized(const CountSeries& series, int order, double eta1,
                                            double eta2,
                                            const std::optional<SemiparametricInit>& init = {}) {
  if (order != 1 && order != 2)
    fail(Errc::unsupported_order, "model order must be 1 or 2, got " + std::to_string(order));
  if (!(eta1 >= 0.0) || !(eta2 >= 0.0))
    fail(Errc::negative_penalty, "penalty weights must be nonnegative");
  if (series.size() <= order)
    fail(Errc::series_too_short, "conditional likelihood needs more than p observations");
  const int support_max = series.max_value();
  if (support_max == 0)
    fail(Errc::all_zero_series,
         "all-zero series: alpha is unidentifiable; the trivial fit is g = point mass at 0");

  const std::size_t g_cells = static_cast<std::size_t>(support_max) + 1;
  std::vector<double> alpha0;
  std::vector<double> g0;
  if (init) {
    if (init->alpha.size() != static_cast<std::size_t>(order) || init->g.size() != g_cells)
      fail(Errc::invalid_argument, "init dimensions do not match order and series support");
    validate_alpha(init->alpha);
    alpha0 = init->alpha;
    const InnovationPmf given(init->g);
    g0.assign(given.probs().begin(), given.probs().end());
    // Zero cells would start the log-odds at -inf; floor and renormalize.
    double total = 0.0;
    for (double& p : g0) {
      p = std::max(p, 1e-10);
      total += p;
    }
    for (double& p : g0) p /= total;
  } else {
    alpha0 = detail::semiparametric_alpha_start(series, order);
    g0 = detail::empirical_shrunk_start(series, support_max);
  }

  LoglikEvaluator loglik(series, order);
  const double n_scale = static_cast<double>(series.size());
  const auto objective_value = [&](std::span<const double> alpha,
                                   std::span<const double> g) -> double {
    const double ll = loglik(alpha, g);
    if (!std::isfinite(ll)) return kNegInf;
    if (eta1 == 0.0 && eta2 == 0.0) return ll;
    return ll - n_scale * (eta1 * roughness_first(g) + eta2 * roughness_second(g));
  };

  // Transformed state: u_alpha (logistic), u_g (pinned simplex log-odds).
  std::vector<double> u_alpha(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) u_alpha[static_cast<std::size_t>(i)] = logit(alpha0[static_cast<std::size_t>(i)]);
  std::vector<double> u_g = simplex_map_inverse(g0);

  std::vector<double> alpha_scratch(static_cast<std::size_t>(order));
  std::vector<double> logodds_scratch(g_cells);
  std::vector<double> g_scratch;

  const auto decode_alpha = [&](std::span<const double> u) -> bool {
    double total = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      alpha_scratch[i] = logistic(u[i]);
      total += alpha_scratch[i];
    }
    return total < 1.0;
  };
  const auto decode_g = [&](std::span<const double> u) {
    std::copy(u.begin(), u.end(), logodds_scratch.begin());
    logodds_scratch.back() = 0.0;
    softmax_pmf_into(logodds_scratch, g_scratch);
  };

  const Objective alpha_objective = [&](std::span<const double> u) -> double {
    if (!decode_alpha(u)) return kNegInf;
    return objective_value(alpha_scratch, g_scratch);
  };
  const Objective g_objective = [&](std::span<const double> u) -> double {
    decode_g(u);
    return objective_value(alpha_scratch, g_scratch);
  };
  const Objective joint_objective = [&](std::span<const double> u) -> double {
    if (!decode_alpha(u.first(static_cast<std::size_t>(order)))) return kNegInf;
    decode_g(u.subspan(static_cast<std::size_t>(order)));
    return objective_value(alpha_scratch, g_scratch);
  };

  const OptimizerSettings block_settings{.max_iterations = 2000, .tolerance = 1e-10,
                                         .restarts = 0, .simplex_scale = 0.1};
  const OptimizerSettings joint_settings{.max_iterations = 10000, .tolerance = 1e-10,
                                         .restarts = 1, .simplex_scale = 0.1};
  constexpr int kMaxSweeps = 200;
  constexpr int kMaxRounds = 4;
  constexpr double kStallTolerance = 1e-8;

  decode_g(u_g);
  decode_alpha(u_alpha);
  double current = objective_value(alpha_scratch, g_scratch);
  if (!std::isfinite(current))
    fail(Errc::invalid_start, "objective not finite at the semiparametric start");

  // Alternating block sweeps until the objective stalls, then a joint
  // full-dimensional pass. The per-sweep stall test cannot tell an optimum
  // from a slow crawl along a coupled (alpha, g) ridge, so the joint pass
  // always runs; material joint progress triggers another round.
  bool converged = false;
  int sweeps = 0;
  for (int round = 0; round < kMaxRounds; ++round) {
    bool sweeps_converged = false;
    double previous = current;
    while (sweeps < kMaxSweeps) {
      ++sweeps;
      decode_g(u_g);  // alpha block sees the current g
      OptimizeResult ares = maximize(alpha_objective, u_alpha, block_settings);
      u_alpha = std::move(ares.x);
      decode_alpha(u_alpha);
      OptimizeResult gres = maximize(g_objective, u_g, block_settings);
      u_g = std::move(gres.x);
      current = gres.value;
      if (std::abs(current - previous) < kStallTolerance) {
        sweeps_converged = true;
        break;
      }
      previous = current;
    }

    std::vector<double> u_joint = u_alpha;
    u_joint.insert(u_joint.end(), u_g.begin(), u_g.end());
    OptimizeResult joint = maximize(joint_objective, std::move(u_joint), joint_settings);
    const double before = current;
    if (joint.value >= current) {
      u_alpha.assign(joint.x.begin(), joint.x.begin() + order);
      u_g.assign(joint.x.begin() + order, joint.x.end());
      current = joint.value;
    }
    converged = sweeps_converged || joint.converged;
    if (current - before < kStallTolerance) break;
  }

  decode_alpha(u_alpha);
  decode_g(u_g);
  std::vector<double> alpha_hat = alpha_scratch;
  InnovationPmf g_hat = InnovationPmf::normalized(g_scratch);
  const double final_loglik = loglik(alpha_hat, g_hat.probs());
  return SemiparametricFit{InarCoefficients(std::move(alpha_hat)), std::move(g_hat), final_loglik,
                           eta1, eta2, converged, sweeps};
}

/// Unpenalized semiparametric conditional ML (eta1 = eta2 = 0).
inline SemiparametricFit estimate_semiparametric(const CountSeries& series, int order,
                                                 const std::optional<SemiparametricInit>& init = {}) {
  return estimate_penalized(series, order, 0.0, 0.0, init);
}

/// Grid of penalty weights for validation plus the train/tail split point.
struct PenaltyGrid {
  std::vector<double> eta1_values;
  std::vector<double> eta2_values;
  double split_fraction = 0.8;
};

struct PenaltyScore {
  double eta1 = 0.0;
  double eta2 = 0.0;
  double score = 0.0;  ///< out-of-sample conditional loglik; may be -inf
};

struct PenaltyValidation {
  double eta1 = 0.0;
  double eta2 = 0.0;
  std::vector<PenaltyScore> scores;  ///< row-major over eta1 x eta2, grid order
};

/// Data-driven choice of the penalty weights by a single temporal split:
/// each grid pair is fitted on the head segment and scored by the
/// conditional log-likelihood of the fitted pair on the tail segment,
/// conditioning across the boundary with the last p head values. Ties break
/// toward smaller eta1, then smaller eta2.
inline PenaltyValidation validate_penalization(const CountSeries& series, int order,
                                               const PenaltyGrid& grid) {
  if (grid.eta1_values.empty() || grid.eta2_values.empty())
    fail(Errc::empty_grid, "both penalty grids must be nonempty");
  for (double e : grid.eta1_values)
    if (!(e >= 0.0)) fail(Errc::negative_penalty, "eta1 grid contains a negative value");
  for (double e : grid.eta2_values)
    if (!(e >= 0.0)) fail(Errc::negative_penalty, "eta2 grid contains a negative value");
  if (!(grid.split_fraction > 0.0 && grid.split_fraction < 1.0))
    fail(Errc::invalid_argument, "split_fraction must lie in (0,1)");

  const int n = series.size();
  const int split = static_cast<int>(std::floor(grid.split_fraction * static_cast<double>(n)));
  if (split <= order + 10 || n - split <= order + 10)
    fail(Errc::series_too_short,
         "both split segments must exceed p + 10 observations at the requested fraction");

  const CountSeries head(std::vector<int>(series.values().begin(),
                                          series.values().begin() + split));
  LoglikEvaluator tail_loglik(series, order, split);

  PenaltyValidation out;
  out.scores.reserve(grid.eta1_values.size() * grid.eta2_values.size());
  bool have_best = false;
  double best = kNegInf;
  for (double e1 : grid.eta1_values) {
    for (double e2 : grid.eta2_values) {
      const SemiparametricFit fit = estimate_penalized(head, order, e1, e2);
      const double score = tail_loglik(fit.alpha_hat.values(), fit.g_hat.probs());
      out.scores.push_back({e1, e2, score});
      const bool better =
          !have_best || score > best ||
          (score == best && (e1 < out.eta1 || (e1 == out.eta1 && e2 < out.eta2)));
      if (better) {
        out.eta1 = e1;
        out.eta2 = e2;
        best = score;
        have_best = true;
      }
    }
  }
  return out;
}

}  // namespace inarlab
