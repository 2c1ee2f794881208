#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "inarlab/errors.hpp"

namespace inarlab {

struct OptimizerSettings {
  int max_iterations = 5000;  ///< Nelder-Mead iterations per run
  double tolerance = 1e-10;   ///< absolute objective-spread stop
  int restarts = 2;           ///< perturb-and-repolish passes after convergence
  double simplex_scale = 0.1; ///< initial step in transformed coordinates

  void validate() const {
    if (max_iterations <= 0 || !(tolerance > 0.0) || restarts < 0 || !(simplex_scale > 0.0))
      fail(Errc::invalid_argument, "optimizer settings must be positive");
  }
};

struct OptimizeResult {
  std::vector<double> x;
  double value = -std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

namespace detail {

// Rejected points (-inf, NaN, or +inf) rank worse than any finite value.
inline double cost_of(double objective_value) noexcept {
  return std::isfinite(objective_value) ? -objective_value
                                        : std::numeric_limits<double>::infinity();
}

struct NelderMeadRun {
  std::vector<double> x;
  double cost = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

/// One Nelder-Mead descent on cost = -objective with the standard
/// reflection/expansion/contraction/shrink coefficients (1, 2, 1/2, 1/2).
inline NelderMeadRun nelder_mead(const Objective& objective, std::span<const double> start,
                                 double step, int max_iterations, double tolerance) {
  const std::size_t dim = start.size();
  const std::size_t m = dim + 1;

  std::vector<std::vector<double>> verts(m, std::vector<double>(start.begin(), start.end()));
  std::vector<double> costs(m);
  for (std::size_t i = 1; i < m; ++i) verts[i][i - 1] += step;
  for (std::size_t i = 0; i < m; ++i) costs[i] = cost_of(objective(verts[i]));

  std::vector<std::size_t> idx(m);
  std::vector<double> centroid(dim), xr(dim), xe(dim), xc(dim);
  int iter = 0;
  bool converged = false;

  auto order = [&] {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return costs[a] < costs[b];
    });
  };

  for (; iter < max_iterations; ++iter) {
    order();
    const std::size_t best = idx[0], worst = idx[m - 1], second_worst = idx[m - 2];
    if (costs[worst] - costs[best] <= tolerance) {
      converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += verts[i][d];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    for (std::size_t d = 0; d < dim; ++d) xr[d] = centroid[d] + (centroid[d] - verts[worst][d]);
    const double fr = cost_of(objective(xr));

    if (fr < costs[best]) {
      for (std::size_t d = 0; d < dim; ++d) xe[d] = centroid[d] + 2.0 * (xr[d] - centroid[d]);
      const double fe = cost_of(objective(xe));
      if (fe < fr) {
        verts[worst] = xe;
        costs[worst] = fe;
      } else {
        verts[worst] = xr;
        costs[worst] = fr;
      }
    } else if (fr < costs[second_worst]) {
      verts[worst] = xr;
      costs[worst] = fr;
    } else {
      const bool outside = fr < costs[worst];
      const auto& toward = outside ? xr : verts[worst];
      for (std::size_t d = 0; d < dim; ++d) xc[d] = centroid[d] + 0.5 * (toward[d] - centroid[d]);
      const double fc = cost_of(objective(xc));
      if (fc < (outside ? fr : costs[worst])) {
        verts[worst] = xc;
        costs[worst] = fc;
      } else {
        for (std::size_t i = 0; i < m; ++i) {
          if (i == idx[0]) continue;
          for (std::size_t d = 0; d < dim; ++d)
            verts[i][d] = verts[idx[0]][d] + 0.5 * (verts[i][d] - verts[idx[0]][d]);
          costs[i] = cost_of(objective(verts[i]));
        }
      }
    }
  }

  order();
  return {std::move(verts[idx[0]]), costs[idx[0]], converged, iter};
}

}  // namespace detail

/// Derivative-free maximization: Nelder-Mead in the caller's (already
/// transformed, unconstrained) coordinates. Objective values of -inf or NaN
/// mark rejected points and rank below every finite value. After the first
/// descent the best vertex is perturbed and re-polished `restarts` times;
/// the best point seen is returned, so the result never falls below the
/// starting objective.
inline OptimizeResult maximize(const Objective& objective, std::vector<double> start,
                               const OptimizerSettings& settings = {}) {
  settings.validate();
  if (start.empty()) fail(Errc::invalid_argument, "start vector must be nonempty");
  if (!std::isfinite(objective(start)))
    fail(Errc::invalid_start, "objective is rejected or non-finite at the starting point");

  detail::NelderMeadRun best = detail::nelder_mead(objective, start, settings.simplex_scale,
                                                   settings.max_iterations, settings.tolerance);
  int total_iterations = best.iterations;
  const double perturb = settings.simplex_scale / 10.0;
  for (int r = 1; r <= settings.restarts; ++r) {
    std::vector<double> jiggled = best.x;
    for (std::size_t d = 0; d < jiggled.size(); ++d)
      jiggled[d] += ((d + static_cast<std::size_t>(r)) % 2 == 0) ? perturb : -perturb;
    detail::NelderMeadRun run = detail::nelder_mead(objective, jiggled, perturb,
                                                    settings.max_iterations, settings.tolerance);
    total_iterations += run.iterations;
    if (run.cost < best.cost) best = std::move(run);
  }
  return {std::move(best.x), -best.cost, best.converged, total_iterations};
}

/// Componentwise logistic 1/(1+e^{-u}), clamped 1e-12 away from 0 and 1 so
/// downstream log terms stay finite.
inline double logistic(double u) noexcept {
  double p;
  if (u >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-u));
  } else {
    const double e = std::exp(u);
    p = e / (1.0 + e);
  }
  return std::clamp(p, 1e-12, 1.0 - 1e-12);
}

inline double logit(double p) noexcept { return std::log(p / (1.0 - p)); }

inline std::vector<double> logistic_map(std::span<const double> u) {
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = logistic(u[i]);
  return out;
}

/// Normalized exponential of the given log-odds; output cells are clamped to
/// at least 1e-12 and renormalized. Invariant under a common shift of all
/// entries.
inline void softmax_pmf_into(std::span<const double> logodds, std::vector<double>& out) {
  out.resize(logodds.size());
  const double top = *std::max_element(logodds.begin(), logodds.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logodds.size(); ++i) {
    out[i] = std::exp(logodds[i] - top);
    total += out[i];
  }
  // Normalize, then floor tiny cells at 1e-12 with the mass taken from the
  // largest cell so the total stays put.
  std::size_t largest = 0;
  double added = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] /= total;
    if (out[i] > out[largest]) largest = i;
    if (out[i] < 1e-12) {
      added += 1e-12 - out[i];
      out[i] = 1e-12;
    }
  }
  out[largest] -= added;
}

inline std::vector<double> softmax_pmf(std::span<const double> logodds) {
  if (logodds.empty()) fail(Errc::invalid_argument, "log-odds vector must be nonempty");
  std::vector<double> out;
  softmax_pmf_into(logodds, out);
  return out;
}

/// Smooth bijection from R^M onto the interior of the probability simplex on
/// M+1 cells: the normalized exponential of (u_0,...,u_{M-1}, 0), with the
/// last log-odds pinned to zero.
inline std::vector<double> simplex_map(std::span<const double> u) {
  std::vector<double> logodds(u.begin(), u.end());
  logodds.push_back(0.0);
  return softmax_pmf(logodds);
}

/// Inverse of simplex_map on interior points: u_i = log(p_i / p_M).
inline std::vector<double> simplex_map_inverse(std::span<const double> pmf) {
  if (pmf.size() < 2) fail(Errc::invalid_argument, "pmf must have at least two cells");
  const double ref = std::log(pmf.back());
  std::vector<double> u(pmf.size() - 1);
  for (std::size_t i = 0; i + 1 < pmf.size(); ++i) u[i] = std::log(pmf[i]) - ref;
  return u;
}

}  // namespace inarlab
