#pragma once

// Test-only oracles, deliberately independent of the library's evaluation
// paths: binomial pmfs by repeated Bernoulli convolution (no log-gamma, no
// binomial coefficients), transitions by full enumeration of all thinning
// combinations, quantiles by the textbook interpolation formula.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace oracles {

/// Distribution of a sum of `trials` independent Bernoulli(a) draws, built by
/// convolving [1-a, a] repeatedly.
inline std::vector<double> binomial_pmf(int trials, double a) {
  std::vector<double> dist{1.0};
  for (int i = 0; i < trials; ++i) {
    std::vector<double> next(dist.size() + 1, 0.0);
    for (std::size_t k = 0; k < dist.size(); ++k) {
      next[k] += dist[k] * (1.0 - a);
      next[k + 1] += dist[k] * a;
    }
    dist = std::move(next);
  }
  return dist;
}

inline double pmf_at(std::span<const double> g, int k) {
  if (k < 0 || k >= static_cast<int>(g.size())) return 0.0;
  return g[static_cast<std::size_t>(k)];
}

/// P(X_t = k | lags) by enumerating every per-lag thinning outcome over its
/// full range 0..lag (no truncation shortcuts).
inline double transition_pmf(std::span<const double> alpha, std::span<const double> g, int k,
                             std::span<const int> lags) {
  const auto thin1 = binomial_pmf(lags[0], alpha[0]);
  if (alpha.size() == 1) {
    double total = 0.0;
    for (int j = 0; j <= lags[0]; ++j)
      total += thin1[static_cast<std::size_t>(j)] * pmf_at(g, k - j);
    return total;
  }
  const auto thin2 = binomial_pmf(lags[1], alpha[1]);
  double total = 0.0;
  for (int j1 = 0; j1 <= lags[0]; ++j1)
    for (int j2 = 0; j2 <= lags[1]; ++j2)
      total += thin1[static_cast<std::size_t>(j1)] * thin2[static_cast<std::size_t>(j2)] *
               pmf_at(g, k - j1 - j2);
  return total;
}

inline double conditional_loglik(std::span<const double> alpha, std::span<const double> g,
                                 std::span<const int> series) {
  const int p = static_cast<int>(alpha.size());
  double total = 0.0;
  for (int t = p; t < static_cast<int>(series.size()); ++t) {
    std::vector<int> lags{series[static_cast<std::size_t>(t - 1)]};
    if (p == 2) lags.push_back(series[static_cast<std::size_t>(t - 2)]);
    const double prob = transition_pmf(alpha, g, series[static_cast<std::size_t>(t)], lags);
    if (!(prob > 0.0)) return -std::numeric_limits<double>::infinity();
    total += std::log(prob);
  }
  return total;
}

/// Pearson chi-square statistic of observed bin counts against expected
/// probabilities.
inline double chi_square_stat(std::span<const long> observed, std::span<const double> expected,
                              long draws) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = expected[i] * static_cast<double>(draws);
    const double d = static_cast<double>(observed[i]) - e;
    stat += d * d / e;
  }
  return stat;
}

}  // namespace oracles
