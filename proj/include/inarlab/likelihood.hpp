#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "inarlab/errors.hpp"
#include "inarlab/model.hpp"

namespace inarlab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Conditioning set of one transition: the p previous counts, most recent
/// first (lags[0] = X_{t-1}).
class TransitionContext {
 public:
  explicit TransitionContext(std::vector<int> lags) : lags_(std::move(lags)) {
    if (lags_.size() != 1 && lags_.size() != 2)
      fail(Errc::unsupported_order, "context must hold 1 or 2 lagged values");
    for (int l : lags_)
      if (l < 0) fail(Errc::invalid_argument, "lagged counts must be nonnegative");
  }

  int order() const noexcept { return static_cast<int>(lags_.size()); }
  int operator[](int i) const noexcept { return lags_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<int> lags_;
};

namespace detail {

/// Binomial(l, a) pmf over {0,...,l}, each term assembled in log space from
/// log-gamma factors and exponentiated. lgamma_fact[i] must hold lgamma(i+1).
inline void binomial_row(int l, double a, std::span<const double> lgamma_fact,
                         std::vector<double>& row) {
  row.resize(static_cast<std::size_t>(l) + 1);
  const double log_a = std::log(a);
  const double log_1ma = std::log1p(-a);
  for (int j = 0; j <= l; ++j) {
    const double log_term = lgamma_fact[static_cast<std::size_t>(l)] -
                            lgamma_fact[static_cast<std::size_t>(j)] -
                            lgamma_fact[static_cast<std::size_t>(l - j)] +
                            static_cast<double>(j) * log_a + static_cast<double>(l - j) * log_1ma;
    row[static_cast<std::size_t>(j)] = std::exp(log_term);
  }
}

inline std::vector<double> lgamma_factorials(int max_n) {
  std::vector<double> table(static_cast<std::size_t>(max_n) + 1);
  for (int i = 0; i <= max_n; ++i) table[static_cast<std::size_t>(i)] = std::lgamma(i + 1.0);
  return table;
}

/// Sum over one thinning lag: sum_j row[j] * g[k - j] with j restricted to
/// indices where both factors exist.
inline double thin_convolve(std::span<const double> row, std::span<const double> g, int k) {
  const int l = static_cast<int>(row.size()) - 1;
  const int gmax = static_cast<int>(g.size()) - 1;
  const int lo = std::max(0, k - gmax);
  const int hi = std::min(k, l);
  double s = 0.0;
  for (int j = lo; j <= hi; ++j)
    s += row[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(k - j)];
  return s;
}

}  // namespace detail

/// P(X_t = k | context) for an INAR(p) transition: all ways that the per-lag
/// binomial thinnings plus one innovation sum to k.
///
/// p = 1: sum_j C(l,j) a^j (1-a)^(l-j) g(k-j); p = 2 adds the second thinning
/// as a double sum. Values of g beyond its support count as zero.
inline double transition_pmf(const InarCoefficients& alpha, const InnovationPmf& g, int k,
                             const TransitionContext& ctx) {
  if (alpha.order() != ctx.order())
    fail(Errc::invalid_argument, "context order does not match coefficient order");
  if (k < 0) return 0.0;

  const int l1 = ctx[0];
  const int max_l = alpha.order() == 2 ? std::max(l1, ctx[1]) : l1;
  const auto lgf = detail::lgamma_factorials(max_l);
  std::vector<double> row1;
  detail::binomial_row(l1, alpha[0], lgf, row1);

  if (alpha.order() == 1) return detail::thin_convolve(row1, g.probs(), k);

  std::vector<double> row2;
  detail::binomial_row(ctx[1], alpha[1], lgf, row2);
  double total = 0.0;
  const int hi1 = std::min(k, l1);
  for (int j1 = 0; j1 <= hi1; ++j1)
    total += row1[static_cast<std::size_t>(j1)] * detail::thin_convolve(row2, g.probs(), k - j1);
  return total;
}

/// Conditional log-likelihood engine bound to one series: transitions are
/// tallied once so repeated evaluations cost only the distinct (context, k)
/// patterns, and binomial rows are cached per coefficient value. Not
/// shareable across threads; each fit owns one.
class LoglikEvaluator {
 public:
  LoglikEvaluator(const CountSeries& series, int order, int first = -1) : order_(order) {
    if (order != 1 && order != 2)
      fail(Errc::unsupported_order, "model order must be 1 or 2, got " + std::to_string(order));
    if (series.size() <= order)
      fail(Errc::series_too_short, "need more than " + std::to_string(order) +
                                       " observations, got " + std::to_string(series.size()));
    if (first < 0) first = order;
    if (first < order) fail(Errc::invalid_argument, "first transition index below model order");

    std::map<std::tuple<int, int, int>, int> tally;
    max_lag_ = 0;
    for (int t = first; t < series.size(); ++t) {
      const int l1 = series[t - 1];
      const int l2 = order == 2 ? series[t - 2] : 0;
      max_lag_ = std::max({max_lag_, l1, l2});
      ++tally[{l1, l2, series[t]}];
    }
    entries_.reserve(tally.size());
    for (const auto& [key, count] : tally)
      entries_.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), count});
    transitions_ = series.size() - first;
    lgf_ = detail::lgamma_factorials(max_lag_);
    rows1_.resize(static_cast<std::size_t>(max_lag_) + 1);
    if (order == 2) {
      rows2_.resize(static_cast<std::size_t>(max_lag_) + 1);
      conv2_.resize(static_cast<std::size_t>(max_lag_) + 1);
    }
  }

  int order() const noexcept { return order_; }
  int transitions() const noexcept { return transitions_; }

  /// Log-likelihood of the tallied transitions; -inf when any transition has
  /// zero probability under (alpha, g).
  double operator()(std::span<const double> alpha, std::span<const double> g) {
    refresh_rows(alpha);
    if (order_ == 2) refresh_conv(g);
    double total = 0.0;
    for (const Entry& e : entries_) {
      double prob;
      if (order_ == 1) {
        prob = detail::thin_convolve(rows1_[static_cast<std::size_t>(e.l1)], g, e.k);
      } else {
        const auto& conv = conv2_[static_cast<std::size_t>(e.l2)];
        prob = detail::thin_convolve(rows1_[static_cast<std::size_t>(e.l1)], conv, e.k);
      }
      if (!(prob > 0.0)) return kNegInf;
      total += static_cast<double>(e.count) * std::log(prob);
    }
    return total;
  }

 private:
  struct Entry {
    int l1, l2, k, count;
  };

  void refresh_rows(std::span<const double> alpha) {
    if (!rows_valid_ || alpha[0] != cached_a1_) {
      cached_a1_ = alpha[0];
      for (int l = 0; l <= max_lag_; ++l)
        detail::binomial_row(l, cached_a1_, lgf_, rows1_[static_cast<std::size_t>(l)]);
    }
    if (order_ == 2 && (!rows_valid_ || alpha[1] != cached_a2_)) {
      cached_a2_ = alpha[1];
      for (int l = 0; l <= max_lag_; ++l)
        detail::binomial_row(l, cached_a2_, lgf_, rows2_[static_cast<std::size_t>(l)]);
    }
    rows_valid_ = true;
  }

  // Distribution of (alpha_2 ∘ l2) + innovation for every lag value l2.
  void refresh_conv(std::span<const double> g) {
    const int gmax = static_cast<int>(g.size()) - 1;
    for (int l = 0; l <= max_lag_; ++l) {
      auto& conv = conv2_[static_cast<std::size_t>(l)];
      conv.resize(static_cast<std::size_t>(l + gmax) + 1);
      const auto& row = rows2_[static_cast<std::size_t>(l)];
      for (int m = 0; m <= l + gmax; ++m)
        conv[static_cast<std::size_t>(m)] = detail::thin_convolve(row, g, m);
    }
  }

  int order_;
  int transitions_ = 0;
  int max_lag_ = 0;
  std::vector<Entry> entries_;
  std::vector<double> lgf_;
  bool rows_valid_ = false;
  double cached_a1_ = -1.0, cached_a2_ = -1.0;
  std::vector<std::vector<double>> rows1_, rows2_, conv2_;
};

/// Sum over t > first of log P(X_t | X_{t-1},...,X_{t-p}); conditions on the
/// first `first` observations. Returns -inf when an observed transition is
/// impossible under (alpha, g).
inline double conditional_loglik_from(const InarCoefficients& alpha, const InnovationPmf& g,
                                      const CountSeries& series, int first) {
  LoglikEvaluator eval(series, alpha.order(), first);
  return eval(alpha.values(), g.probs());
}

/// Conditional log-likelihood given the first p observations.
inline double conditional_loglik(const InarCoefficients& alpha, const InnovationPmf& g,
                                 const CountSeries& series) {
  return conditional_loglik_from(alpha, g, series, alpha.order());
}

}  // namespace inarlab
