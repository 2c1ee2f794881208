#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "inarlab/errors.hpp"
#include "inarlab/family.hpp"
#include "inarlab/pmf.hpp"

namespace inarlab {

/// Checks an INAR coefficient vector: order in {1,2}, each entry strictly
/// inside (0,1), and sum strictly below 1.
inline void validate_alpha(std::span<const double> alpha) {
  if (alpha.size() != 1 && alpha.size() != 2)
    fail(Errc::unsupported_order,
         "model order must be 1 or 2, got " + std::to_string(alpha.size()));
  for (std::size_t i = 0; i < alpha.size(); ++i)
    if (!(alpha[i] > 0.0 && alpha[i] < 1.0))
      fail(Errc::coefficient_out_of_range,
           "alpha[" + std::to_string(i + 1) + "] must lie in the open interval (0,1)");
  double total = 0.0;
  for (double a : alpha) total += a;
  if (!(total < 1.0))
    fail(Errc::non_stationary, "coefficients sum to " + std::to_string(total) +
                                   "; stationarity requires a sum below 1");
}

/// INAR coefficient vector alpha = (alpha_1[, alpha_2]).
class InarCoefficients {
 public:
  explicit InarCoefficients(std::vector<double> alpha) : alpha_(std::move(alpha)) {
    validate_alpha(alpha_);
  }

  int order() const noexcept { return static_cast<int>(alpha_.size()); }
  double operator[](int i) const noexcept { return alpha_[static_cast<std::size_t>(i)]; }
  std::span<const double> values() const noexcept { return alpha_; }

  double sum() const noexcept {
    double s = 0.0;
    for (double a : alpha_) s += a;
    return s;
  }

 private:
  std::vector<double> alpha_;
};

/// Observed nonnegative-integer time series X_1,...,X_n.
class CountSeries {
 public:
  explicit CountSeries(std::vector<int> values) : values_(std::move(values)) {
    if (values_.empty()) fail(Errc::invalid_argument, "series must contain at least one value");
    for (std::size_t t = 0; t < values_.size(); ++t)
      if (values_[t] < 0)
        fail(Errc::invalid_argument,
             "series value at position " + std::to_string(t + 1) + " is negative");
  }

  int size() const noexcept { return static_cast<int>(values_.size()); }
  int operator[](int t) const noexcept { return values_[static_cast<std::size_t>(t)]; }
  std::span<const int> values() const noexcept { return values_; }
  int max_value() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

 private:
  std::vector<int> values_;
};

/// INAR(p) model: coefficients plus an innovation specification, either a
/// parametric family or an explicit finite-support pmf.
class InarModel {
 public:
  using Innovations = std::variant<ParametricFamily, InnovationPmf>;

  InarModel(InarCoefficients coeffs, Innovations innovations)
      : coeffs_(std::move(coeffs)), innovations_(std::move(innovations)) {}

  InarModel(InarCoefficients coeffs, ParametricFamily family)
      : coeffs_(std::move(coeffs)), innovations_(std::move(family)) {}

  InarModel(InarCoefficients coeffs, InnovationPmf pmf)
      : coeffs_(std::move(coeffs)), innovations_(std::move(pmf)) {}

  const InarCoefficients& coefficients() const noexcept { return coeffs_; }
  const Innovations& innovations() const noexcept { return innovations_; }
  int order() const noexcept { return coeffs_.order(); }

  bool parametric() const noexcept { return std::holds_alternative<ParametricFamily>(innovations_); }

  double innovation_mean() const {
    if (const auto* fam = std::get_if<ParametricFamily>(&innovations_)) return fam->mean();
    return std::get<InnovationPmf>(innovations_).mean();
  }

  /// Innovation distribution as a finite pmf: families are truncated at the
  /// smallest support whose tail mass is below tail_tol, explicit pmfs are
  /// returned as given.
  InnovationPmf innovation_pmf(double tail_tol = 1e-10) const {
    if (const auto* fam = std::get_if<ParametricFamily>(&innovations_))
      return family_pmf_auto(*fam, tail_tol);
    return std::get<InnovationPmf>(innovations_);
  }

 private:
  InarCoefficients coeffs_;
  Innovations innovations_;
};

/// Re-checks every model invariant; components built through their
/// constructors always pass.
inline void validate_model(const InarModel& model) {
  validate_alpha(model.coefficients().values());
  if (!model.parametric()) {
    const auto& g = std::get<InnovationPmf>(model.innovations());
    double total = 0.0;
    for (double x : g.probs()) {
      if (!(x >= 0.0)) fail(Errc::invalid_pmf, "pmf entry is negative");
      total += x;
    }
    if (std::abs(total - 1.0) > InnovationPmf::kSumTolerance)
      fail(Errc::invalid_pmf, "pmf entries do not sum to 1");
  }
}

/// Stationary marginal mean mu_eps / (1 - sum(alpha)).
inline double stationary_mean(const InarModel& model) {
  return model.innovation_mean() / (1.0 - model.coefficients().sum());
}

}  // namespace inarlab
