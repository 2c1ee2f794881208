#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "inarlab/errors.hpp"

namespace inarlab {

/// Probability mass function with finite support {0,...,support_max}.
///
/// User-supplied vectors must be nonnegative and sum to 1 within 1e-9; the
/// stored vector is renormalized so the entries sum to 1 up to rounding.
/// Computed vectors (family truncations, softmax output) go through
/// normalized(), which only requires a positive total mass.
class InnovationPmf {
 public:
  explicit InnovationPmf(std::vector<double> probs) : probs_(std::move(probs)) {
    check_entries(probs_);
    double total = sum(probs_);
    if (std::abs(total - 1.0) > kSumTolerance)
      fail(Errc::invalid_pmf, "probabilities sum to " + std::to_string(total) + ", expected 1");
    renormalize(probs_, total);
  }

  static InnovationPmf normalized(std::vector<double> probs) {
    check_entries(probs);
    double total = sum(probs);
    if (!(total > 0.0)) fail(Errc::invalid_pmf, "total probability mass is not positive");
    renormalize(probs, total);
    return InnovationPmf(std::move(probs), Trusted{});
  }

  int support_max() const noexcept { return static_cast<int>(probs_.size()) - 1; }

  /// g(k); zero outside the support.
  double operator()(int k) const noexcept {
    if (k < 0 || k > support_max()) return 0.0;
    return probs_[static_cast<std::size_t>(k)];
  }

  std::span<const double> probs() const noexcept { return probs_; }

  double mean() const noexcept {
    double m = 0.0;
    for (std::size_t k = 1; k < probs_.size(); ++k) m += static_cast<double>(k) * probs_[k];
    return m;
  }

  double variance() const noexcept {
    double m = mean(), m2 = 0.0;
    for (std::size_t k = 1; k < probs_.size(); ++k)
      m2 += static_cast<double>(k) * static_cast<double>(k) * probs_[k];
    return m2 - m * m;
  }

  static constexpr double kSumTolerance = 1e-9;

 private:
  struct Trusted {};
  InnovationPmf(std::vector<double> probs, Trusted) : probs_(std::move(probs)) {}

  static void check_entries(const std::vector<double>& p) {
    if (p.empty()) fail(Errc::invalid_pmf, "pmf must have at least one entry");
    for (std::size_t k = 0; k < p.size(); ++k)
      if (!(p[k] >= 0.0))
        fail(Errc::invalid_pmf, "entry " + std::to_string(k) + " is negative or not a number");
  }

  static double sum(const std::vector<double>& p) {
    double s = 0.0;
    for (double x : p) s += x;
    return s;
  }

  static void renormalize(std::vector<double>& p, double total) {
    for (double& x : p) x /= total;
  }

  std::vector<double> probs_;
};

}  // namespace inarlab
