#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "inarlab/errors.hpp"
#include "inarlab/pmf.hpp"

namespace inarlab {

/// Poisson innovations: P(k) = e^{-lambda} lambda^k / k!, mean = var = lambda.
struct Poisson {
  double lambda;
};

/// Geometric innovations on {0,1,...}: P(k) = (1-pi)^k pi.
struct Geometric {
  double pi;
};

/// Negative binomial innovations: P(k) = C(k+r-1,k) (1-pi)^k pi^r,
/// mean r(1-pi)/pi, variance r(1-pi)/pi^2.
struct NegBin {
  double r;
  double pi;
};

enum class FamilyKind { poisson, geometric, negbin };

inline const char* family_kind_name(FamilyKind kind) noexcept {
  switch (kind) {
    case FamilyKind::poisson: return "poisson";
    case FamilyKind::geometric: return "geometric";
    case FamilyKind::negbin: return "negbin";
  }
  return "?";
}

/// Tagged union of the supported parametric innovation families.
/// Parameters are validated to lie strictly inside their open domains.
class ParametricFamily {
 public:
  using Dist = std::variant<Poisson, Geometric, NegBin>;

  ParametricFamily(Poisson d) : dist_(d) {  // NOLINT(google-explicit-constructor)
    if (!(d.lambda > 0.0) || !std::isfinite(d.lambda))
      fail(Errc::invalid_family_parameter, "poisson lambda must be positive and finite");
  }
  ParametricFamily(Geometric d) : dist_(d) {  // NOLINT(google-explicit-constructor)
    if (!(d.pi > 0.0 && d.pi < 1.0))
      fail(Errc::invalid_family_parameter, "geometric pi must lie in (0,1)");
  }
  ParametricFamily(NegBin d) : dist_(d) {  // NOLINT(google-explicit-constructor)
    if (!(d.r > 0.0) || !std::isfinite(d.r))
      fail(Errc::invalid_family_parameter, "negbin r must be positive and finite");
    if (!(d.pi > 0.0 && d.pi < 1.0))
      fail(Errc::invalid_family_parameter, "negbin pi must lie in (0,1)");
  }

  FamilyKind kind() const noexcept {
    if (std::holds_alternative<Poisson>(dist_)) return FamilyKind::poisson;
    if (std::holds_alternative<Geometric>(dist_)) return FamilyKind::geometric;
    return FamilyKind::negbin;
  }

  const char* name() const noexcept { return family_kind_name(kind()); }

  const Dist& dist() const noexcept { return dist_; }

  double mean() const noexcept {
    return std::visit(
        [](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, Poisson>) return d.lambda;
          if constexpr (std::is_same_v<T, Geometric>) return (1.0 - d.pi) / d.pi;
          if constexpr (std::is_same_v<T, NegBin>) return d.r * (1.0 - d.pi) / d.pi;
        },
        dist_);
  }

  double variance() const noexcept {
    return std::visit(
        [](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, Poisson>) return d.lambda;
          if constexpr (std::is_same_v<T, Geometric>) return (1.0 - d.pi) / (d.pi * d.pi);
          if constexpr (std::is_same_v<T, NegBin>) return d.r * (1.0 - d.pi) / (d.pi * d.pi);
        },
        dist_);
  }

  double log_pmf(int k) const noexcept {
    if (k < 0) return -std::numeric_limits<double>::infinity();
    double kk = static_cast<double>(k);
    return std::visit(
        [kk](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, Poisson>)
            return kk * std::log(d.lambda) - d.lambda - std::lgamma(kk + 1.0);
          if constexpr (std::is_same_v<T, Geometric>)
            return std::log(d.pi) + kk * std::log1p(-d.pi);
          if constexpr (std::is_same_v<T, NegBin>)
            return std::lgamma(kk + d.r) - std::lgamma(d.r) - std::lgamma(kk + 1.0) +
                   d.r * std::log(d.pi) + kk * std::log1p(-d.pi);
        },
        dist_);
  }

  double pmf(int k) const noexcept { return k < 0 ? 0.0 : std::exp(log_pmf(k)); }

  /// Parameter values in a fixed order: {lambda} | {pi} | {r, pi}.
  std::vector<double> parameters() const {
    return std::visit(
        [](const auto& d) -> std::vector<double> {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, Poisson>) return {d.lambda};
          if constexpr (std::is_same_v<T, Geometric>) return {d.pi};
          if constexpr (std::is_same_v<T, NegBin>) return {d.r, d.pi};
        },
        dist_);
  }

  std::vector<std::string> parameter_names() const {
    switch (kind()) {
      case FamilyKind::poisson: return {"lambda"};
      case FamilyKind::geometric: return {"pi"};
      case FamilyKind::negbin: return {"r", "pi"};
    }
    return {};
  }

 private:
  Dist dist_;
};

/// Evaluates the family pmf on {0,...,support_max} and renormalizes.
/// The pre-normalization tail mass beyond support_max must stay below
/// tail_tol, otherwise TruncationLoss is raised.
inline InnovationPmf family_pmf(const ParametricFamily& family, int support_max,
                                double tail_tol = 1e-8) {
  if (support_max < 0) fail(Errc::invalid_argument, "support_max must be nonnegative");
  std::vector<double> probs(static_cast<std::size_t>(support_max) + 1);
  double covered = 0.0;
  for (int k = 0; k <= support_max; ++k) {
    probs[static_cast<std::size_t>(k)] = family.pmf(k);
    covered += probs[static_cast<std::size_t>(k)];
  }
  double tail = 1.0 - covered;
  if (!(tail < tail_tol))
    fail(Errc::truncation_loss, std::string(family.name()) + " tail mass beyond support_max=" +
                                    std::to_string(support_max) + " exceeds tolerance");
  return InnovationPmf::normalized(std::move(probs));
}

/// Truncates at the smallest support whose tail mass is below tail_tol,
/// extended to at least min_support. Used by simulation (tail 1e-10) and by
/// the parametric ML objective (tail 1e-10 plus support up to max(series)).
inline InnovationPmf family_pmf_auto(const ParametricFamily& family, double tail_tol = 1e-10,
                                     int min_support = 0) {
  constexpr int kMaxSupport = 1 << 20;
  std::vector<double> probs;
  probs.reserve(64);
  double covered = 0.0;
  int k = 0;
  for (; k <= kMaxSupport; ++k) {
    probs.push_back(family.pmf(k));
    covered += probs.back();
    if (k >= min_support && 1.0 - covered < tail_tol) break;
  }
  if (k > kMaxSupport)
    fail(Errc::truncation_loss,
         std::string(family.name()) + " does not reach the requested tail mass at any "
                                      "representable truncation point");
  return InnovationPmf::normalized(std::move(probs));
}

}  // namespace inarlab
