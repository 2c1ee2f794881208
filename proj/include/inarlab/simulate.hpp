#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "inarlab/errors.hpp"
#include "inarlab/model.hpp"
#include "inarlab/rng.hpp"

namespace inarlab {

struct SimulationConfig {
  int n = 1;             ///< requested series length, >= 1
  int burn_in = 500;     ///< discarded prefix length, >= 0
  std::uint64_t seed = 0;
};

inline void validate_config(const SimulationConfig& config) {
  if (config.n < 1) fail(Errc::invalid_argument, "simulation length n must be >= 1");
  if (config.burn_in < 0) fail(Errc::invalid_argument, "burn_in must be >= 0");
}

/// Binomial thinning alpha ∘ x: a Binomial(x, alpha) draw, the sum of x
/// independent Bernoulli(alpha) survivals. Accepts the closed interval
/// [0,1] for alpha even though model coefficients use the open one.
inline int binomial_thin(int x, double alpha, RandomStream& rng) {
  if (x < 0) fail(Errc::invalid_argument, "cannot thin a negative count");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    fail(Errc::invalid_argument, "thinning probability must lie in [0,1]");
  return rng.binomial(x, alpha);
}

/// Innovation draw by inverse-CDF search on the cumulative sums of g.
inline int draw_innovation(const InnovationPmf& g, RandomStream& rng) {
  const double u = rng.uniform();
  double cdf = 0.0;
  const auto probs = g.probs();
  for (int k = 0; k < static_cast<int>(probs.size()); ++k) {
    cdf += probs[static_cast<std::size_t>(k)];
    if (u < cdf) return k;
  }
  return g.support_max();
}

/// Simulates an INAR(p) trajectory of exactly config.n values.
///
/// The p pre-sample values are independent innovation draws; then each step
/// applies one binomial thinning per lag (lag 1 first) plus one innovation
/// draw, and the first burn_in generated values are discarded. Parametric
/// innovation families are truncated at tail mass 1e-10 so both innovation
/// specifications share one sampler. Identical (model, config) inputs give
/// identical output.
inline CountSeries simulate_inar(const InarModel& model, const SimulationConfig& config) {
  validate_model(model);
  validate_config(config);
  const InnovationPmf g = model.innovation_pmf(1e-10);
  const auto& coeffs = model.coefficients();
  const int p = coeffs.order();

  RandomStream rng(config.seed);
  int prev1 = draw_innovation(g, rng);  // X_0
  int prev2 = 0;                        // X_{-1} when p = 2
  if (p == 2) {
    prev2 = prev1;
    prev1 = draw_innovation(g, rng);
  }

  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(config.n));
  const int total = config.burn_in + config.n;
  for (int t = 0; t < total; ++t) {
    int x = binomial_thin(prev1, coeffs[0], rng);
    if (p == 2) x += binomial_thin(prev2, coeffs[1], rng);
    x += draw_innovation(g, rng);
    prev2 = prev1;
    prev1 = x;
    if (t >= config.burn_in) out.push_back(x);
  }
  return CountSeries(std::move(out));
}

}  // namespace inarlab
