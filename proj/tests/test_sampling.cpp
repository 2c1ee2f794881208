#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "inarlab/rng.hpp"
#include "inarlab/simulate.hpp"
#include "oracles.hpp"

using namespace inarlab;

TEST_CASE("thinning degenerate probabilities", "[sampling]") {
  RandomStream rng(1);
  for (int i = 0; i < 50; ++i) {
    CHECK(binomial_thin(5, 0.0, rng) == 0);
    CHECK(binomial_thin(5, 1.0, rng) == 5);
    CHECK(binomial_thin(0, 0.7, rng) == 0);
  }
}

TEST_CASE("thinning draws follow the binomial law", "[sampling]") {
  // Chi-square goodness of fit against Binomial(10, 0.3); critical value at
  // level 0.001 with 10 degrees of freedom is 29.588.
  RandomStream rng(987654321);
  constexpr long kDraws = 100000;
  std::vector<long> counts(11, 0);
  for (long i = 0; i < kDraws; ++i) ++counts[static_cast<std::size_t>(binomial_thin(10, 0.3, rng))];
  const std::vector<double> expected = oracles::binomial_pmf(10, 0.3);
  const double stat = oracles::chi_square_stat(counts, expected, kDraws);
  CHECK(stat < 29.588);
}

TEST_CASE("thinning respects the trial-count chunk boundary", "[sampling]") {
  // Values beyond the internal chunk size still produce draws in range with
  // roughly the right mean.
  RandomStream rng(5);
  double total = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const int draw = binomial_thin(2500, 0.4, rng);
    REQUIRE(draw >= 0);
    REQUIRE(draw <= 2500);
    total += draw;
  }
  CHECK(total / 2000.0 == Catch::Approx(1000.0).margin(3.0));
}

TEST_CASE("innovation draws", "[sampling]") {
  RandomStream rng(42);
  const InnovationPmf point({1.0});
  const InnovationPmf point1({0.0, 1.0});
  for (int i = 0; i < 100; ++i) {
    CHECK(draw_innovation(point, rng) == 0);
    CHECK(draw_innovation(point1, rng) == 1);
  }

  const InnovationPmf g({0.25, 0.25, 0.5});
  std::vector<long> counts(3, 0);
  constexpr long kDraws = 100000;
  for (long i = 0; i < kDraws; ++i) ++counts[static_cast<std::size_t>(draw_innovation(g, rng))];
  for (int k = 0; k < 3; ++k)
    CHECK(static_cast<double>(counts[static_cast<std::size_t>(k)]) / kDraws ==
          Catch::Approx(g(k)).margin(0.01));
}

TEST_CASE("simulation of a point-mass model is identically zero", "[sampling]") {
  const InarModel model{InarCoefficients({0.5}), InnovationPmf({1.0})};
  const CountSeries series = simulate_inar(model, {100, 500, 7});
  for (int x : series.values()) CHECK(x == 0);
}

TEST_CASE("simulation determinism and length", "[sampling]") {
  const InarModel model{InarCoefficients({0.4, 0.3}), ParametricFamily(Poisson{1.5})};
  const SimulationConfig config{2000, 500, 123456789};
  const CountSeries a = simulate_inar(model, config);
  const CountSeries b = simulate_inar(model, config);
  REQUIRE(a.size() == 2000);
  bool all_equal = true;
  for (int t = 0; t < a.size(); ++t) all_equal = all_equal && a[t] == b[t];
  CHECK(all_equal);

  const CountSeries c = simulate_inar(model, {2000, 500, 123456790});
  bool any_diff = false;
  for (int t = 0; t < c.size(); ++t) any_diff = any_diff || a[t] != c[t];
  CHECK(any_diff);
}

TEST_CASE("simulated INAR(1) matches stationary moments", "[sampling]") {
  const double alpha = 0.5, lambda = 2.0;
  const InarModel model{InarCoefficients({alpha}), ParametricFamily(Poisson{lambda})};
  const int n = 100000;
  const CountSeries series = simulate_inar(model, {n, 500, 20240301});

  double mean = 0.0;
  for (int x : series.values()) mean += x;
  mean /= n;
  // Stationary marginal is Poisson(lambda / (1 - alpha)); variance 8/3.
  const double target = lambda / (1.0 - alpha);
  CHECK(std::abs(mean - target) < 3.0 * std::sqrt(lambda / (1.0 - alpha * alpha) / n));

  double c0 = 0.0, c1 = 0.0;
  for (int t = 0; t < n; ++t) {
    const double d = series[t] - mean;
    c0 += d * d;
    if (t + 1 < n) c1 += d * (series[t + 1] - mean);
  }
  const double rho1 = c1 / c0;
  CHECK(std::abs(rho1 - alpha) < 0.02);
}

TEST_CASE("simulated values never exceed their generating parts", "[sampling]") {
  // Each value is a thinning of the lagged values plus one innovation, so it
  // is bounded by the lag sum plus the innovation support.
  const InarModel model{InarCoefficients({0.45, 0.35}), ParametricFamily(Poisson{2.0})};
  const CountSeries series = simulate_inar(model, {5000, 500, 8675309});
  const int innovation_cap = model.innovation_pmf(1e-10).support_max();
  for (int t = 2; t < series.size(); ++t)
    REQUIRE(series[t] <= series[t - 1] + series[t - 2] + innovation_cap);
}

TEST_CASE("seed splitting gives distinct reproducible streams", "[sampling]") {
  CHECK(split_seed(7, 0) == split_seed(7, 0));
  CHECK(split_seed(7, 0) != split_seed(7, 1));
  CHECK(split_seed(7, 1) != split_seed(8, 1));
}

TEST_CASE("simulation validates its inputs", "[sampling]") {
  const InarModel model{InarCoefficients({0.5}), ParametricFamily(Poisson{1.0})};
  CHECK_THROWS_AS(simulate_inar(model, {0, 500, 1}), Error);
  CHECK_THROWS_AS(simulate_inar(model, {10, -1, 1}), Error);
}
