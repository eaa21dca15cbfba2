#include <doctest.h>

#include <atomic>
#include <cmath>

#include "fedgame/estimation.hpp"
#include "fedgame/rng.hpp"

using namespace fedgame;

namespace {

ValidatedScenario linear_scenario(double noise = 0.0) {
  ScenarioConfig config;
  config.n_platforms = 3;
  config.budgets.assign(3, Budget{1.0, 0.05, true});
  config.estimation.k = 5;
  config.estimation.deposit_fraction = 0.05;
  config.oracle.synthetic.intercepts = {0.5, 0.6, 0.45};
  config.oracle.synthetic.weights = {{0.0, 0.2, 0.3}, {0.4, 0.0, 0.25}, {0.15, 0.35, 0.0}};
  config.oracle.synthetic.noise_sigma = noise;
  config.master_seed = 11;
  return validate_scenario(config);
}

// Counts evaluate() calls on behalf of a wrapped oracle.
class CountingOracle : public PerformanceOracle {
 public:
  explicit CountingOracle(const PerformanceOracle& inner) : inner_(inner) {}
  std::size_t platform_count() const override { return inner_.platform_count(); }
  double evaluate(const AmountsVector& amounts, std::uint64_t seed) const override {
    ++calls;
    return inner_.evaluate(amounts, seed);
  }
  mutable std::atomic<std::size_t> calls{0};

 private:
  const PerformanceOracle& inner_;
};

PerformanceObservation obs(PlatformId target, std::vector<double> amounts, double metric) {
  PerformanceObservation o;
  o.target = target;
  o.amounts = AmountsVector{target, std::move(amounts)};
  o.metric = metric;
  return o;
}

double rss_of(const std::vector<PerformanceObservation>& observations,
              const RegressionModel& model) {
  double total = 0.0;
  for (const auto& o : observations) {
    double r = o.metric - predict(model, o.amounts);
    total += r * r;
  }
  return total;
}

}  // namespace

TEST_CASE("design anchors the first point and stays inside the deposit") {
  EstimationConfig config;
  config.k = 5;
  config.deposit_fraction = 0.05;
  auto design = design_experiments(config, 0, 3, 31);
  REQUIRE(design.size() == 5);
  CHECK(design[0].amounts == std::vector<double>{0.0, 0.0, 0.0});
  for (const auto& point : design) {
    CHECK(point.amounts[0] == 0.0);  // self entry
    for (double a : point.amounts) {
      CHECK(a >= 0.0);
      CHECK(a <= 0.05);
    }
  }
  CHECK(design_experiments(config, 0, 3, 31) == design);  // deterministic

  config.sampling = SamplingRule::uniform;
  auto unanchored = design_experiments(config, 0, 3, 31);
  bool first_zero = true;
  for (double a : unanchored[0].amounts) first_zero = first_zero && a == 0.0;
  CHECK(!first_zero);
}

TEST_CASE("fit recovers exact linear coefficients") {
  std::vector<PerformanceObservation> observations;
  const double pts[5][2] = {{0.0, 0.0}, {0.01, 0.04}, {0.03, 0.01}, {0.05, 0.05}, {0.02, 0.03}};
  for (auto& p : pts) {
    observations.push_back(obs(0, {0.0, p[0], p[1]}, 0.5 + 0.2 * p[0] + 0.3 * p[1]));
  }
  auto model = fit_regression(observations);
  CHECK(model.target == 0);
  CHECK(model.intercept == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(model.weights[0] == 0.0);
  CHECK(model.weights[1] == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(model.weights[2] == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(model.residual_norm < 1e-9);
  CHECK(!model.rank_deficient);
}

TEST_CASE("constant responses fit a flat model") {
  std::vector<PerformanceObservation> observations;
  Rng rng(3);
  for (int k = 0; k < 5; ++k) {
    observations.push_back(obs(1, {rng.next_unit(), 0.0, rng.next_unit()}, 0.7));
  }
  auto model = fit_regression(observations);
  CHECK(model.intercept == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(std::abs(model.weights[0]) < 1e-9);
  CHECK(std::abs(model.weights[2]) < 1e-9);
}

TEST_CASE("underdetermined and mixed-target inputs are rejected") {
  std::vector<PerformanceObservation> two = {obs(0, {0.0, 0.1, 0.2}, 0.5),
                                             obs(0, {0.0, 0.2, 0.1}, 0.6)};
  CHECK_THROWS_AS(fit_regression(two), InsufficientObservations);

  std::vector<PerformanceObservation> mixed = {
      obs(0, {0.0, 0.1, 0.2}, 0.5), obs(1, {0.1, 0.0, 0.2}, 0.6), obs(0, {0.0, 0.3, 0.1}, 0.7)};
  CHECK_THROWS_AS(fit_regression(mixed), MixedTargets);
  CHECK_THROWS_AS(fit_regression({}), InsufficientObservations);
}

TEST_CASE("degenerate designs fall back to the minimum-norm fit") {
  // The same point three times plus anchors: partner columns are collinear.
  std::vector<PerformanceObservation> observations = {
      obs(0, {0.0, 0.02, 0.02}, 0.54), obs(0, {0.0, 0.02, 0.02}, 0.54),
      obs(0, {0.0, 0.02, 0.02}, 0.54), obs(0, {0.0, 0.0, 0.0}, 0.5)};
  auto model = fit_regression(observations);
  CHECK(model.rank_deficient);
  // Minimum-norm splits the slope evenly across the identical columns.
  CHECK(model.weights[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(model.weights[2] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(model.residual_norm < 1e-9);
}

TEST_CASE("predict evaluates the affine model") {
  RegressionModel model;
  model.target = 0;
  model.intercept = 0.5;
  model.weights = {0.0, 0.2, 0.3};
  CHECK(predict(model, AmountsVector{0, {0.0, 0.0, 0.0}}) == 0.5);
  CHECK(predict(model, AmountsVector{0, {0.0, 1.0, 1.0}}) == doctest::Approx(1.0).epsilon(1e-12));

  RegressionModel flat;
  flat.target = 1;
  flat.intercept = 0.8;
  flat.weights = {0.0, 0.0, 0.0};
  CHECK(predict(flat, AmountsVector{1, {0.4, 0.0, 0.9}}) == 0.8);
}

TEST_CASE("predict is affine in the amounts") {
  RegressionModel model;
  model.target = 2;
  model.intercept = 0.4;
  model.weights = {0.25, 0.1, 0.0};
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    AmountsVector a{2, {rng.next_unit(), rng.next_unit(), 0.0}};
    AmountsVector b{2, {rng.next_unit(), rng.next_unit(), 0.0}};
    AmountsVector sum{2, {a.amounts[0] + b.amounts[0], a.amounts[1] + b.amounts[1], 0.0}};
    AmountsVector zero{2, {0.0, 0.0, 0.0}};
    double lhs = predict(model, a) + predict(model, b) - predict(model, zero);
    CHECK(lhs == doctest::Approx(predict(model, sum)).epsilon(1e-12));
  }
}

TEST_CASE("estimation on a noise-free linear oracle recovers the truth") {
  auto scenario = linear_scenario();
  SyntheticOracle oracle(scenario.config.oracle.synthetic, 3);
  auto result = run_estimation(scenario, oracle, 99);
  REQUIRE(result.models.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(result.models[i].intercept - scenario.config.oracle.synthetic.intercepts[i]) <
          1e-8);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(result.models[i].weights[j] -
                     scenario.config.oracle.synthetic.weights[i][j]) < 1e-8);
    }
  }
}

TEST_CASE("estimation runs exactly K experiments per platform") {
  auto scenario = linear_scenario();
  SyntheticOracle inner(scenario.config.oracle.synthetic, 3);
  CountingOracle oracle(inner);
  auto result = run_estimation(scenario, oracle, 5);
  CHECK(oracle.calls == 15);  // N=3 platforms, K=5 each
  CHECK(result.observations.size() == 15);
}

TEST_CASE("parallel estimation is bit-identical to sequential") {
  auto scenario = linear_scenario(0.01);
  SyntheticOracle oracle(scenario.config.oracle.synthetic, 3);
  auto seq = run_estimation(scenario, oracle, 123, 1);
  auto par = run_estimation(scenario, oracle, 123, 4);
  REQUIRE(seq.models.size() == par.models.size());
  for (std::size_t i = 0; i < seq.models.size(); ++i) {
    CHECK(seq.models[i].intercept == par.models[i].intercept);
    CHECK(seq.models[i].weights == par.models[i].weights);
  }
  for (std::size_t i = 0; i < seq.observations.size(); ++i) {
    CHECK(seq.observations[i].metric == par.observations[i].metric);
  }
}

TEST_CASE("fitted coefficients are a local optimum of the squared error") {
  auto scenario = linear_scenario(0.02);
  SyntheticOracle oracle(scenario.config.oracle.synthetic, 3);
  auto result = run_estimation(scenario, oracle, 7);
  for (std::size_t p = 0; p < 3; ++p) {
    std::vector<PerformanceObservation> observations(
        result.observations.begin() + static_cast<std::ptrdiff_t>(p * 5),
        result.observations.begin() + static_cast<std::ptrdiff_t>((p + 1) * 5));
    const auto& model = result.models[p];
    double base = rss_of(observations, model);
    for (double d : {-1e-3, 1e-3}) {
      RegressionModel tweaked = model;
      tweaked.intercept += d;
      CHECK(rss_of(observations, tweaked) >= base - 1e-12);
      for (std::size_t j = 0; j < 3; ++j) {
        if (j == p) continue;
        tweaked = model;
        tweaked.weights[j] += d;
        CHECK(rss_of(observations, tweaked) >= base - 1e-12);
      }
    }
  }
}
