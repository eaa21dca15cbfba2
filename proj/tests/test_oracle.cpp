#include <doctest.h>

#include <cmath>

#include "fedgame/oracle.hpp"
#include "fedgame/rng.hpp"

using namespace fedgame;

namespace {

SyntheticOracleSpec linear_spec() {
  SyntheticOracleSpec spec;
  spec.intercepts = {0.5, 0.6, 0.4};
  spec.weights = {{0.0, 0.2, 0.3}, {0.1, 0.0, 0.2}, {0.4, 0.1, 0.0}};
  return spec;
}

}  // namespace

TEST_CASE("synthetic oracle returns the intercept at zero amounts") {
  SyntheticOracle oracle(linear_spec(), 3);
  CHECK(oracle.evaluate(AmountsVector{0, {0.0, 0.0, 0.0}}, 1) == 0.5);
}

TEST_CASE("synthetic oracle evaluates the closed form") {
  SyntheticOracle oracle(linear_spec(), 3);
  // 0.5 + 0.2 * 0.5 + 0.3 * 1.0
  CHECK(oracle.evaluate(AmountsVector{0, {0.0, 0.5, 1.0}}, 1) ==
        doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("synthetic evaluate is a pure function of oracle, amounts and seed") {
  auto spec = linear_spec();
  spec.noise_sigma = 0.02;
  SyntheticOracle oracle(spec, 3);
  AmountsVector amounts{1, {0.3, 0.0, 0.7}};
  double a = oracle.evaluate(amounts, 123);
  double b = oracle.evaluate(amounts, 123);
  CHECK(a == b);  // bit identical
  CHECK(oracle.evaluate(amounts, 124) != a);
}

TEST_CASE("noise-free linear oracle satisfies superposition") {
  SyntheticOracle oracle(linear_spec(), 3);
  AmountsVector zero{0, {0.0, 0.0, 0.0}};
  AmountsVector a{0, {0.0, 0.4, 0.0}};
  AmountsVector b{0, {0.0, 0.0, 0.6}};
  AmountsVector ab{0, {0.0, 0.4, 0.6}};
  double base = oracle.evaluate(zero, 7);
  double lhs = oracle.evaluate(ab, 7) - base;
  double rhs = (oracle.evaluate(a, 7) - base) + (oracle.evaluate(b, 7) - base);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("concave shape applies the power response") {
  auto spec = linear_spec();
  spec.shape = ResponseShape::concave;
  spec.concave_alpha = 0.5;
  SyntheticOracle oracle(spec, 3);
  double v = oracle.evaluate(AmountsVector{0, {0.0, 0.25, 0.0}}, 1);
  CHECK(v == doctest::Approx(0.5 + 0.2 * 0.5).epsilon(1e-12));  // sqrt(0.25)
}

TEST_CASE("amounts outside the unit interval are rejected") {
  SyntheticOracle oracle(linear_spec(), 3);
  CHECK_THROWS_AS(oracle.evaluate(AmountsVector{0, {0.0, 1.2, 0.0}}, 1), RuntimeFailure);
  CHECK_THROWS_AS(oracle.evaluate(AmountsVector{0, {0.0, -0.1, 0.0}}, 1), RuntimeFailure);
  CHECK_THROWS_AS(oracle.evaluate(AmountsVector{0, {0.5, 0.0, 0.0}}, 1), RuntimeFailure);
}

TEST_CASE("vfl oracle: pure-noise partners leave the metric flat") {
  // Averaged over five generated datasets; each platform's labels depend only
  // on its own block.
  double gap = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GeneratedDatasetSpec gen;
    gen.n_samples = 600;
    gen.features_per_block = 4;
    gen.signal = {{2.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, {0.0, 0.0, 2.0}};
    gen.data_seed = 5 + seed;
    VflTabularSpec spec;
    spec.source = gen;
    spec.train_epochs = 150;
    spec.learning_rate = 0.5;
    spec.test_split = 0.25;
    VflTabularOracle oracle(spec, 3, 1);
    double with = oracle.evaluate(AmountsVector{0, {0.0, 1.0, 1.0}}, 0);
    double without = oracle.evaluate(AmountsVector{0, {0.0, 0.0, 0.0}}, 0);
    gap += with - without;
  }
  CHECK(std::abs(gap / 5.0) < 0.03);
}

TEST_CASE("vfl oracle is deterministic given the seed") {
  GeneratedDatasetSpec gen;
  gen.n_samples = 300;
  gen.features_per_block = 3;
  gen.signal = {{1.5, 1.0}, {1.0, 1.5}};
  VflTabularSpec spec;
  spec.source = gen;
  spec.train_epochs = 80;
  VflTabularOracle oracle(spec, 2, 9);
  AmountsVector amounts{0, {0.0, 0.5}};
  CHECK(oracle.evaluate(amounts, 42) == oracle.evaluate(amounts, 42));
}
