#include <doctest.h>

#include <tuple>

#include "fedgame/core.hpp"

using namespace fedgame;

namespace {

ScenarioConfig basic_config(std::size_t n) {
  ScenarioConfig config;
  config.n_platforms = n;
  Budget b;
  b.total = 1.0;
  b.deposit_fraction = 0.05;
  b.count_deposit = true;
  config.budgets.assign(n, b);
  config.estimation.k = std::max<std::size_t>(5, n);
  config.oracle.synthetic.intercepts.assign(n, 0.5);
  config.oracle.synthetic.weights.assign(n, std::vector<double>(n, 0.1));
  return config;
}

}  // namespace

TEST_CASE("effective budget accounting") {
  Budget b{1.0, 0.05, true};
  CHECK(effective_budget(b, 3) == doctest::Approx(0.9).epsilon(1e-15));
  b.count_deposit = false;
  CHECK(effective_budget(b, 3) == 1.0);
  Budget small{0.08, 0.05, true};
  CHECK_THROWS_AS(effective_budget(small, 3), InvalidConfig);
}

TEST_CASE("validate_scenario computes effective budgets") {
  auto scenario = validate_scenario(basic_config(3));
  REQUIRE(scenario.effective_budgets.size() == 3);
  for (double e : scenario.effective_budgets) CHECK(e == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("zero budgets are a valid degenerate scenario") {
  auto config = basic_config(2);
  for (auto& b : config.budgets) {
    b.total = 0.0;
    b.deposit_fraction = 0.0;
  }
  // deposit_fraction 0 is below the estimation range; keep estimation legal.
  config.estimation.deposit_fraction = 0.05;
  auto scenario = validate_scenario(config);
  CHECK(scenario.effective_budgets == std::vector<double>{0.0, 0.0});
}

TEST_CASE("K below the unknown count is rejected") {
  auto config = basic_config(3);
  config.estimation.k = 2;
  CHECK_THROWS_WITH_AS(std::ignore = validate_scenario(config),
                       "estimation.k must be at least the regression unknown count (K >= N)",
                       InvalidConfig);
}

TEST_CASE("validation names the first violated invariant") {
  auto config = basic_config(3);
  config.game.eta = 0.0;
  CHECK_THROWS_WITH_AS(std::ignore = validate_scenario(config), "game.eta must be > 0",
                       InvalidConfig);
  config = basic_config(1);
  CHECK_THROWS_AS(std::ignore = validate_scenario(config), InvalidConfig);
  config = basic_config(3);
  config.budgets.pop_back();
  CHECK_THROWS_AS(std::ignore = validate_scenario(config), InvalidConfig);
}

TEST_CASE("validate_scenario is idempotent") {
  auto config = basic_config(4);
  auto once = validate_scenario(config);
  auto twice = validate_scenario(once.config);
  CHECK(once.effective_budgets == twice.effective_budgets);
  CHECK(once.config.n_platforms == twice.config.n_platforms);
  CHECK(once.config.budgets.size() == twice.config.budgets.size());
}

TEST_CASE("quota matrix rows and columns") {
  QuotaMatrix m(3);
  m.at(0, 1) = 0.4;
  m.at(0, 2) = 0.5;
  m.at(2, 0) = 0.7;
  auto row = m.row_policy(0);
  CHECK(row.owner == 0);
  CHECK(row.quotas == std::vector<double>{0.0, 0.4, 0.5});
  CHECK(m.incoming(0) == std::vector<double>{0.0, 0.0, 0.7});

  std::vector<double> budgets = {0.9, 0.9, 0.9};
  CHECK_NOTHROW(check_quota_matrix(m, budgets));
  m.at(1, 1) = 0.1;  // diagonal violation
  CHECK_THROWS_AS(check_quota_matrix(m, budgets), RuntimeFailure);
  m.at(1, 1) = 0.0;
  m.at(1, 0) = 1.0;  // row sum violation
  CHECK_THROWS_AS(check_quota_matrix(m, budgets), RuntimeFailure);
}
