#include <doctest.h>

#include <cmath>
#include <set>

#include "fedgame/linalg.hpp"
#include "fedgame/rng.hpp"

using namespace fedgame;

TEST_CASE("derive_seed separates labels and parts") {
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a", {0}) != derive_seed(1, "a", {1}));
  CHECK(derive_seed(1, "a", {0, 1}) != derive_seed(1, "a", {1, 0}));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
}

TEST_CASE("rng streams are deterministic and in range") {
  Rng a(1234), b(1234);
  for (int i = 0; i < 100; ++i) {
    double u = a.next_unit();
    CHECK(u == b.next_unit());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  Rng c(77);
  for (int i = 0; i < 100; ++i) {
    auto v = c.next_below(13);
    CHECK(v < 13);
  }
}

TEST_CASE("permutation covers every index") {
  Rng rng(9);
  auto p = rng.permutation(37);
  std::set<std::size_t> seen(p.begin(), p.end());
  CHECK(seen.size() == 37);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 36);
}

TEST_CASE("normal draws have sane moments") {
  Rng rng(5);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double x = rng.next_normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

namespace {

double rss(const Matrix& x, const std::vector<double>& y, const std::vector<double>& beta) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    double pred = 0.0;
    for (std::size_t j = 0; j < x.cols; ++j) pred += x(i, j) * beta[j];
    total += (y[i] - pred) * (y[i] - pred);
  }
  return total;
}

}  // namespace

TEST_CASE("least squares recovers an exact linear system") {
  Matrix x(5, 3);
  std::vector<double> truth = {0.5, 0.2, 0.3};
  std::vector<double> y(5);
  Rng rng(42);
  for (std::size_t i = 0; i < 5; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rng.next_unit();
    x(i, 2) = rng.next_unit();
    y[i] = truth[0] * x(i, 0) + truth[1] * x(i, 1) + truth[2] * x(i, 2);
  }
  auto sol = solve_least_squares(x, y);
  CHECK(!sol.rank_deficient);
  CHECK(sol.rank == 3);
  for (std::size_t j = 0; j < 3; ++j) CHECK(sol.coefficients[j] == doctest::Approx(truth[j]).epsilon(1e-12));
  CHECK(sol.residual_norm < 1e-12);
}

TEST_CASE("least squares is optimal: perturbing coefficients never lowers RSS") {
  Rng rng(7);
  Matrix x(12, 4);
  std::vector<double> y(12);
  for (std::size_t i = 0; i < 12; ++i) {
    x(i, 0) = 1.0;
    for (std::size_t j = 1; j < 4; ++j) x(i, j) = rng.next_uniform(-1.0, 1.0);
    y[i] = rng.next_uniform(0.0, 2.0);
  }
  auto sol = solve_least_squares(x, y);
  double base = rss(x, y, sol.coefficients);
  for (std::size_t j = 0; j < 4; ++j) {
    for (double d : {-1e-3, 1e-3}) {
      auto perturbed = sol.coefficients;
      perturbed[j] += d;
      CHECK(rss(x, y, perturbed) >= base - 1e-12);
    }
  }
}

TEST_CASE("rank-deficient systems return the minimum-norm solution") {
  // Two identical columns: the minimum-norm solution splits the weight.
  Matrix x(4, 3);
  std::vector<double> y(4);
  Rng rng(3);
  for (std::size_t i = 0; i < 4; ++i) {
    x(i, 0) = 1.0;
    double v = rng.next_unit();
    x(i, 1) = v;
    x(i, 2) = v;
    y[i] = 0.1 + 0.6 * v;
  }
  auto sol = solve_least_squares(x, y);
  CHECK(sol.rank_deficient);
  CHECK(sol.rank == 2);
  CHECK(sol.coefficients[1] == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(sol.coefficients[2] == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(sol.residual_norm < 1e-12);
}

TEST_CASE("least squares handles overdetermined noisy systems") {
  Rng rng(11);
  Matrix x(50, 2);
  std::vector<double> y(50);
  for (std::size_t i = 0; i < 50; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rng.next_unit();
    y[i] = 1.0 + 2.0 * x(i, 1) + 0.01 * rng.next_normal();
  }
  auto sol = solve_least_squares(x, y);
  CHECK(sol.coefficients[0] == doctest::Approx(1.0).epsilon(0.02));
  CHECK(sol.coefficients[1] == doctest::Approx(2.0).epsilon(0.02));
  CHECK(sol.residual_norm > 0.0);
}
