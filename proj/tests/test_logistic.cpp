#include <doctest.h>

#include <cmath>

#include "fedgame/logistic.hpp"
#include "fedgame/rng.hpp"

using namespace fedgame;

namespace {

// Brute-force separability oracle: a fixed separator classifies every row
// with positive margin.
bool linearly_separable(const Matrix& x, const std::vector<int>& labels, double w0, double w1,
                        double bias, double margin) {
  for (std::size_t i = 0; i < x.rows; ++i) {
    double score = w0 * x(i, 0) + w1 * x(i, 1) + bias;
    if (labels[i] == 1 && score < margin) return false;
    if (labels[i] == 0 && score > -margin) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("separable data reaches training accuracy 1.0") {
  Rng rng(8);
  Matrix x(120, 2);
  std::vector<int> labels(120);
  std::vector<std::size_t> rows(120);
  for (std::size_t i = 0; i < 120; ++i) {
    rows[i] = i;
    double a = rng.next_uniform(-1.0, 1.0);
    double b = rng.next_uniform(-1.0, 1.0);
    double s = a + b;
    // Margin of 0.2 around the separator.
    if (std::abs(s) < 0.2) s = s < 0 ? s - 0.2 : s + 0.2;
    x(i, 0) = a;
    x(i, 1) = s - a;
    labels[i] = s > 0 ? 1 : 0;
  }
  REQUIRE(linearly_separable(x, labels, 1.0, 1.0, 0.0, 0.19));

  auto model = train_logistic(x, labels, rows, 2, 200, 1.0);
  CHECK(accuracy_metric(model, x, labels, rows) == 1.0);
}

TEST_CASE("constant features predict the majority class") {
  Matrix x(40, 2, 1.0);  // all-constant features
  std::vector<int> labels(40, 0);
  std::vector<std::size_t> train, test;
  for (std::size_t i = 0; i < 40; ++i) {
    labels[i] = (i % 4 == 0) ? 1 : 0;  // 25% positives
    (i < 28 ? train : test).push_back(i);
  }
  auto model = train_logistic(x, labels, train, 2, 300, 0.5);
  // Majority class in train is 0; the metric equals the rate of that class.
  std::size_t zeros = 0;
  for (std::size_t i : test) zeros += labels[i] == 0;
  double majority_rate = static_cast<double>(zeros) / static_cast<double>(test.size());
  CHECK(accuracy_metric(model, x, labels, test) == doctest::Approx(majority_rate).epsilon(1e-9));
}

TEST_CASE("multinomial training separates three classes") {
  Rng rng(12);
  Matrix x(150, 2);
  std::vector<int> labels(150);
  std::vector<std::size_t> rows(150);
  const double centers[3][2] = {{2.0, 0.0}, {-2.0, 2.0}, {-2.0, -2.0}};
  for (std::size_t i = 0; i < 150; ++i) {
    rows[i] = i;
    int c = static_cast<int>(i % 3);
    labels[i] = c;
    x(i, 0) = centers[c][0] + 0.3 * rng.next_normal();
    x(i, 1) = centers[c][1] + 0.3 * rng.next_normal();
  }
  auto model = train_logistic(x, labels, rows, 3, 250, 1.0);
  CHECK(accuracy_metric(model, x, labels, rows) >= 0.98);
}

TEST_CASE("perfect predictions give AUC 1.0") {
  Matrix x(10, 1);
  std::vector<int> labels(10);
  std::vector<std::size_t> rows(10);
  for (std::size_t i = 0; i < 10; ++i) {
    rows[i] = i;
    labels[i] = i < 5 ? 0 : 1;
    x(i, 0) = labels[i] == 1 ? 3.0 : -3.0;
  }
  auto model = train_logistic(x, labels, rows, 2, 300, 1.0);
  CHECK(auc_metric(model, x, labels, rows) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("uninformative scores give AUC one half") {
  Matrix x(30, 1, 0.5);  // constant feature: identical scores for everyone
  std::vector<int> labels(30);
  std::vector<std::size_t> rows(30);
  for (std::size_t i = 0; i < 30; ++i) {
    rows[i] = i;
    labels[i] = i % 2;
  }
  auto model = train_logistic(x, labels, rows, 2, 50, 0.5);
  CHECK(auc_metric(model, x, labels, rows) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("degenerate label splits are rejected") {
  Matrix x(10, 1, 1.0);
  std::vector<int> labels(10, 1);
  std::vector<std::size_t> rows(10);
  for (std::size_t i = 0; i < 10; ++i) rows[i] = i;
  CHECK_THROWS_AS(train_logistic(x, labels, rows, 2, 10, 0.5), DegenerateLabels);

  labels[0] = 0;
  auto model = train_logistic(x, labels, rows, 2, 10, 0.5);
  std::vector<std::size_t> one_class_rows = {1, 2, 3};
  CHECK_THROWS_AS(auc_metric(model, x, labels, one_class_rows), DegenerateLabels);
}

TEST_CASE("divergent training reports OracleFailure") {
  Matrix x(4, 1);
  std::vector<int> labels = {0, 1, 0, 1};
  std::vector<std::size_t> rows = {0, 1, 2, 3};
  for (std::size_t i = 0; i < 4; ++i) x(i, 0) = (i % 2 ? 1.0 : -1.0) * 1e150;
  CHECK_THROWS_AS(train_logistic(x, labels, rows, 2, 400, 1e280), OracleFailure);
}

TEST_CASE("train_local_model concatenates every block") {
  GeneratedDatasetSpec gen;
  gen.n_samples = 400;
  gen.features_per_block = 3;
  // Platform 0's labels depend on both blocks; with the partner block zeroed
  // the metric should drop.
  gen.signal = {{1.0, 2.5}, {0.0, 2.0}};
  auto ds = generate_synthetic_dataset(gen, 2, 0.25);
  LogisticTrainConfig config;
  config.epochs = 200;
  config.learning_rate = 0.5;
  auto full = train_local_model(ds, 0, config);
  auto masked = mask_partner_block(ds, 0, 1, 0.0, 3);
  auto local = train_local_model(masked, 0, config);
  CHECK(full.metric > local.metric);
}
