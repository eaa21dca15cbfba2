#pragma once

#include <span>
#include <vector>

#include "fedgame/core.hpp"
#include "fedgame/dataset.hpp"
#include "fedgame/matrix.hpp"

namespace fedgame {

// Multinomial logistic regression, full-batch gradient descent, zero init.
// Deterministic: no shuffling, no stochastic layers.
struct LogisticModel {
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  std::vector<double> weights;  // n_classes x (n_features + 1), bias last

  std::vector<double> logits(std::span<const double> features) const;
  int predict(std::span<const double> features) const;
  // P(class 1); binary models only.
  double positive_probability(std::span<const double> features) const;
};

struct LogisticTrainConfig {
  std::size_t epochs = 300;
  double learning_rate = 0.5;
  MetricKind metric = MetricKind::accuracy;
};

// Throws DegenerateLabels if the training rows hold a single class and
// OracleFailure if the loss turns non-finite.
LogisticModel train_logistic(const Matrix& x, const std::vector<int>& labels,
                             const std::vector<std::size_t>& rows, int n_classes,
                             std::size_t epochs, double learning_rate);

double accuracy_metric(const LogisticModel& model, const Matrix& x,
                       const std::vector<int>& labels, const std::vector<std::size_t>& rows);

// Rank-based AUC with average ranks for ties; binary labels only. Throws
// DegenerateLabels when the rows hold a single class.
double auc_metric(const LogisticModel& model, const Matrix& x, const std::vector<int>& labels,
                  const std::vector<std::size_t>& rows);

struct TrainResult {
  LogisticModel model;
  double metric = 0.0;
  double train_accuracy = 0.0;
};

// Trains the target platform's classifier on the concatenation of its own
// block and all (possibly masked) partner blocks; reports the held-out
// metric.
TrainResult train_local_model(const VerticalDataset& dataset, PlatformId target,
                              const LogisticTrainConfig& config);

}  // namespace fedgame
