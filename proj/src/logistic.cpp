#include "fedgame/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fedgame {

std::vector<double> LogisticModel::logits(std::span<const double> features) const {
  std::vector<double> z(n_classes, 0.0);
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double* w = weights.data() + c * (n_features + 1);
    double s = w[n_features];  // bias
    for (std::size_t f = 0; f < n_features; ++f) s += w[f] * features[f];
    z[c] = s;
  }
  return z;
}

int LogisticModel::predict(std::span<const double> features) const {
  auto z = logits(features);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

double LogisticModel::positive_probability(std::span<const double> features) const {
  auto z = logits(features);
  double m = std::max(z[0], z[1]);
  double e0 = std::exp(z[0] - m);
  double e1 = std::exp(z[1] - m);
  return e1 / (e0 + e1);
}

LogisticModel train_logistic(const Matrix& x, const std::vector<int>& labels,
                             const std::vector<std::size_t>& rows, int n_classes,
                             std::size_t epochs, double learning_rate) {
  if (rows.empty()) throw DegenerateLabels("empty training split");
  int first = labels[rows[0]];
  bool multi = false;
  for (std::size_t i : rows) {
    if (labels[i] != first) {
      multi = true;
      break;
    }
  }
  if (!multi) throw DegenerateLabels("training split holds a single class");

  const std::size_t d = x.cols;
  const std::size_t k = static_cast<std::size_t>(n_classes);
  const std::size_t stride = d + 1;
  LogisticModel model;
  model.n_features = d;
  model.n_classes = k;
  model.weights.assign(k * stride, 0.0);

  const double inv_n = 1.0 / static_cast<double>(rows.size());
  std::vector<double> grad(k * stride);
  std::vector<double> prob(k);
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t i : rows) {
      auto features = x.row(i);
      auto z = model.logits(features);
      double m = *std::max_element(z.begin(), z.end());
      double denom = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        prob[c] = std::exp(z[c] - m);
        denom += prob[c];
      }
      for (std::size_t c = 0; c < k; ++c) prob[c] /= denom;
      const int y = labels[i];
      loss -= std::log(std::max(prob[static_cast<std::size_t>(y)], 1e-300));
      for (std::size_t c = 0; c < k; ++c) {
        double delta = prob[c] - (static_cast<int>(c) == y ? 1.0 : 0.0);
        double* g = grad.data() + c * stride;
        for (std::size_t f = 0; f < d; ++f) g[f] += delta * features[f];
        g[d] += delta;
      }
    }
    if (!std::isfinite(loss)) throw OracleFailure("logistic training loss is non-finite");
    for (std::size_t j = 0; j < grad.size(); ++j) {
      model.weights[j] -= learning_rate * grad[j] * inv_n;
    }
  }
  for (double w : model.weights) {
    if (!std::isfinite(w)) throw OracleFailure("logistic weights are non-finite");
  }
  return model;
}

double accuracy_metric(const LogisticModel& model, const Matrix& x,
                       const std::vector<int>& labels, const std::vector<std::size_t>& rows) {
  if (rows.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i : rows) {
    if (model.predict(x.row(i)) == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

double auc_metric(const LogisticModel& model, const Matrix& x, const std::vector<int>& labels,
                  const std::vector<std::size_t>& rows) {
  if (model.n_classes != 2) throw DegenerateLabels("AUC requires binary labels");
  std::vector<std::pair<double, int>> scored;
  scored.reserve(rows.size());
  std::size_t n_pos = 0;
  for (std::size_t i : rows) {
    scored.emplace_back(model.positive_probability(x.row(i)), labels[i]);
    if (labels[i] == 1) ++n_pos;
  }
  std::size_t n_neg = scored.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DegenerateLabels("AUC split holds a single class");

  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  // Sum of positive ranks with average ranks for tied scores.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < scored.size()) {
    std::size_t j = i;
    while (j < scored.size() && scored[j].first == scored[i].first) ++j;
    double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t t = i; t < j; ++t) {
      if (scored[t].second == 1) rank_sum += avg_rank;
    }
    i = j;
  }
  double pos = static_cast<double>(n_pos);
  double neg = static_cast<double>(n_neg);
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

TrainResult train_local_model(const VerticalDataset& dataset, PlatformId target,
                              const LogisticTrainConfig& config) {
  std::size_t total_features = 0;
  for (const auto& block : dataset.blocks) total_features += block.cols;
  Matrix x(dataset.n_samples, total_features);
  std::size_t offset = 0;
  for (const auto& block : dataset.blocks) {
    for (std::size_t i = 0; i < dataset.n_samples; ++i) {
      auto src = block.row(i);
      std::copy(src.begin(), src.end(), x.row(i).begin() + static_cast<std::ptrdiff_t>(offset));
    }
    offset += block.cols;
  }

  const auto& labels = dataset.labels[target];
  TrainResult out;
  out.model = train_logistic(x, labels, dataset.train_index, dataset.n_classes[target],
                             config.epochs, config.learning_rate);
  out.train_accuracy = accuracy_metric(out.model, x, labels, dataset.train_index);
  out.metric = config.metric == MetricKind::accuracy
                   ? accuracy_metric(out.model, x, labels, dataset.test_index)
                   : auc_metric(out.model, x, labels, dataset.test_index);
  return out;
}

}  // namespace fedgame
