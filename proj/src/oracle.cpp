#include "fedgame/oracle.hpp"

#include <cmath>

#include "fedgame/logistic.hpp"
#include "fedgame/rng.hpp"

namespace fedgame {

void check_amounts(const AmountsVector& amounts, std::size_t n_platforms) {
  if (amounts.amounts.size() != n_platforms) {
    throw RuntimeFailure("amounts vector length does not match platform count");
  }
  if (amounts.target >= n_platforms) throw RuntimeFailure("amounts target out of range");
  for (std::size_t j = 0; j < n_platforms; ++j) {
    double v = amounts.amounts[j];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw RuntimeFailure("amounts entries must lie in [0, 1]");
    }
  }
  if (amounts.amounts[amounts.target] != 0.0) {
    throw RuntimeFailure("amounts self-entry must be zero");
  }
}

SyntheticOracle::SyntheticOracle(SyntheticOracleSpec spec, std::size_t n_platforms)
    : spec_(std::move(spec)), n_(n_platforms) {
  if (spec_.intercepts.size() != n_ || spec_.weights.size() != n_) {
    throw InvalidConfig("synthetic oracle needs intercepts and weights for every platform");
  }
  for (const auto& row : spec_.weights) {
    if (row.size() != n_) {
      throw InvalidConfig("synthetic oracle weight rows must have one entry per platform");
    }
  }
  if (spec_.noise_sigma < 0.0) throw InvalidConfig("noise_sigma must be >= 0");
  if (spec_.shape == ResponseShape::concave &&
      (spec_.concave_alpha <= 0.0 || spec_.concave_alpha > 1.0)) {
    throw InvalidConfig("concave_alpha must lie in (0, 1]");
  }
}

double SyntheticOracle::evaluate(const AmountsVector& amounts, std::uint64_t seed) const {
  check_amounts(amounts, n_);
  const PlatformId i = amounts.target;
  double value = spec_.intercepts[i];
  for (std::size_t j = 0; j < n_; ++j) {
    if (j == i) continue;
    double a = amounts.amounts[j];
    double g = spec_.shape == ResponseShape::linear
                   ? a
                   : (a == 0.0 ? 0.0 : std::pow(a, spec_.concave_alpha));
    value += spec_.weights[i][j] * g;
  }
  if (spec_.noise_sigma > 0.0) {
    Rng rng(derive_seed(seed, "synthetic-noise", {i}));
    value += spec_.noise_sigma * rng.next_normal();
  }
  return value;
}

VflTabularOracle::VflTabularOracle(VflTabularSpec spec, std::size_t n_platforms,
                                   std::uint64_t dataset_seed)
    : spec_(std::move(spec)),
      n_(n_platforms),
      pool_seed_(derive_seed(dataset_seed, "deposit-pool")) {
  if (const auto* gen = std::get_if<GeneratedDatasetSpec>(&spec_.source)) {
    data_ = generate_synthetic_dataset(*gen, n_, spec_.test_split);
  } else {
    data_ = load_csv_dataset(std::get<CsvDatasetSpec>(spec_.source), spec_.test_split,
                             dataset_seed);
  }
  if (data_.blocks.size() != n_) {
    throw InvalidConfig("dataset does not provide one feature block per platform");
  }
}

double VflTabularOracle::evaluate(const AmountsVector& amounts, std::uint64_t) const {
  check_amounts(amounts, n_);
  const PlatformId target = amounts.target;
  VerticalDataset masked = data_;
  for (std::size_t j = 0; j < n_; ++j) {
    if (j == target) continue;
    masked = mask_partner_block(masked, target, j, amounts.amounts[j],
                                derive_seed(pool_seed_, "pair", {target, j}),
                                spec_.mask_test_features);
  }
  LogisticTrainConfig config;
  config.epochs = spec_.train_epochs;
  config.learning_rate = spec_.learning_rate;
  config.metric = spec_.metric;
  return train_local_model(masked, target, config).metric;
}

std::unique_ptr<PerformanceOracle> make_oracle(const OracleSpec& spec, std::size_t n_platforms,
                                               std::uint64_t dataset_seed) {
  if (spec.kind == OracleKind::synthetic) {
    return std::make_unique<SyntheticOracle>(spec.synthetic, n_platforms);
  }
  return std::make_unique<VflTabularOracle>(spec.vfl_tabular, n_platforms, dataset_seed);
}

}  // namespace fedgame
