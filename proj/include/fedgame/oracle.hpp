#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fedgame/core.hpp"
#include "fedgame/dataset.hpp"

namespace fedgame {

// The partner data amounts (c_{1,i}, ..., c_{N,i}) flowing into `target`;
// amounts[target] is ignored and kept at zero.
struct AmountsVector {
  PlatformId target = 0;
  std::vector<double> amounts;

  bool operator==(const AmountsVector&) const = default;
};

// Throws RuntimeFailure if an entry is outside [0, 1] or the self-entry is
// nonzero.
void check_amounts(const AmountsVector& amounts, std::size_t n_platforms);

// Answers "what performance does the target platform get when partners
// contribute the given data amounts". Immutable after construction; evaluate
// is a pure function of (oracle, amounts, seed) and may be called from many
// threads.
class PerformanceOracle {
 public:
  virtual ~PerformanceOracle() = default;
  virtual std::size_t platform_count() const = 0;
  virtual double evaluate(const AmountsVector& amounts, std::uint64_t seed) const = 0;
};

// Closed form b_i + sum_j w[i][j] * g(amounts[j]) + sigma * normal(seed),
// g identity (linear) or x^alpha (concave). The noise draw depends only on
// (seed, target), so evaluations of different policies under one seed are
// paired.
class SyntheticOracle : public PerformanceOracle {
 public:
  SyntheticOracle(SyntheticOracleSpec spec, std::size_t n_platforms);
  std::size_t platform_count() const override { return n_; }
  double evaluate(const AmountsVector& amounts, std::uint64_t seed) const override;
  const SyntheticOracleSpec& spec() const { return spec_; }

 private:
  SyntheticOracleSpec spec_;
  std::size_t n_;
};

// Trains the target platform's logistic-regression classifier with each
// partner's feature block masked down to the requested fraction, returning
// the held-out metric. The sample order used for masking (the deposit pool)
// is drawn once per (target, partner) pair at construction, so every
// evaluation exposes nested prefixes of the same samples: a platform never
// reveals more than the largest fraction ever requested.
class VflTabularOracle : public PerformanceOracle {
 public:
  VflTabularOracle(VflTabularSpec spec, std::size_t n_platforms, std::uint64_t dataset_seed);
  std::size_t platform_count() const override { return n_; }
  double evaluate(const AmountsVector& amounts, std::uint64_t seed) const override;
  const VerticalDataset& dataset() const { return data_; }

 private:
  VflTabularSpec spec_;
  std::size_t n_;
  std::uint64_t pool_seed_;
  VerticalDataset data_;
};

std::unique_ptr<PerformanceOracle> make_oracle(const OracleSpec& spec, std::size_t n_platforms,
                                               std::uint64_t dataset_seed);

inline std::unique_ptr<PerformanceOracle> make_oracle(const ValidatedScenario& scenario) {
  return make_oracle(scenario.config.oracle, scenario.config.n_platforms,
                     scenario.config.master_seed);
}

}  // namespace fedgame
