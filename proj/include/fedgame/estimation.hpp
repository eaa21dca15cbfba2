#pragma once

#include <cstdint>
#include <vector>

#include "fedgame/core.hpp"
#include "fedgame/oracle.hpp"

namespace fedgame {

// One deposit experiment: the amount combination fed to the oracle and the
// performance it measured.
struct PerformanceObservation {
  PlatformId target = 0;
  AmountsVector amounts;
  double metric = 0.0;
};

// Per-platform linear performance model: predicted metric is
// intercept + sum_j weights[j] * amounts[j], weights[target] fixed at zero.
struct RegressionModel {
  PlatformId target = 0;
  double intercept = 0.0;
  std::vector<double> weights;
  double residual_norm = 0.0;
  bool rank_deficient = false;
};

// K amount combinations for the target's deposit experiments, every partner
// entry uniform in [0, deposit_fraction]. Deterministic given the seed.
std::vector<AmountsVector> design_experiments(const EstimationConfig& config, PlatformId target,
                                              std::size_t n_platforms, std::uint64_t seed);

// Ordinary least squares over the observations. Rank-deficient designs yield
// the minimum-norm solution with rank_deficient set. Throws
// InsufficientObservations or MixedTargets.
RegressionModel fit_regression(const std::vector<PerformanceObservation>& observations);

double predict(const RegressionModel& model, const AmountsVector& amounts);

struct EstimationResult {
  std::vector<RegressionModel> models;              // one per platform
  std::vector<PerformanceObservation> observations;  // platform-major, K each
};

// Designs, runs and fits the deposit experiments for every platform.
// Oracle calls may run on `jobs` threads; the result is bit-identical to the
// sequential run.
EstimationResult run_estimation(const ValidatedScenario& scenario,
                                const PerformanceOracle& oracle, std::uint64_t seed,
                                std::size_t jobs = 1);

}  // namespace fedgame
