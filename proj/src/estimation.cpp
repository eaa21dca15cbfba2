#include "fedgame/estimation.hpp"

#include <string>

#include "fedgame/linalg.hpp"
#include "fedgame/parallel.hpp"
#include "fedgame/rng.hpp"

namespace fedgame {

std::vector<AmountsVector> design_experiments(const EstimationConfig& config, PlatformId target,
                                              std::size_t n_platforms, std::uint64_t seed) {
  std::vector<AmountsVector> design;
  design.reserve(config.k);
  for (std::size_t k = 0; k < config.k; ++k) {
    AmountsVector v;
    v.target = target;
    v.amounts.assign(n_platforms, 0.0);
    if (k == 0 && config.sampling == SamplingRule::uniform_with_anchor) {
      design.push_back(std::move(v));  // all-zeros anchor pins the intercept
      continue;
    }
    Rng rng(derive_seed(seed, "design-point", {target, k * config.seed_stride}));
    for (std::size_t j = 0; j < n_platforms; ++j) {
      if (j == target) continue;
      v.amounts[j] = rng.next_unit() * config.deposit_fraction;
    }
    design.push_back(std::move(v));
  }
  return design;
}

RegressionModel fit_regression(const std::vector<PerformanceObservation>& observations) {
  if (observations.empty()) throw InsufficientObservations("no observations");
  const PlatformId target = observations[0].target;
  const std::size_t n = observations[0].amounts.amounts.size();
  for (const auto& obs : observations) {
    if (obs.target != target || obs.amounts.target != target) {
      throw MixedTargets("observations span multiple target platforms");
    }
    if (obs.amounts.amounts.size() != n) {
      throw MixedTargets("observations disagree on platform count");
    }
  }
  // Unknowns: intercept + one weight per partner.
  if (observations.size() < n) {
    throw InsufficientObservations("need at least " + std::to_string(n) +
                                   " observations, got " + std::to_string(observations.size()));
  }

  Matrix x(observations.size(), n);
  std::vector<double> y(observations.size());
  for (std::size_t k = 0; k < observations.size(); ++k) {
    x(k, 0) = 1.0;
    std::size_t col = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == target) continue;
      x(k, col++) = observations[k].amounts.amounts[j];
    }
    y[k] = observations[k].metric;
  }

  auto sol = solve_least_squares(x, y);
  RegressionModel model;
  model.target = target;
  model.intercept = sol.coefficients[0];
  model.weights.assign(n, 0.0);
  std::size_t col = 1;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == target) continue;
    model.weights[j] = sol.coefficients[col++];
  }
  model.residual_norm = sol.residual_norm;
  model.rank_deficient = sol.rank_deficient;
  return model;
}

double predict(const RegressionModel& model, const AmountsVector& amounts) {
  double value = model.intercept;
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    if (j == model.target) continue;
    value += model.weights[j] * amounts.amounts[j];
  }
  return value;
}

EstimationResult run_estimation(const ValidatedScenario& scenario,
                                const PerformanceOracle& oracle, std::uint64_t seed,
                                std::size_t jobs) {
  const std::size_t n = scenario.n();
  const EstimationConfig& config = scenario.config.estimation;
  const std::size_t k = config.k;

  EstimationResult out;
  out.observations.resize(n * k);
  for (std::size_t p = 0; p < n; ++p) {
    auto design = design_experiments(config, p, n, derive_seed(seed, "design", {p}));
    for (std::size_t e = 0; e < k; ++e) {
      auto& obs = out.observations[p * k + e];
      obs.target = p;
      obs.amounts = std::move(design[e]);
    }
  }

  // Every oracle evaluation is independent; seeds depend only on indices.
  parallel_for(n * k, jobs, [&](std::size_t idx) {
    auto& obs = out.observations[idx];
    const std::size_t p = idx / k;
    const std::size_t e = idx % k;
    std::uint64_t eval_seed = derive_seed(seed, "experiment", {p, e * config.seed_stride});
    try {
      obs.metric = oracle.evaluate(obs.amounts, eval_seed);
    } catch (const RuntimeFailure& err) {
      throw OracleFailure("platform " + std::to_string(p) + ", experiment " + std::to_string(e) +
                          ": " + err.what());
    }
  });

  out.models.reserve(n);
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<PerformanceObservation> obs(out.observations.begin() + static_cast<std::ptrdiff_t>(p * k),
                                            out.observations.begin() + static_cast<std::ptrdiff_t>((p + 1) * k));
    try {
      out.models.push_back(fit_regression(obs));
    } catch (const RuntimeFailure& err) {
      throw RuntimeFailure("platform " + std::to_string(p) + ": " + err.what());
    }
  }
  return out;
}

}  // namespace fedgame
