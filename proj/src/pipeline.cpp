#include "fedgame/pipeline.hpp"

#include <cmath>
#include <stdexcept>

#include "fedgame/config.hpp"
#include "fedgame/game.hpp"
#include "fedgame/parallel.hpp"
#include "fedgame/rng.hpp"

namespace fedgame {
namespace {

void accumulate(std::vector<double>& sum, const std::vector<double>& v) {
  if (sum.empty()) sum.assign(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) sum[i] += v[i];
}

double population_stddev(const std::vector<double>& values, double mean) {
  if (values.empty()) return 0.0;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(values.size()));
}

RepetitionOutput run_repetition(const ValidatedScenario& scenario,
                                const PerformanceOracle& oracle, std::uint64_t rep_seed,
                                InitMode negotiation_init, bool keep_transcript,
                                NegotiationTranscript* transcript_out) {
  const std::size_t n = scenario.n();
  RepetitionOutput rep;
  rep.seed = rep_seed;
  rep.estimation = run_estimation(scenario, oracle, derive_seed(rep_seed, "estimation"));

  std::vector<ShapleyVector> shapley_vectors;
  shapley_vectors.reserve(n);
  std::uint64_t shapley_seed = derive_seed(rep_seed, "shapley");
  for (std::size_t i = 0; i < n; ++i) {
    shapley_vectors.push_back(
        compute_shapley(i, oracle, scenario.config.estimation.deposit_fraction, shapley_seed));
  }

  auto init =
      init_policies(scenario, negotiation_init, derive_seed(rep_seed, "negotiation-init"));
  auto outcome = run_negotiation(scenario, rep.estimation.models, init);
  auto audit = visibility_audit(outcome.transcript);
  rep.negotiation.rounds_used = outcome.rounds_used;
  rep.negotiation.converged = outcome.converged;
  rep.negotiation.reads_checked = audit.reads_checked;
  rep.negotiation.visibility_violations = audit.violations.size();

  rep.policies.emplace_back("local_only", local_only_policy(scenario));
  rep.policies.emplace_back("uniform", uniform_policy(scenario));
  rep.policies.emplace_back("greedy", greedy_policy(scenario, rep.estimation.models));
  rep.policies.emplace_back("shapley", shapley_policy(scenario, shapley_vectors));
  rep.policies.emplace_back("fedgame", outcome.final_policies);

  std::uint64_t eval_seed = derive_seed(rep_seed, "evaluation");
  for (const auto& [name, matrix] : rep.policies) {
    check_quota_matrix(matrix, scenario.effective_budgets);
    rep.evaluations.push_back(
        evaluate_policy(scenario, oracle, matrix, eval_seed, name, &rep.estimation.models));
  }

  // Prediction error of the fitted regressions at the uniform policy, against
  // the oracle values just measured for that policy (same seeds).
  const QuotaMatrix& uniform = rep.policies[1].second;
  const PolicyEvaluation& uniform_eval = rep.evaluations[1];
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    AmountsVector amounts{i, uniform.incoming(i)};
    err += std::abs(predict(rep.estimation.models[i], amounts) -
                    uniform_eval.per_platform_metric[i]);
  }
  rep.prediction_error_uniform = err / static_cast<double>(n);

  if (keep_transcript && transcript_out) *transcript_out = std::move(outcome.transcript);
  return rep;
}

}  // namespace

PolicyEvaluation evaluate_policy(const ValidatedScenario& scenario,
                                 const PerformanceOracle& oracle, const QuotaMatrix& matrix,
                                 std::uint64_t seed, std::string policy_name,
                                 const std::vector<RegressionModel>* models, std::size_t jobs) {
  const std::size_t n = scenario.n();
  if (matrix.n != n) throw RuntimeFailure("quota matrix size does not match scenario");
  check_quota_matrix(matrix, scenario.effective_budgets);

  PolicyEvaluation eval;
  eval.policy_name = std::move(policy_name);
  eval.per_platform_metric.assign(n, 0.0);
  eval.per_platform_reward.assign(n, 0.0);
  parallel_for(n, jobs, [&](std::size_t i) {
    AmountsVector amounts{i, matrix.incoming(i)};
    eval.per_platform_metric[i] =
        oracle.evaluate(amounts, derive_seed(seed, "platform-eval", {i}));
    if (models) {
      eval.per_platform_reward[i] = reward((*models)[i], amounts, matrix.row_policy(i),
                                           reward_params(scenario.config.game));
    }
  });
  double sum = 0.0;
  for (double m : eval.per_platform_metric) sum += m;
  eval.average_metric = sum / static_cast<double>(n);
  return eval;
}

ExperimentReport run_full_experiment(const ValidatedScenario& scenario, std::size_t repetitions,
                                     std::size_t jobs, InitMode negotiation_init) {
  if (repetitions < 1) throw InvalidConfig("repetitions must be >= 1");
  auto oracle = make_oracle(scenario);

  ExperimentReport report;
  report.scenario = scenario.config;
  report.scenario_digest = scenario_digest(scenario.config);
  report.repetitions = repetitions;
  report.reps.resize(repetitions);
  report.repetition_seeds.resize(repetitions);

  parallel_for(repetitions, jobs, [&](std::size_t r) {
    std::uint64_t rep_seed = derive_seed(scenario.config.master_seed, "repetition", {r});
    report.repetition_seeds[r] = rep_seed;
    try {
      report.reps[r] = run_repetition(scenario, *oracle, rep_seed, negotiation_init, r == 0,
                                      r == 0 ? &report.first_transcript : nullptr);
    } catch (const std::exception& err) {
      throw RuntimeFailure("repetition " + std::to_string(r) + ": " + err.what());
    }
  });

  // Aggregate in fixed policy order.
  const auto& names = policy_names();
  report.stats.resize(names.size());
  for (std::size_t p = 0; p < names.size(); ++p) {
    PolicyStats& stats = report.stats[p];
    stats.name = names[p];
    std::vector<double> averages;
    std::vector<double> platform_sum, reward_sum;
    std::vector<std::vector<double>> platform_values;
    for (const auto& rep : report.reps) {
      const PolicyEvaluation& eval = rep.evaluations[p];
      averages.push_back(eval.average_metric);
      accumulate(platform_sum, eval.per_platform_metric);
      accumulate(reward_sum, eval.per_platform_reward);
      platform_values.push_back(eval.per_platform_metric);
    }
    double mean = 0.0;
    for (double a : averages) mean += a;
    mean /= static_cast<double>(averages.size());
    stats.mean_average_metric = mean;
    stats.stddev_average_metric = population_stddev(averages, mean);
    const auto n_reps = static_cast<double>(report.reps.size());
    stats.mean_per_platform = platform_sum;
    for (double& v : stats.mean_per_platform) v /= n_reps;
    stats.mean_per_platform_reward = reward_sum;
    for (double& v : stats.mean_per_platform_reward) v /= n_reps;
    stats.stddev_per_platform.assign(platform_sum.size(), 0.0);
    for (std::size_t i = 0; i < platform_sum.size(); ++i) {
      std::vector<double> col;
      col.reserve(platform_values.size());
      for (const auto& v : platform_values) col.push_back(v[i]);
      stats.stddev_per_platform[i] = population_stddev(col, stats.mean_per_platform[i]);
    }
  }

  double rounds = 0.0;
  bool all_converged = true;
  std::vector<double> pred_errors;
  for (const auto& rep : report.reps) {
    rounds += static_cast<double>(rep.negotiation.rounds_used);
    all_converged = all_converged && rep.negotiation.converged;
    report.total_visibility_violations += rep.negotiation.visibility_violations;
    pred_errors.push_back(rep.prediction_error_uniform);
  }
  report.mean_rounds_used = rounds / static_cast<double>(report.reps.size());
  report.all_converged = all_converged;
  double pred_mean = 0.0;
  for (double e : pred_errors) pred_mean += e;
  pred_mean /= static_cast<double>(pred_errors.size());
  report.mean_prediction_error_uniform = pred_mean;
  report.stddev_prediction_error_uniform = population_stddev(pred_errors, pred_mean);
  return report;
}

std::vector<SweepPoint> sweep(const ValidatedScenario& scenario, SweepParameter parameter,
                              const std::vector<double>& values, std::size_t repetitions,
                              std::size_t jobs, InitMode negotiation_init) {
  if (values.empty()) throw InvalidConfig("sweep values must be non-empty");
  std::vector<SweepPoint> points;
  points.reserve(values.size());
  for (double value : values) {
    ScenarioConfig config = scenario.config;
    if (parameter == SweepParameter::gamma) {
      config.game.gamma = value;
    } else {
      config.estimation.deposit_fraction = value;
      for (auto& budget : config.budgets) budget.deposit_fraction = value;
    }
    try {
      auto validated = validate_scenario(config);
      points.push_back(
          SweepPoint{value, run_full_experiment(validated, repetitions, jobs, negotiation_init)});
    } catch (const ConfigError& err) {
      throw InvalidConfig("sweep value " + std::to_string(value) + ": " + err.what());
    } catch (const std::exception& err) {
      throw RuntimeFailure("sweep value " + std::to_string(value) + ": " + err.what());
    }
  }
  return points;
}

}  // namespace fedgame
