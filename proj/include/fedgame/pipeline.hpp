#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fedgame/baselines.hpp"
#include "fedgame/core.hpp"
#include "fedgame/estimation.hpp"
#include "fedgame/negotiation.hpp"
#include "fedgame/oracle.hpp"

namespace fedgame {

// Canonical policy order used everywhere reports are emitted.
inline const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names = {"local_only", "uniform", "greedy", "shapley",
                                                 "fedgame"};
  return names;
}

struct PolicyEvaluation {
  std::string policy_name;
  std::vector<double> per_platform_metric;
  double average_metric = 0.0;
  std::vector<double> per_platform_reward;
};

// Final collaborative learning: each platform's oracle call receives the full
// allocated incoming amounts (not deposit fractions). Rewards are filled when
// regression models are supplied.
PolicyEvaluation evaluate_policy(const ValidatedScenario& scenario,
                                 const PerformanceOracle& oracle, const QuotaMatrix& matrix,
                                 std::uint64_t seed, std::string policy_name = {},
                                 const std::vector<RegressionModel>* models = nullptr,
                                 std::size_t jobs = 1);

struct NegotiationSummary {
  std::size_t rounds_used = 0;
  bool converged = false;
  std::size_t reads_checked = 0;
  std::size_t visibility_violations = 0;
};

struct RepetitionOutput {
  std::uint64_t seed = 0;
  EstimationResult estimation;
  std::vector<std::pair<std::string, QuotaMatrix>> policies;
  std::vector<PolicyEvaluation> evaluations;
  NegotiationSummary negotiation;
  // Mean |predicted - measured| across platforms at the uniform policy.
  double prediction_error_uniform = 0.0;
};

struct PolicyStats {
  std::string name;
  double mean_average_metric = 0.0;
  double stddev_average_metric = 0.0;
  std::vector<double> mean_per_platform;
  std::vector<double> stddev_per_platform;
  std::vector<double> mean_per_platform_reward;
};

struct ExperimentReport {
  ScenarioConfig scenario;
  std::string scenario_digest;
  std::size_t repetitions = 0;
  std::vector<std::uint64_t> repetition_seeds;
  std::vector<PolicyStats> stats;  // in policy_names() order
  double mean_rounds_used = 0.0;
  bool all_converged = false;
  std::size_t total_visibility_violations = 0;
  double mean_prediction_error_uniform = 0.0;
  double stddev_prediction_error_uniform = 0.0;
  std::vector<RepetitionOutput> reps;
  NegotiationTranscript first_transcript;  // repetition 0, for export/audit
};

// Full pipeline per repetition (seed derived from the master seed and the
// repetition index): estimation, all baseline policies, the negotiated
// policy, and oracle evaluation of each. Repetitions may run on `jobs`
// threads; reports are byte-identical for any job count.
ExperimentReport run_full_experiment(const ValidatedScenario& scenario, std::size_t repetitions,
                                     std::size_t jobs = 1,
                                     InitMode negotiation_init = InitMode::uniform);

enum class SweepParameter { gamma, deposit_fraction };

struct SweepPoint {
  double value = 0.0;
  ExperimentReport report;
};

// One full experiment per value under the same master seed. Deposit sweeps
// adjust both the experiment design range and the budget accounting.
std::vector<SweepPoint> sweep(const ValidatedScenario& scenario, SweepParameter parameter,
                              const std::vector<double>& values, std::size_t repetitions,
                              std::size_t jobs = 1,
                              InitMode negotiation_init = InitMode::uniform);

}  // namespace fedgame
