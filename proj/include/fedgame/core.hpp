#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fedgame/errors.hpp"

namespace fedgame {

using PlatformId = std::size_t;

// Tolerance applied to quota-matrix row-sum checks.
inline constexpr double kBudgetSlack = 1e-12;

// A platform's privacy budget in normalized units: 1.0 means the whole local
// training set. Offering deposit data to each of the other n-1 platforms
// consumes deposit_fraction * (n-1) of the budget when count_deposit is set;
// the remainder is what negotiation may allocate.
struct Budget {
  double total = 1.0;
  double deposit_fraction = 0.05;
  bool count_deposit = true;
};

// Budget left for quota allocation. Throws InvalidConfig when the deposit
// cost alone exceeds the total.
double effective_budget(const Budget& budget, std::size_t n_platforms);

// One platform's quota allocation: quotas[j] is the fraction of the owner's
// training set offered to platform j. quotas[owner] stays exactly zero.
struct Policy {
  PlatformId owner = 0;
  std::vector<double> quotas;
};

// All platforms' policies, row i = policy of platform i.
struct QuotaMatrix {
  std::size_t n = 0;
  std::vector<double> entries;  // row-major n x n

  QuotaMatrix() = default;
  explicit QuotaMatrix(std::size_t n_platforms)
      : n(n_platforms), entries(n_platforms * n_platforms, 0.0) {}

  double& at(PlatformId i, PlatformId j) { return entries[i * n + j]; }
  double at(PlatformId i, PlatformId j) const { return entries[i * n + j]; }

  Policy row_policy(PlatformId i) const;
  void set_row(const Policy& policy);

  // Column i: the amounts (c_{1,i}, ..., c_{N,i}) flowing into platform i.
  std::vector<double> incoming(PlatformId i) const;

  bool operator==(const QuotaMatrix&) const = default;
};

enum class ConvergenceNorm { l2, linf };

struct GameHyperparams {
  double gamma = 2.5;
  double eta = 0.01;
  double epsilon = 1e-8;
  double mu = 1e-4;
  std::size_t max_rounds = 10000;
  ConvergenceNorm norm = ConvergenceNorm::l2;
};

enum class SamplingRule {
  // First design point is all-zeros, pinning the regression intercept to the
  // local-only performance; remaining points are uniform in [0, deposit].
  uniform_with_anchor,
  uniform,
};

struct EstimationConfig {
  std::size_t k = 5;
  double deposit_fraction = 0.05;
  SamplingRule sampling = SamplingRule::uniform_with_anchor;
  std::uint64_t seed_stride = 1;
};

enum class ResponseShape { linear, concave };
enum class MetricKind { accuracy, auc };

// Closed-form oracle used for exact tests: metric for platform i is
// b_i + sum_j w[i][j] * g(amounts[j]) + noise, g identity or x^alpha.
struct SyntheticOracleSpec {
  std::vector<double> intercepts;            // per platform
  std::vector<std::vector<double>> weights;  // weights[i][j]: value of j's data to i
  ResponseShape shape = ResponseShape::linear;
  double concave_alpha = 1.0;
  double noise_sigma = 0.0;
};

// Generated vertical dataset: per-block i.i.d. standard-normal features and
// per-platform binary labels drawn from a logistic model over all blocks.
// signal[i][b] scales how much block b contributes to platform i's labels, so
// partner values can differ per task (zero = pure-noise partner).
struct GeneratedDatasetSpec {
  std::size_t n_samples = 2000;
  std::size_t features_per_block = 5;
  std::vector<std::vector<double>> signal;
  std::uint64_t data_seed = 1;
};

enum class ColumnType { numeric, categorical };

struct CsvColumn {
  std::string name;
  ColumnType type = ColumnType::numeric;
  PlatformId platform = 0;
  bool is_label = false;
  bool drop = false;
};

struct CsvDatasetSpec {
  // One path (seeded train/test split) or two paths (explicit train, test).
  std::vector<std::string> paths;
  std::vector<CsvColumn> columns;
  bool has_header = true;
};

struct VflTabularSpec {
  std::variant<GeneratedDatasetSpec, CsvDatasetSpec> source;
  std::size_t train_epochs = 300;
  double learning_rate = 0.5;
  double test_split = 0.25;
  MetricKind metric = MetricKind::accuracy;
  // When false, test samples keep full partner features regardless of the
  // negotiated amounts.
  bool mask_test_features = true;
};

enum class OracleKind { synthetic, vfl_tabular };

struct OracleSpec {
  OracleKind kind = OracleKind::synthetic;
  SyntheticOracleSpec synthetic;
  VflTabularSpec vfl_tabular;
};

struct ScenarioConfig {
  std::size_t n_platforms = 0;
  std::vector<Budget> budgets;
  GameHyperparams game;
  EstimationConfig estimation;
  OracleSpec oracle;
  std::uint64_t master_seed = 0;
};

struct ValidatedScenario {
  ScenarioConfig config;
  std::vector<double> effective_budgets;

  std::size_t n() const { return config.n_platforms; }
};

// Checks every scenario invariant and precomputes effective budgets. Throws
// InvalidConfig naming the first violated invariant. Idempotent: validating
// the config of a validated scenario yields the same result.
ValidatedScenario validate_scenario(const ScenarioConfig& config);

// Asserts the QuotaMatrix invariants (zero diagonal, nonnegative entries,
// row sums within budget slack). Throws RuntimeFailure on violation.
void check_quota_matrix(const QuotaMatrix& m, const std::vector<double>& effective_budgets);

}  // namespace fedgame
