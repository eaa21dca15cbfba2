#include "fedgame/core.hpp"

#include <cmath>
#include <sstream>

namespace fedgame {
namespace {

std::string at_platform(std::size_t i) {
  std::ostringstream os;
  os << " (platform " << i << ")";
  return os.str();
}

void validate_oracle_spec(const OracleSpec& oracle, std::size_t n) {
  if (oracle.kind == OracleKind::synthetic) {
    const auto& s = oracle.synthetic;
    if (s.intercepts.size() != n) {
      throw InvalidConfig("oracle.synthetic.intercepts must have one entry per platform");
    }
    if (s.weights.size() != n) {
      throw InvalidConfig("oracle.synthetic.weights must have one row per platform");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (s.weights[i].size() != n) {
        throw InvalidConfig("oracle.synthetic.weights rows must have one entry per platform" +
                            at_platform(i));
      }
    }
    if (s.noise_sigma < 0.0) throw InvalidConfig("oracle.synthetic.noise_sigma must be >= 0");
    if (s.shape == ResponseShape::concave &&
        (s.concave_alpha <= 0.0 || s.concave_alpha > 1.0)) {
      throw InvalidConfig("oracle.synthetic.concave_alpha must lie in (0, 1]");
    }
    return;
  }

  const auto& v = oracle.vfl_tabular;
  if (v.test_split <= 0.0 || v.test_split >= 1.0) {
    throw InvalidConfig("oracle.vfl_tabular.test_split must lie in (0, 1)");
  }
  if (v.train_epochs == 0) throw InvalidConfig("oracle.vfl_tabular.train_epochs must be >= 1");
  if (v.learning_rate <= 0.0) {
    throw InvalidConfig("oracle.vfl_tabular.learning_rate must be > 0");
  }
  if (const auto* gen = std::get_if<GeneratedDatasetSpec>(&v.source)) {
    if (gen->n_samples < 8) throw InvalidConfig("oracle.vfl_tabular.generated.n_samples too small");
    if (gen->features_per_block == 0) {
      throw InvalidConfig("oracle.vfl_tabular.generated.features_per_block must be >= 1");
    }
    if (gen->signal.size() != n) {
      throw InvalidConfig("oracle.vfl_tabular.generated.signal must have one row per platform");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (gen->signal[i].size() != n) {
        throw InvalidConfig(
            "oracle.vfl_tabular.generated.signal rows must have one entry per platform" +
            at_platform(i));
      }
    }
  } else {
    const auto& csv = std::get<CsvDatasetSpec>(v.source);
    if (csv.paths.empty() || csv.paths.size() > 2) {
      throw InvalidConfig("oracle.vfl_tabular.csv.paths must name one or two files");
    }
    std::vector<int> labels_per_platform(n, 0);
    for (const auto& col : csv.columns) {
      if (col.platform >= n) {
        throw InvalidConfig("oracle.vfl_tabular.csv column '" + col.name +
                            "' assigned to unknown platform");
      }
      if (col.is_label && !col.drop) ++labels_per_platform[col.platform];
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (labels_per_platform[i] != 1) {
        throw InvalidConfig("oracle.vfl_tabular.csv needs exactly one label column" +
                            at_platform(i));
      }
    }
  }
}

}  // namespace

double effective_budget(const Budget& budget, std::size_t n_platforms) {
  if (budget.total < 0.0) throw InvalidConfig("budget total must be >= 0");
  if (budget.deposit_fraction < 0.0 || budget.deposit_fraction > 1.0) {
    throw InvalidConfig("deposit_fraction must lie in [0, 1]");
  }
  if (!budget.count_deposit) return budget.total;
  double eff = budget.total - budget.deposit_fraction * static_cast<double>(n_platforms - 1);
  if (eff < 0.0) {
    throw InvalidConfig("deposit exceeds budget: deposit_fraction * (n-1) > total");
  }
  return eff;
}

Policy QuotaMatrix::row_policy(PlatformId i) const {
  Policy p;
  p.owner = i;
  p.quotas.assign(entries.begin() + static_cast<std::ptrdiff_t>(i * n),
                  entries.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
  return p;
}

void QuotaMatrix::set_row(const Policy& policy) {
  for (std::size_t j = 0; j < n; ++j) at(policy.owner, j) = policy.quotas[j];
}

std::vector<double> QuotaMatrix::incoming(PlatformId i) const {
  std::vector<double> col(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) col[j] = at(j, i);
  return col;
}

ValidatedScenario validate_scenario(const ScenarioConfig& config) {
  if (config.n_platforms < 2) throw InvalidConfig("n_platforms must be >= 2");
  const std::size_t n = config.n_platforms;
  if (config.budgets.size() != n) {
    throw InvalidConfig("budgets must have one entry per platform");
  }

  const auto& g = config.game;
  if (g.gamma <= 0.0) throw InvalidConfig("game.gamma must be > 0");
  if (g.eta <= 0.0) throw InvalidConfig("game.eta must be > 0");
  if (g.epsilon <= 0.0) throw InvalidConfig("game.epsilon must be > 0");
  if (g.mu <= 0.0) throw InvalidConfig("game.mu must be > 0");
  if (g.max_rounds < 1) throw InvalidConfig("game.max_rounds must be >= 1");

  const auto& e = config.estimation;
  // Per-platform regression solves for 1 intercept + (n-1) weights.
  if (e.k < n) {
    throw InvalidConfig("estimation.k must be at least the regression unknown count (K >= N)");
  }
  if (e.deposit_fraction <= 0.0 || e.deposit_fraction > 1.0) {
    throw InvalidConfig("estimation.deposit_fraction must lie in (0, 1]");
  }
  if (e.seed_stride == 0) throw InvalidConfig("estimation.seed_stride must be >= 1");

  ValidatedScenario out;
  out.config = config;
  out.effective_budgets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Budget& b = config.budgets[i];
    if (b.total > 1.0) {
      // Quotas are fractions of the full training set; a budget above 1
      // could allocate more data than exists.
      throw InvalidConfig("budget total must be <= 1 (normalized units)" + at_platform(i));
    }
    try {
      out.effective_budgets.push_back(effective_budget(b, n));
    } catch (const InvalidConfig& err) {
      throw InvalidConfig(std::string(err.what()) + at_platform(i));
    }
  }

  validate_oracle_spec(config.oracle, n);
  return out;
}

void check_quota_matrix(const QuotaMatrix& m, const std::vector<double>& effective_budgets) {
  if (m.n != effective_budgets.size()) {
    throw RuntimeFailure("quota matrix size does not match platform count");
  }
  for (std::size_t i = 0; i < m.n; ++i) {
    if (m.at(i, i) != 0.0) throw RuntimeFailure("quota matrix diagonal must be exactly zero");
    double sum = 0.0;
    for (std::size_t j = 0; j < m.n; ++j) {
      double v = m.at(i, j);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw RuntimeFailure("quota matrix entries must be finite and nonnegative");
      }
      sum += v;
    }
    if (sum > effective_budgets[i] + kBudgetSlack) {
      throw RuntimeFailure("quota matrix row exceeds effective budget");
    }
  }
}

}  // namespace fedgame
