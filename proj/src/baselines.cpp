#include "fedgame/baselines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "fedgame/parallel.hpp"
#include "fedgame/rng.hpp"

namespace fedgame {

QuotaMatrix local_only_policy(const ValidatedScenario& scenario) {
  return QuotaMatrix(scenario.n());
}

QuotaMatrix uniform_policy(const ValidatedScenario& scenario) {
  const std::size_t n = scenario.n();
  QuotaMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    double share = scenario.effective_budgets[i] / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) m.at(i, j) = share;
    }
  }
  return m;
}

QuotaMatrix greedy_policy(const ValidatedScenario& scenario,
                          const std::vector<RegressionModel>& models) {
  const std::size_t n = scenario.n();
  constexpr std::size_t kNobody = static_cast<std::size_t>(-1);

  // recipient[i]: where platform i currently sends its whole budget.
  std::vector<std::size_t> recipient(n, kNobody);
  auto floored = [&](PlatformId i, PlatformId j) { return std::max(models[i].weights[j], 0.0); };

  for (std::size_t i = 0; i < n; ++i) {
    double best = 0.0;
    std::size_t best_j = kNobody;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (floored(i, j) > best) {  // strictly positive value required
        best = floored(i, j);
        best_j = j;
      }
    }
    recipient[i] = best_j;
  }

  auto offers_to = [&](std::size_t from, std::size_t to) {
    return recipient[from] == to && scenario.effective_budgets[from] > 0.0;
  };

  // Withdrawal passes: a platform whose recipient offers it nothing pulls
  // back and switches to its best suitor, or to nobody.
  for (std::size_t pass = 0; pass < n; ++pass) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (recipient[i] == kNobody) {
        // May re-enter if someone with positively valued data now offers to it.
        double best = 0.0;
        std::size_t best_j = kNobody;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i || !offers_to(j, i)) continue;
          if (floored(i, j) > best) {
            best = floored(i, j);
            best_j = j;
          }
        }
        if (best_j != kNobody) {
          recipient[i] = best_j;
          changed = true;
        }
        continue;
      }
      if (offers_to(recipient[i], i)) continue;  // reciprocated, keep it
      double best = 0.0;
      std::size_t best_j = kNobody;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || !offers_to(j, i)) continue;
        if (floored(i, j) > best) {
          best = floored(i, j);
          best_j = j;
        }
      }
      if (recipient[i] != best_j) {
        recipient[i] = best_j;
        changed = true;
      }
    }
    if (!changed) break;
  }

  QuotaMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (recipient[i] != kNobody) m.at(i, recipient[i]) = scenario.effective_budgets[i];
  }
  return m;
}

CoalitionValueTable build_coalition_table(PlatformId target, const PerformanceOracle& oracle,
                                          double deposit_fraction, std::uint64_t seed,
                                          std::size_t jobs) {
  const std::size_t n = oracle.platform_count();
  CoalitionValueTable table;
  table.target = target;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != target) table.partners.push_back(j);
  }
  const std::size_t n_partners = table.partners.size();
  if (n_partners > 11) {
    throw CoalitionTooLarge("brute-force Shapley supports at most 12 platforms");
  }
  table.values.assign(std::size_t{1} << n_partners, 0.0);
  parallel_for(table.values.size(), jobs, [&](std::size_t mask) {
    AmountsVector amounts;
    amounts.target = target;
    amounts.amounts.assign(n, 0.0);
    for (std::size_t b = 0; b < n_partners; ++b) {
      if (mask & (std::size_t{1} << b)) amounts.amounts[table.partners[b]] = deposit_fraction;
    }
    table.values[mask] =
        oracle.evaluate(amounts, derive_seed(seed, "coalition", {target, mask}));
  });
  return table;
}

ShapleyVector shapley_from_table(const CoalitionValueTable& table, std::size_t n_platforms) {
  const std::size_t n_partners = table.partners.size();
  ShapleyVector out;
  out.target = table.target;
  out.phi.assign(n_platforms, 0.0);

  std::vector<double> factorial(n_partners + 1, 1.0);
  for (std::size_t i = 1; i <= n_partners; ++i) {
    factorial[i] = factorial[i - 1] * static_cast<double>(i);
  }
  const double total = factorial[n_partners];

  for (std::size_t b = 0; b < n_partners; ++b) {
    const std::size_t bit = std::size_t{1} << b;
    double phi = 0.0;
    for (std::size_t mask = 0; mask < table.values.size(); ++mask) {
      if (mask & bit) continue;
      auto s = static_cast<std::size_t>(std::popcount(mask));
      double weight = factorial[s] * factorial[n_partners - s - 1] / total;
      phi += weight * (table.values[mask | bit] - table.values[mask]);
    }
    out.phi[table.partners[b]] = phi;
  }
  return out;
}

ShapleyVector compute_shapley(PlatformId target, const PerformanceOracle& oracle,
                              double deposit_fraction, std::uint64_t seed, std::size_t jobs) {
  auto table = build_coalition_table(target, oracle, deposit_fraction, seed, jobs);
  return shapley_from_table(table, oracle.platform_count());
}

QuotaMatrix shapley_policy(const ValidatedScenario& scenario,
                           const std::vector<ShapleyVector>& shapley) {
  const std::size_t n = scenario.n();
  if (shapley.size() != n) throw RuntimeFailure("need one Shapley vector per platform");
  QuotaMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& phi = shapley[i].phi;
    double positive_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) positive_sum += std::max(phi[j], 0.0);
    }
    if (positive_sum <= 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      m.at(i, j) = scenario.effective_budgets[i] * std::max(phi[j], 0.0) / positive_sum;
    }
  }
  return m;
}

}  // namespace fedgame
