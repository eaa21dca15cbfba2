#pragma once

#include <cstdint>
#include <vector>

#include "fedgame/core.hpp"
#include "fedgame/estimation.hpp"
#include "fedgame/oracle.hpp"

namespace fedgame {

// All platforms train on local data only.
QuotaMatrix local_only_policy(const ValidatedScenario& scenario);

// Each platform splits its effective budget evenly over the partners.
QuotaMatrix uniform_policy(const ValidatedScenario& scenario);

// Each platform offers its whole effective budget to its single most
// valuable partner (by floored regression weight, ties to the lowest index),
// then platforms whose recipient offers them nothing withdraw and reassign
// to their best remaining suitor, iterated to a fixed point. A platform with
// no positively valued partner offers nothing.
QuotaMatrix greedy_policy(const ValidatedScenario& scenario,
                          const std::vector<RegressionModel>& models);

// Characteristic function over partner coalitions: values[mask] is the
// oracle metric when the coalition's members contribute deposit_fraction and
// everyone else contributes nothing. Masks index the partner list in
// ascending platform order.
struct CoalitionValueTable {
  PlatformId target = 0;
  std::vector<PlatformId> partners;
  std::vector<double> values;  // size 2^partners
};

CoalitionValueTable build_coalition_table(PlatformId target, const PerformanceOracle& oracle,
                                          double deposit_fraction, std::uint64_t seed,
                                          std::size_t jobs = 1);

struct ShapleyVector {
  PlatformId target = 0;
  std::vector<double> phi;  // per platform, self-entry zero
};

// Classic Shapley value over the coalition table.
ShapleyVector shapley_from_table(const CoalitionValueTable& table, std::size_t n_platforms);

// Brute force over all 2^(N-1) partner coalitions; throws CoalitionTooLarge
// for N > 12.
ShapleyVector compute_shapley(PlatformId target, const PerformanceOracle& oracle,
                              double deposit_fraction, std::uint64_t seed, std::size_t jobs = 1);

// Budget split proportional to the positive Shapley values of the partners;
// an all-nonpositive row stays zero.
QuotaMatrix shapley_policy(const ValidatedScenario& scenario,
                           const std::vector<ShapleyVector>& shapley);

}  // namespace fedgame
