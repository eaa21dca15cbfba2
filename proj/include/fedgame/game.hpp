#pragma once

#include <vector>

#include "fedgame/core.hpp"
#include "fedgame/estimation.hpp"

namespace fedgame {

// Parameters of the differentiable reward. Negative regression weights are
// floored to zero inside reward and gradient: a fractional power of a
// negative product would leave the reals, and partners with harmful data
// should not generate barter value.
struct RewardParams {
  double gamma = 2.5;
  double epsilon = 1e-8;
};

inline RewardParams reward_params(const GameHyperparams& hp) {
  return RewardParams{hp.gamma, hp.epsilon};
}

// r_i = b_i + sum_{j != i} (max(w_{j,i}, 0) * c_{j,i})^gamma / (c_{i,j} + eps).
double reward(const RegressionModel& model, const AmountsVector& incoming, const Policy& own,
              const RewardParams& params);

// d r_i / d c_{i,j} = -(max(w_{j,i},0) * c_{j,i})^gamma / (c_{i,j} + eps)^2;
// the self-component is zero and every component is <= 0.
std::vector<double> reward_gradient(const RegressionModel& model, const AmountsVector& incoming,
                                    const Policy& own, const RewardParams& params);

// One unprojected gradient step: quotas - eta * gradient, diagonal untouched.
// Throws NonFiniteGradient on a non-finite component.
Policy update_policy(const Policy& policy, const std::vector<double>& gradient, double eta);

// Clamp negatives to zero; if the clamped sum exceeds the budget, rescale all
// entries by budget / sum so the row lands exactly on the budget.
Policy project_policy(const Policy& policy, double effective_budget);

struct PolicyDelta {
  PlatformId platform = 0;
  double norm_value = 0.0;
  bool converged = false;
};

PolicyDelta policy_delta(const Policy& older, const Policy& newer, double mu,
                         ConvergenceNorm norm);

}  // namespace fedgame
