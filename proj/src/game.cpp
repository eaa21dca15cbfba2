#include "fedgame/game.hpp"

#include <cmath>

namespace fedgame {
namespace {

// (max(w, 0) * c)^gamma with 0^gamma defined as 0 for gamma > 0.
double barter_numerator(double weight, double incoming_amount, double gamma) {
  double base = std::max(weight, 0.0) * incoming_amount;
  if (base <= 0.0) return 0.0;
  return std::pow(base, gamma);
}

}  // namespace

double reward(const RegressionModel& model, const AmountsVector& incoming, const Policy& own,
              const RewardParams& params) {
  const std::size_t n = own.quotas.size();
  double r = model.intercept;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == own.owner) continue;
    double num = barter_numerator(model.weights[j], incoming.amounts[j], params.gamma);
    r += num / (own.quotas[j] + params.epsilon);
  }
  return r;
}

std::vector<double> reward_gradient(const RegressionModel& model, const AmountsVector& incoming,
                                    const Policy& own, const RewardParams& params) {
  const std::size_t n = own.quotas.size();
  std::vector<double> grad(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == own.owner) continue;
    double num = barter_numerator(model.weights[j], incoming.amounts[j], params.gamma);
    double denom = own.quotas[j] + params.epsilon;
    grad[j] = -num / (denom * denom);
  }
  return grad;
}

Policy update_policy(const Policy& policy, const std::vector<double>& gradient, double eta) {
  Policy updated = policy;
  for (std::size_t j = 0; j < policy.quotas.size(); ++j) {
    if (j == policy.owner) continue;
    if (!std::isfinite(gradient[j])) {
      throw NonFiniteGradient("gradient component " + std::to_string(j) + " is not finite");
    }
    updated.quotas[j] = policy.quotas[j] - eta * gradient[j];
  }
  return updated;
}

Policy project_policy(const Policy& policy, double effective_budget) {
  Policy projected = policy;
  double sum = 0.0;
  for (std::size_t j = 0; j < projected.quotas.size(); ++j) {
    if (j == projected.owner) {
      projected.quotas[j] = 0.0;
      continue;
    }
    projected.quotas[j] = std::max(0.0, projected.quotas[j]);
    sum += projected.quotas[j];
  }
  if (sum > effective_budget && sum > 0.0) {
    double scale = effective_budget / sum;
    for (std::size_t j = 0; j < projected.quotas.size(); ++j) {
      if (j != projected.owner) projected.quotas[j] *= scale;
    }
  }
  return projected;
}

PolicyDelta policy_delta(const Policy& older, const Policy& newer, double mu,
                         ConvergenceNorm norm) {
  if (older.owner != newer.owner) throw RuntimeFailure("policy delta across different owners");
  double value = 0.0;
  for (std::size_t j = 0; j < older.quotas.size(); ++j) {
    double d = std::abs(newer.quotas[j] - older.quotas[j]);
    if (norm == ConvergenceNorm::l2) {
      value += d * d;
    } else {
      value = std::max(value, d);
    }
  }
  if (norm == ConvergenceNorm::l2) value = std::sqrt(value);
  PolicyDelta delta;
  delta.platform = older.owner;
  delta.norm_value = value;
  delta.converged = value < mu;
  return delta;
}

}  // namespace fedgame
