#include "mmdp/core/policy.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "mmdp/core/errors.hpp"
#include "mmdp/core/random.hpp"

namespace mmdp {
namespace {

void check_shape(int horizon, int n_states, int n_actions) {
  if (horizon < 1 || n_states < 1 || n_actions < 1) {
    throw DimensionMismatch("policy dimensions must be positive");
  }
}

std::size_t cells(int horizon, int n_states) {
  return static_cast<std::size_t>(horizon) * static_cast<std::size_t>(n_states);
}

}  // namespace

Policy Policy::deterministic(int horizon, int n_states, int n_actions, std::vector<int> actions) {
  check_shape(horizon, n_states, n_actions);
  if (actions.size() != cells(horizon, n_states)) {
    throw DimensionMismatch("action table has " + std::to_string(actions.size()) + " entries, expected " +
                            std::to_string(cells(horizon, n_states)));
  }
  Policy policy(PolicyKind::kDeterministic, horizon, n_states, n_actions);
  policy.probabilities_.assign(actions.size() * static_cast<std::size_t>(n_actions), 0.0);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] < 0 || actions[i] >= n_actions) {
      throw IndexError("action " + std::to_string(actions[i]) + " out of range");
    }
    policy.probabilities_[i * static_cast<std::size_t>(n_actions) + static_cast<std::size_t>(actions[i])] = 1.0;
  }
  policy.actions_ = std::move(actions);
  return policy;
}

Policy Policy::randomized(int horizon, int n_states, int n_actions, std::vector<double> probabilities) {
  check_shape(horizon, n_states, n_actions);
  const std::size_t rows = cells(horizon, n_states);
  if (probabilities.size() != rows * static_cast<std::size_t>(n_actions)) {
    throw DimensionMismatch("probability table has " + std::to_string(probabilities.size()) + " entries, expected " +
                            std::to_string(rows * static_cast<std::size_t>(n_actions)));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (int a = 0; a < n_actions; ++a) {
      const double p = probabilities[r * static_cast<std::size_t>(n_actions) + static_cast<std::size_t>(a)];
      if (!(p >= 0.0)) {
        throw ProbabilityError("negative or NaN policy probability at (t " + std::to_string(r / n_states) +
                               ", state " + std::to_string(r % n_states) + ")");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ProbabilityError("policy row (t " + std::to_string(r / n_states) + ", state " +
                             std::to_string(r % n_states) + ") sums to " + std::to_string(sum));
    }
  }
  Policy policy(PolicyKind::kRandomized, horizon, n_states, n_actions);
  policy.probabilities_ = std::move(probabilities);
  return policy;
}

Policy Policy::constant(int horizon, int n_states, int n_actions, int action) {
  return deterministic(horizon, n_states, n_actions, std::vector<int>(cells(horizon, n_states), action));
}

Policy Policy::uniform(int horizon, int n_states, int n_actions) {
  check_shape(horizon, n_states, n_actions);
  return randomized(horizon, n_states, n_actions,
                    std::vector<double>(cells(horizon, n_states) * static_cast<std::size_t>(n_actions),
                                        1.0 / n_actions));
}

Policy Policy::random_deterministic(int horizon, int n_states, int n_actions, std::uint64_t seed) {
  check_shape(horizon, n_states, n_actions);
  Rng rng(derive_seed(seed, 0x5eed));
  std::vector<int> actions(cells(horizon, n_states));
  for (int& a : actions) a = static_cast<int>(rng() % static_cast<std::uint64_t>(n_actions));
  return deterministic(horizon, n_states, n_actions, std::move(actions));
}

Policy Policy::random_interior(int horizon, int n_states, int n_actions, std::uint64_t seed) {
  check_shape(horizon, n_states, n_actions);
  Rng rng(derive_seed(seed, 0x1a7e));
  const std::size_t rows = cells(horizon, n_states);
  std::vector<double> probabilities(rows * static_cast<std::size_t>(n_actions));
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (int a = 0; a < n_actions; ++a) {
      double& p = probabilities[r * static_cast<std::size_t>(n_actions) + static_cast<std::size_t>(a)];
      p = 0.1 + 0.9 * uniform01(rng);
      sum += p;
    }
    for (int a = 0; a < n_actions; ++a) {
      probabilities[r * static_cast<std::size_t>(n_actions) + static_cast<std::size_t>(a)] /= sum;
    }
  }
  return randomized(horizon, n_states, n_actions, std::move(probabilities));
}

Policy Policy::to_randomized() const {
  Policy copy = *this;
  copy.kind_ = PolicyKind::kRandomized;
  copy.actions_.clear();
  return copy;
}

Policy Policy::rounded() const {
  if (is_deterministic()) return *this;
  std::vector<int> actions(cells(horizon_, n_states_));
  for (int t = 0; t < horizon_; ++t) {
    for (int s = 0; s < n_states_; ++s) {
      const auto probs = row(t, s);
      int best = 0;
      for (int a = 1; a < n_actions_; ++a) {
        if (probs[static_cast<std::size_t>(a)] > probs[static_cast<std::size_t>(best)]) best = a;
      }
      actions[index(t, s)] = best;
    }
  }
  return deterministic(horizon_, n_states_, n_actions_, std::move(actions));
}

}  // namespace mmdp
