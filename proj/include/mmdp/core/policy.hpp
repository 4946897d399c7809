#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mmdp {

enum class PolicyKind { kDeterministic, kRandomized };

/**
 * A Markov policy pi_t(s, a) over 0-based time steps.
 *
 * Both kinds expose the probability table; a deterministic policy additionally
 * exposes its action table and has one-hot rows.
 */
class Policy {
 public:
  static Policy deterministic(int horizon, int n_states, int n_actions, std::vector<int> actions);
  /// Throws ProbabilityError unless every row lies on the simplex within 1e-9.
  static Policy randomized(int horizon, int n_states, int n_actions, std::vector<double> probabilities);
  static Policy constant(int horizon, int n_states, int n_actions, int action);
  static Policy uniform(int horizon, int n_states, int n_actions);
  /// Uniformly random deterministic policy.
  static Policy random_deterministic(int horizon, int n_states, int n_actions, std::uint64_t seed);
  /// Random policy with strictly positive rows (normalized uniforms in [0.1, 1]).
  static Policy random_interior(int horizon, int n_states, int n_actions, std::uint64_t seed);

  PolicyKind kind() const { return kind_; }
  bool is_deterministic() const { return kind_ == PolicyKind::kDeterministic; }
  int horizon() const { return horizon_; }
  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }

  /// Deterministic policies only.
  int action(int t, int s) const { return actions_[index(t, s)]; }
  std::span<const int> actions() const { return actions_; }

  double prob(int t, int s, int a) const {
    return probabilities_[index(t, s) * static_cast<std::size_t>(n_actions_) + static_cast<std::size_t>(a)];
  }
  std::span<const double> row(int t, int s) const {
    return {probabilities_.data() + index(t, s) * static_cast<std::size_t>(n_actions_),
            static_cast<std::size_t>(n_actions_)};
  }
  std::span<const double> probabilities() const { return probabilities_; }

  /// One-hot copy with kind == randomized.
  Policy to_randomized() const;
  /// Argmax rounding; ties go to the lowest action index.
  Policy rounded() const;

  bool same_shape(int horizon, int n_states, int n_actions) const {
    return horizon_ == horizon && n_states_ == n_states && n_actions_ == n_actions;
  }

  friend bool operator==(const Policy& x, const Policy& y) {
    return x.kind_ == y.kind_ && x.horizon_ == y.horizon_ && x.n_states_ == y.n_states_ &&
           x.n_actions_ == y.n_actions_ && x.actions_ == y.actions_ && x.probabilities_ == y.probabilities_;
  }

 private:
  Policy(PolicyKind kind, int horizon, int n_states, int n_actions)
      : kind_(kind), horizon_(horizon), n_states_(n_states), n_actions_(n_actions) {}

  std::size_t index(int t, int s) const {
    return static_cast<std::size_t>(t) * static_cast<std::size_t>(n_states_) + static_cast<std::size_t>(s);
  }

  PolicyKind kind_;
  int horizon_;
  int n_states_;
  int n_actions_;
  std::vector<int> actions_;
  std::vector<double> probabilities_;
};

}  // namespace mmdp
