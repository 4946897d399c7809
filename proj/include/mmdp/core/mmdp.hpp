#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace mmdp {

/// One sparse entry of a transition row: p(next | s, a) under some model.
struct Transition {
  int next;
  double probability;
};

/**
 * A finite-horizon multi-model MDP.
 *
 * Time steps are 0-based: t = 0 is the first decision epoch and t = horizon-1
 * the last. Transitions are stationary per model. Rewards are stored as a
 * stationary base reward r^m(s,a) scaled by a per-step factor, so that the
 * reward collected at step t is reward_scale(t) * r^m(s,a). A freshly built
 * instance has reward_scale(t) == 1 for all t; fold_discount() turns the
 * discount factor into the scale gamma^t.
 *
 * Instances are immutable. The bulky transition and reward tensors are shared
 * between copies, so with_horizon() and friends are cheap.
 */
class Mmdp {
 public:
  int horizon() const { return horizon_; }
  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  int n_models() const { return n_models_; }

  std::span<const Transition> transitions(int m, int s, int a) const {
    const std::size_t row = row_index(m, s, a);
    const auto& offsets = data_->row_offsets;
    return {data_->entries.data() + offsets[row], offsets[row + 1] - offsets[row]};
  }

  /// Dense lookup p^m(next | s, a); linear in the row length.
  double probability(int m, int s, int a, int next) const;

  double reward(int m, int t, int s, int a) const {
    return reward_scale_[static_cast<std::size_t>(t)] * data_->rewards[row_index(m, s, a)];
  }
  double base_reward(int m, int s, int a) const { return data_->rewards[row_index(m, s, a)]; }
  double reward_scale(int t) const { return reward_scale_[static_cast<std::size_t>(t)]; }
  /// Per-step geometric factor that generated reward_scale (1 unless folded).
  double reward_decay() const { return reward_decay_; }

  std::span<const double> initial_distribution() const { return initial_; }
  std::span<const double> model_weights() const { return weights_; }
  double model_weight(int m) const { return weights_[static_cast<std::size_t>(m)]; }
  double discount() const { return discount_; }

  /// Total number of stored sparse transition entries.
  std::size_t n_entries() const { return data_->entries.size(); }

  Mmdp with_horizon(int horizon) const;
  Mmdp with_model_weights(std::vector<double> weights) const;
  Mmdp with_initial_distribution(std::vector<double> initial) const;
  /// Model m as a stand-alone single-model instance with weight 1.
  Mmdp single_model(int m) const;

  std::size_t row_index(int m, int s, int a) const {
    return (static_cast<std::size_t>(m) * static_cast<std::size_t>(n_states_) +
            static_cast<std::size_t>(s)) *
               static_cast<std::size_t>(n_actions_) +
           static_cast<std::size_t>(a);
  }

 private:
  friend class MmdpBuilder;
  friend Mmdp fold_discount(const Mmdp& mmdp);

  struct Tensors {
    std::vector<std::size_t> row_offsets;  // size M*S*A + 1
    std::vector<Transition> entries;       // sorted by next within a row
    std::vector<double> rewards;           // size M*S*A
  };

  Mmdp() = default;
  void rebuild_scale();

  int horizon_ = 1;
  int n_states_ = 0;
  int n_actions_ = 0;
  int n_models_ = 0;
  std::shared_ptr<const Tensors> data_;
  std::vector<double> initial_;
  std::vector<double> weights_;
  double discount_ = 1.0;
  double reward_decay_ = 1.0;
  std::vector<double> reward_scale_;
};

/**
 * Incremental construction of an Mmdp.
 *
 * Duplicate (m, s, a, next) entries are merged by summing their
 * probabilities. build() throws IndexError when an id is out of range or when
 * some (m, s, a) has no transition row at all. Numerical invariants (row sums,
 * weights) are left to validate().
 */
class MmdpBuilder {
 public:
  MmdpBuilder(int n_states, int n_actions, int n_models);

  MmdpBuilder& horizon(int horizon);
  MmdpBuilder& add_transition(int m, int s, int a, int next, double probability);
  MmdpBuilder& set_reward(int m, int s, int a, double reward);
  MmdpBuilder& initial_distribution(std::vector<double> initial);
  MmdpBuilder& model_weights(std::vector<double> weights);
  MmdpBuilder& discount(double discount);
  /// Reward at step t becomes decay^t times the base reward.
  MmdpBuilder& reward_decay(double decay);

  Mmdp build() const;

 private:
  struct Entry {
    int m, s, a, next;
    double probability;
  };
  void check_ids(int m, int s, int a) const;

  int n_states_;
  int n_actions_;
  int n_models_;
  int horizon_ = 1;
  double discount_ = 1.0;
  double reward_decay_ = 1.0;
  std::vector<Entry> entries_;
  std::vector<double> rewards_;
  std::vector<double> initial_;
  std::vector<double> weights_;
};

/// Training models compute policies; test models evaluate them.
struct DomainBundle {
  Mmdp training;
  Mmdp test;
};

/// Folds the discount into time-dependent rewards r_t = gamma^t r (0-based t)
/// and sets the discount to 1. Transitions are shared, not copied.
Mmdp fold_discount(const Mmdp& mmdp);

}  // namespace mmdp
