#include "mmdp/core/mmdp.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <utility>

#include "mmdp/core/errors.hpp"

namespace mmdp {

double Mmdp::probability(int m, int s, int a, int next) const {
  for (const Transition& tr : transitions(m, s, a)) {
    if (tr.next == next) return tr.probability;
  }
  return 0.0;
}

void Mmdp::rebuild_scale() {
  reward_scale_.assign(static_cast<std::size_t>(horizon_), 1.0);
  if (reward_decay_ != 1.0) {
    for (int t = 0; t < horizon_; ++t) {
      reward_scale_[static_cast<std::size_t>(t)] = std::pow(reward_decay_, t);
    }
  }
}

Mmdp Mmdp::with_horizon(int horizon) const {
  if (horizon < 1) throw DimensionMismatch("horizon must be positive, got " + std::to_string(horizon));
  Mmdp copy = *this;
  copy.horizon_ = horizon;
  copy.rebuild_scale();
  return copy;
}

Mmdp Mmdp::with_model_weights(std::vector<double> weights) const {
  if (weights.size() != static_cast<std::size_t>(n_models_)) {
    throw DimensionMismatch("expected " + std::to_string(n_models_) + " model weights, got " +
                            std::to_string(weights.size()));
  }
  Mmdp copy = *this;
  copy.weights_ = std::move(weights);
  return copy;
}

Mmdp Mmdp::with_initial_distribution(std::vector<double> initial) const {
  if (initial.size() != static_cast<std::size_t>(n_states_)) {
    throw DimensionMismatch("expected " + std::to_string(n_states_) + " initial probabilities, got " +
                            std::to_string(initial.size()));
  }
  Mmdp copy = *this;
  copy.initial_ = std::move(initial);
  return copy;
}

Mmdp Mmdp::single_model(int m) const {
  if (m < 0 || m >= n_models_) throw IndexError("model id " + std::to_string(m) + " out of range");
  const std::size_t rows = static_cast<std::size_t>(n_states_) * static_cast<std::size_t>(n_actions_);
  const std::size_t first = row_index(m, 0, 0);

  Tensors tensors;
  tensors.row_offsets.reserve(rows + 1);
  const std::size_t base = data_->row_offsets[first];
  for (std::size_t r = 0; r <= rows; ++r) tensors.row_offsets.push_back(data_->row_offsets[first + r] - base);
  tensors.entries.assign(data_->entries.begin() + static_cast<std::ptrdiff_t>(base),
                         data_->entries.begin() + static_cast<std::ptrdiff_t>(data_->row_offsets[first + rows]));
  tensors.rewards.assign(data_->rewards.begin() + static_cast<std::ptrdiff_t>(first),
                         data_->rewards.begin() + static_cast<std::ptrdiff_t>(first + rows));

  Mmdp single = *this;
  single.n_models_ = 1;
  single.data_ = std::make_shared<const Tensors>(std::move(tensors));
  single.weights_ = {1.0};
  return single;
}

MmdpBuilder::MmdpBuilder(int n_states, int n_actions, int n_models)
    : n_states_(n_states), n_actions_(n_actions), n_models_(n_models) {
  if (n_states < 1 || n_actions < 1 || n_models < 1) {
    throw DimensionMismatch("states, actions and models must all be positive");
  }
  const std::size_t rows = static_cast<std::size_t>(n_models) * static_cast<std::size_t>(n_states) *
                           static_cast<std::size_t>(n_actions);
  rewards_.assign(rows, 0.0);
  initial_.assign(static_cast<std::size_t>(n_states), 0.0);
  initial_[0] = 1.0;
  weights_.assign(static_cast<std::size_t>(n_models), 1.0 / n_models);
}

void MmdpBuilder::check_ids(int m, int s, int a) const {
  if (m < 0 || m >= n_models_) throw IndexError("model id " + std::to_string(m) + " out of range");
  if (s < 0 || s >= n_states_) throw IndexError("state id " + std::to_string(s) + " out of range");
  if (a < 0 || a >= n_actions_) throw IndexError("action id " + std::to_string(a) + " out of range");
}

MmdpBuilder& MmdpBuilder::horizon(int horizon) {
  if (horizon < 1) throw DimensionMismatch("horizon must be positive, got " + std::to_string(horizon));
  horizon_ = horizon;
  return *this;
}

MmdpBuilder& MmdpBuilder::add_transition(int m, int s, int a, int next, double probability) {
  check_ids(m, s, a);
  if (next < 0 || next >= n_states_) throw IndexError("state id " + std::to_string(next) + " out of range");
  entries_.push_back({m, s, a, next, probability});
  return *this;
}

MmdpBuilder& MmdpBuilder::set_reward(int m, int s, int a, double reward) {
  check_ids(m, s, a);
  rewards_[(static_cast<std::size_t>(m) * static_cast<std::size_t>(n_states_) + static_cast<std::size_t>(s)) *
               static_cast<std::size_t>(n_actions_) +
           static_cast<std::size_t>(a)] = reward;
  return *this;
}

MmdpBuilder& MmdpBuilder::initial_distribution(std::vector<double> initial) {
  if (initial.size() != static_cast<std::size_t>(n_states_)) {
    throw DimensionMismatch("initial distribution has " + std::to_string(initial.size()) + " entries, expected " +
                            std::to_string(n_states_));
  }
  initial_ = std::move(initial);
  return *this;
}

MmdpBuilder& MmdpBuilder::model_weights(std::vector<double> weights) {
  if (weights.size() != static_cast<std::size_t>(n_models_)) {
    throw DimensionMismatch("model weights have " + std::to_string(weights.size()) + " entries, expected " +
                            std::to_string(n_models_));
  }
  weights_ = std::move(weights);
  return *this;
}

MmdpBuilder& MmdpBuilder::discount(double discount) {
  discount_ = discount;
  return *this;
}

MmdpBuilder& MmdpBuilder::reward_decay(double decay) {
  reward_decay_ = decay;
  return *this;
}

Mmdp MmdpBuilder::build() const {
  std::vector<Entry> sorted = entries_;
  std::sort(sorted.begin(), sorted.end(), [](const Entry& x, const Entry& y) {
    return std::tie(x.m, x.s, x.a, x.next) < std::tie(y.m, y.s, y.a, y.next);
  });

  Mmdp::Tensors tensors;
  const std::size_t rows = rewards_.size();
  tensors.row_offsets.assign(rows + 1, 0);
  tensors.entries.reserve(sorted.size());
  tensors.rewards = rewards_;

  std::vector<std::size_t> counts(rows, 0);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const Entry& e = sorted[i];
    const std::size_t row =
        (static_cast<std::size_t>(e.m) * static_cast<std::size_t>(n_states_) + static_cast<std::size_t>(e.s)) *
            static_cast<std::size_t>(n_actions_) +
        static_cast<std::size_t>(e.a);
    if (i > 0) {
      const Entry& prev = sorted[i - 1];
      if (prev.m == e.m && prev.s == e.s && prev.a == e.a && prev.next == e.next) {
        tensors.entries.back().probability += e.probability;
        continue;
      }
    }
    tensors.entries.push_back({e.next, e.probability});
    ++counts[row];
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (counts[r] == 0) {
      const std::size_t a = r % static_cast<std::size_t>(n_actions_);
      const std::size_t s = (r / static_cast<std::size_t>(n_actions_)) % static_cast<std::size_t>(n_states_);
      const std::size_t m = r / (static_cast<std::size_t>(n_actions_) * static_cast<std::size_t>(n_states_));
      throw IndexError("no transitions for (model " + std::to_string(m) + ", state " + std::to_string(s) +
                       ", action " + std::to_string(a) + ")");
    }
    tensors.row_offsets[r + 1] = tensors.row_offsets[r] + counts[r];
  }

  Mmdp mmdp;
  mmdp.horizon_ = horizon_;
  mmdp.n_states_ = n_states_;
  mmdp.n_actions_ = n_actions_;
  mmdp.n_models_ = n_models_;
  mmdp.data_ = std::make_shared<const Mmdp::Tensors>(std::move(tensors));
  mmdp.initial_ = initial_;
  mmdp.weights_ = weights_;
  mmdp.discount_ = discount_;
  mmdp.reward_decay_ = reward_decay_;
  mmdp.rebuild_scale();
  return mmdp;
}

Mmdp fold_discount(const Mmdp& mmdp) {
  if (mmdp.discount_ == 1.0) return mmdp;
  Mmdp folded = mmdp;
  folded.reward_decay_ = mmdp.reward_decay_ * mmdp.discount_;
  folded.discount_ = 1.0;
  folded.rebuild_scale();
  return folded;
}

}  // namespace mmdp
