#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mmdp/core/mmdp.hpp"
#include "mmdp/core/policy.hpp"

namespace mmdp {

/**
 * Per-model value functions v[t][m][s] for t = 0..T (v[T] == 0) and,
 * optionally, the state-action values q[t][m][s][a] for t = 0..T-1.
 */
class ValueTable {
 public:
  ValueTable(int horizon, int n_models, int n_states, int n_actions, bool with_q);

  int horizon() const { return horizon_; }
  int n_models() const { return n_models_; }
  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  bool has_q() const { return !q_.empty(); }

  double v(int t, int m, int s) const { return v_[v_index(t, m, s)]; }
  double& v(int t, int m, int s) { return v_[v_index(t, m, s)]; }
  double q(int t, int m, int s, int a) const { return q_[q_index(t, m, s, a)]; }
  double& q(int t, int m, int s, int a) { return q_[q_index(t, m, s, a)]; }

  /// v[t][m][.] as a contiguous slice of n_states values.
  std::span<const double> values(int t, int m) const {
    return {v_.data() + v_index(t, m, 0), static_cast<std::size_t>(n_states_)};
  }

 private:
  std::size_t v_index(int t, int m, int s) const {
    return (static_cast<std::size_t>(t) * static_cast<std::size_t>(n_models_) + static_cast<std::size_t>(m)) *
               static_cast<std::size_t>(n_states_) +
           static_cast<std::size_t>(s);
  }
  std::size_t q_index(int t, int m, int s, int a) const {
    return v_index(t, m, s) * static_cast<std::size_t>(n_actions_) + static_cast<std::size_t>(a);
  }

  int horizon_, n_models_, n_states_, n_actions_;
  std::vector<double> v_;
  std::vector<double> q_;
};

/// Adjustable model weights: b[t][m][s] = P[model = m, state_t = s] under a policy.
class WeightTable {
 public:
  WeightTable(int horizon, int n_models, int n_states);

  int horizon() const { return horizon_; }
  int n_models() const { return n_models_; }
  int n_states() const { return n_states_; }

  double b(int t, int m, int s) const { return b_[index(t, m, s)]; }
  double& b(int t, int m, int s) { return b_[index(t, m, s)]; }
  /// Layer t as an n_models x n_states row-major slice.
  std::span<const double> layer(int t) const {
    return {b_.data() + index(t, 0, 0), static_cast<std::size_t>(n_models_) * static_cast<std::size_t>(n_states_)};
  }

 private:
  std::size_t index(int t, int m, int s) const {
    return (static_cast<std::size_t>(t) * static_cast<std::size_t>(n_models_) + static_cast<std::size_t>(m)) *
               static_cast<std::size_t>(n_states_) +
           static_cast<std::size_t>(s);
  }

  int horizon_, n_models_, n_states_;
  std::vector<double> b_;
};

/// Policy evaluation by backward induction (Bellman backup per model).
/// Throws DimensionMismatch when the policy shape does not match.
ValueTable backward_values(const Mmdp& mmdp, const Policy& policy, bool with_q = true);

/// Forward recursion of the adjustable model weights under `policy`.
WeightTable forward_weights(const Mmdp& mmdp, const Policy& policy);

/// Mean return across models, sum_m lambda_m sum_s mu(s) v[0][m][s].
double exact_return(const Mmdp& mmdp, const Policy& policy);

/// Return of model m alone, sum_s mu(s) v[0][m][s].
double model_return(const Mmdp& mmdp, const Policy& policy, int m);

/// Same computations over a raw T x S x A table that need not lie on the
/// simplex. The return is multilinear in the table, so this is well defined
/// for finite-difference probes outside the policy set.
double exact_return(const Mmdp& mmdp, std::span<const double> table);
ValueTable backward_values(const Mmdp& mmdp, std::span<const double> table, bool with_q = true);
WeightTable forward_weights(const Mmdp& mmdp, std::span<const double> table);

void check_policy_shape(const Mmdp& mmdp, const Policy& policy);

}  // namespace mmdp
