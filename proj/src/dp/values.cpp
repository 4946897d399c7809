#include "mmdp/dp/values.hpp"

#include <string>

#include "mmdp/core/errors.hpp"
#include "mmdp/core/parallel.hpp"

namespace mmdp {
namespace {

/// Read-only view of a policy table; `actions` is set for deterministic
/// policies and lets the backups skip the action loop.
struct PolicyView {
  std::span<const double> table;
  std::span<const int> actions;
  int n_states;
  int n_actions;

  double prob(int t, int s, int a) const {
    return table[(static_cast<std::size_t>(t) * static_cast<std::size_t>(n_states) + static_cast<std::size_t>(s)) *
                     static_cast<std::size_t>(n_actions) +
                 static_cast<std::size_t>(a)];
  }
  bool deterministic() const { return !actions.empty(); }
  int action(int t, int s) const {
    return actions[static_cast<std::size_t>(t) * static_cast<std::size_t>(n_states) + static_cast<std::size_t>(s)];
  }
};

PolicyView view_of(const Mmdp& mmdp, const Policy& policy) {
  check_policy_shape(mmdp, policy);
  return {policy.probabilities(), policy.is_deterministic() ? policy.actions() : std::span<const int>{},
          mmdp.n_states(), mmdp.n_actions()};
}

PolicyView view_of(const Mmdp& mmdp, std::span<const double> table) {
  const std::size_t expected = static_cast<std::size_t>(mmdp.horizon()) *
                               static_cast<std::size_t>(mmdp.n_states()) * static_cast<std::size_t>(mmdp.n_actions());
  if (table.size() != expected) {
    throw DimensionMismatch("policy table has " + std::to_string(table.size()) + " entries, expected " +
                            std::to_string(expected));
  }
  return {table, {}, mmdp.n_states(), mmdp.n_actions()};
}

inline double backup(const Mmdp& mmdp, int m, int t, int s, int a, std::span<const double> next_values) {
  double q = mmdp.reward(m, t, s, a);
  for (const Transition& tr : mmdp.transitions(m, s, a)) {
    q += tr.probability * next_values[static_cast<std::size_t>(tr.next)];
  }
  return q;
}

ValueTable evaluate(const Mmdp& mmdp, const PolicyView& policy, bool with_q) {
  const int T = mmdp.horizon();
  const int S = mmdp.n_states();
  const int A = mmdp.n_actions();
  ValueTable values(T, mmdp.n_models(), S, A, with_q);

  parallel_for(static_cast<std::size_t>(mmdp.n_models()), [&](std::size_t model) {
    const int m = static_cast<int>(model);
    for (int t = T - 1; t >= 0; --t) {
      const auto next = values.values(t + 1, m);
      for (int s = 0; s < S; ++s) {
        double v = 0.0;
        if (policy.deterministic() && !with_q) {
          v = backup(mmdp, m, t, s, policy.action(t, s), next);
        } else {
          for (int a = 0; a < A; ++a) {
            const double pi = policy.prob(t, s, a);
            if (pi == 0.0 && !with_q) continue;
            const double q = backup(mmdp, m, t, s, a, next);
            if (with_q) values.q(t, m, s, a) = q;
            if (pi != 0.0) v += pi * q;
          }
        }
        values.v(t, m, s) = v;
      }
    }
  });
  return values;
}

WeightTable propagate(const Mmdp& mmdp, const PolicyView& policy) {
  const int T = mmdp.horizon();
  const int S = mmdp.n_states();
  const int A = mmdp.n_actions();
  WeightTable weights(T, mmdp.n_models(), S);
  const auto mu = mmdp.initial_distribution();

  parallel_for(static_cast<std::size_t>(mmdp.n_models()), [&](std::size_t model) {
    const int m = static_cast<int>(model);
    const double lambda = mmdp.model_weight(m);
    for (int s = 0; s < S; ++s) weights.b(0, m, s) = lambda * mu[static_cast<std::size_t>(s)];
    for (int t = 0; t + 1 < T; ++t) {
      for (int s = 0; s < S; ++s) {
        const double mass = weights.b(t, m, s);
        if (mass == 0.0) continue;
        for (int a = 0; a < A; ++a) {
          const double pi = policy.prob(t, s, a);
          if (pi == 0.0) continue;
          for (const Transition& tr : mmdp.transitions(m, s, a)) {
            weights.b(t + 1, m, tr.next) += tr.probability * pi * mass;
          }
        }
      }
    }
  });
  return weights;
}

/// v[0][m][.] for one model using two rolling buffers.
void initial_values(const Mmdp& mmdp, const PolicyView& policy, int m, std::vector<double>& next,
                    std::vector<double>& current) {
  const int S = mmdp.n_states();
  const int A = mmdp.n_actions();
  next.assign(static_cast<std::size_t>(S), 0.0);
  current.assign(static_cast<std::size_t>(S), 0.0);
  for (int t = mmdp.horizon() - 1; t >= 0; --t) {
    for (int s = 0; s < S; ++s) {
      double v = 0.0;
      if (policy.deterministic()) {
        v = backup(mmdp, m, t, s, policy.action(t, s), next);
      } else {
        for (int a = 0; a < A; ++a) {
          const double pi = policy.prob(t, s, a);
          if (pi != 0.0) v += pi * backup(mmdp, m, t, s, a, next);
        }
      }
      current[static_cast<std::size_t>(s)] = v;
    }
    next.swap(current);
  }
}

double model_value(const Mmdp& mmdp, const PolicyView& policy, int m) {
  std::vector<double> next, current;
  initial_values(mmdp, policy, m, next, current);
  const auto mu = mmdp.initial_distribution();
  double total = 0.0;
  for (std::size_t s = 0; s < mu.size(); ++s) total += mu[s] * next[s];
  return total;
}

double mean_return(const Mmdp& mmdp, const PolicyView& policy) {
  std::vector<double> per_model(static_cast<std::size_t>(mmdp.n_models()));
  parallel_for(per_model.size(), [&](std::size_t m) {
    per_model[m] = model_value(mmdp, policy, static_cast<int>(m));
  });
  double total = 0.0;
  for (std::size_t m = 0; m < per_model.size(); ++m) total += mmdp.model_weight(static_cast<int>(m)) * per_model[m];
  return total;
}

}  // namespace

ValueTable::ValueTable(int horizon, int n_models, int n_states, int n_actions, bool with_q)
    : horizon_(horizon), n_models_(n_models), n_states_(n_states), n_actions_(n_actions) {
  v_.assign(static_cast<std::size_t>(horizon + 1) * static_cast<std::size_t>(n_models) *
                static_cast<std::size_t>(n_states),
            0.0);
  if (with_q) {
    q_.assign(static_cast<std::size_t>(horizon) * static_cast<std::size_t>(n_models) *
                  static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_actions),
              0.0);
  }
}

WeightTable::WeightTable(int horizon, int n_models, int n_states)
    : horizon_(horizon), n_models_(n_models), n_states_(n_states) {
  b_.assign(static_cast<std::size_t>(horizon) * static_cast<std::size_t>(n_models) *
                static_cast<std::size_t>(n_states),
            0.0);
}

void check_policy_shape(const Mmdp& mmdp, const Policy& policy) {
  if (!policy.same_shape(mmdp.horizon(), mmdp.n_states(), mmdp.n_actions())) {
    throw DimensionMismatch("policy is " + std::to_string(policy.horizon()) + "x" +
                            std::to_string(policy.n_states()) + "x" + std::to_string(policy.n_actions()) +
                            " but the instance is " + std::to_string(mmdp.horizon()) + "x" +
                            std::to_string(mmdp.n_states()) + "x" + std::to_string(mmdp.n_actions()));
  }
}

ValueTable backward_values(const Mmdp& mmdp, const Policy& policy, bool with_q) {
  return evaluate(mmdp, view_of(mmdp, policy), with_q);
}

ValueTable backward_values(const Mmdp& mmdp, std::span<const double> table, bool with_q) {
  return evaluate(mmdp, view_of(mmdp, table), with_q);
}

WeightTable forward_weights(const Mmdp& mmdp, const Policy& policy) {
  return propagate(mmdp, view_of(mmdp, policy));
}

WeightTable forward_weights(const Mmdp& mmdp, std::span<const double> table) {
  return propagate(mmdp, view_of(mmdp, table));
}

double exact_return(const Mmdp& mmdp, const Policy& policy) { return mean_return(mmdp, view_of(mmdp, policy)); }

double exact_return(const Mmdp& mmdp, std::span<const double> table) {
  return mean_return(mmdp, view_of(mmdp, table));
}

double model_return(const Mmdp& mmdp, const Policy& policy, int m) {
  return model_value(mmdp, view_of(mmdp, policy), m);
}

}  // namespace mmdp
