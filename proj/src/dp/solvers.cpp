#include "mmdp/dp/solvers.hpp"

#include <string>
#include <utility>

#include "mmdp/core/errors.hpp"
#include "mmdp/core/parallel.hpp"

namespace mmdp {
namespace {

using Clock = std::chrono::steady_clock;

struct GreedyResult {
  std::vector<int> actions;       // T x S
  std::vector<double> first_values;  // v[0][m][s], M x S
};

/**
 * Backward pass shared by WSU, CADP's sweep and plain backward induction.
 * At every (t, s) picks argmax_a sum_m weight(t, m, s) * q_{t,m}(s, a), where
 * q is computed from the values of the policy built so far for later steps.
 */
template <class Weight>
GreedyResult greedy_pass(const Mmdp& mmdp, Weight&& weight, const Policy* incumbent) {
  const int T = mmdp.horizon();
  const int S = mmdp.n_states();
  const int A = mmdp.n_actions();
  const int M = mmdp.n_models();
  const auto uS = static_cast<std::size_t>(S);
  const auto uA = static_cast<std::size_t>(A);

  std::vector<double> next(static_cast<std::size_t>(M) * uS, 0.0);
  std::vector<double> current(next.size(), 0.0);
  std::vector<double> q(next.size() * uA, 0.0);
  std::vector<double> objective(uA, 0.0);
  GreedyResult result;
  result.actions.assign(static_cast<std::size_t>(T) * uS, 0);

  for (int t = T - 1; t >= 0; --t) {
    parallel_for(static_cast<std::size_t>(M), [&](std::size_t model) {
      const int m = static_cast<int>(model);
      const double* v_next = next.data() + model * uS;
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          double value = mmdp.reward(m, t, s, a);
          for (const Transition& tr : mmdp.transitions(m, s, a)) {
            value += tr.probability * v_next[static_cast<std::size_t>(tr.next)];
          }
          q[(model * uS + static_cast<std::size_t>(s)) * uA + static_cast<std::size_t>(a)] = value;
        }
      }
    });

    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        double total = 0.0;
        for (int m = 0; m < M; ++m) {
          const double w = weight(t, m, s);
          if (w == 0.0) continue;
          total += w * q[(static_cast<std::size_t>(m) * uS + static_cast<std::size_t>(s)) * uA +
                         static_cast<std::size_t>(a)];
        }
        objective[static_cast<std::size_t>(a)] = total;
      }
      int best = incumbent != nullptr ? incumbent->action(t, s) : 0;
      for (int a = 0; a < A; ++a) {
        if (a != best && objective[static_cast<std::size_t>(a)] > objective[static_cast<std::size_t>(best)]) best = a;
      }
      result.actions[static_cast<std::size_t>(t) * uS + static_cast<std::size_t>(s)] = best;
      for (int m = 0; m < M; ++m) {
        const std::size_t cell = static_cast<std::size_t>(m) * uS + static_cast<std::size_t>(s);
        current[cell] = q[cell * uA + static_cast<std::size_t>(best)];
      }
    }
    next.swap(current);
  }
  result.first_values = std::move(next);
  return result;
}

Policy to_policy(const Mmdp& mmdp, std::vector<int> actions) {
  return Policy::deterministic(mmdp.horizon(), mmdp.n_states(), mmdp.n_actions(), std::move(actions));
}

}  // namespace

const char* to_string(Termination termination) {
  switch (termination) {
    case Termination::kSinglePass:
      return "single_pass";
    case Termination::kFixedPoint:
      return "fixed_point";
    case Termination::kTolerance:
      return "tolerance";
    case Termination::kMaxIterations:
      return "max_iterations";
  }
  return "unknown";
}

ModelOptimum optimal_policy(const Mmdp& mmdp, int m) {
  const Mmdp single = mmdp.single_model(m);
  GreedyResult pass = greedy_pass(single, [](int, int, int) { return 1.0; }, nullptr);
  const auto mu = mmdp.initial_distribution();
  double value = 0.0;
  for (std::size_t s = 0; s < mu.size(); ++s) value += mu[s] * pass.first_values[s];
  return {to_policy(mmdp, std::move(pass.actions)), value};
}

Mmdp mean_model(const Mmdp& mmdp) {
  MmdpBuilder builder(mmdp.n_states(), mmdp.n_actions(), 1);
  builder.horizon(mmdp.horizon())
      .discount(mmdp.discount())
      .reward_decay(mmdp.reward_decay())
      .initial_distribution({mmdp.initial_distribution().begin(), mmdp.initial_distribution().end()});
  for (int s = 0; s < mmdp.n_states(); ++s) {
    for (int a = 0; a < mmdp.n_actions(); ++a) {
      double reward = 0.0;
      for (int m = 0; m < mmdp.n_models(); ++m) {
        const double lambda = mmdp.model_weight(m);
        reward += lambda * mmdp.base_reward(m, s, a);
        for (const Transition& tr : mmdp.transitions(m, s, a)) {
          builder.add_transition(0, s, a, tr.next, lambda * tr.probability);
        }
      }
      builder.set_reward(0, s, a, reward);
    }
  }
  return builder.build();
}

SolveReport solve_mvp(const Mmdp& mmdp) {
  const auto start = Clock::now();
  const Mmdp mean = mean_model(mmdp);
  GreedyResult pass = greedy_pass(mean, [](int, int, int) { return 1.0; }, nullptr);
  Policy policy = to_policy(mmdp, std::move(pass.actions));
  const double value = exact_return(mmdp, policy);
  return SolveReport{.algorithm = "mvp",
                     .policy = std::move(policy),
                     .return_value = value,
                     .iterate_returns = {value},
                     .iterations = 1,
                     .wall_time = Clock::now() - start};
}

SolveReport solve_wsu(const Mmdp& mmdp) {
  const auto start = Clock::now();
  GreedyResult pass = greedy_pass(
      mmdp, [&](int, int m, int) { return mmdp.model_weight(m); }, nullptr);
  Policy policy = to_policy(mmdp, std::move(pass.actions));
  const double value = exact_return(mmdp, policy);
  return SolveReport{.algorithm = "wsu",
                     .policy = std::move(policy),
                     .return_value = value,
                     .iterate_returns = {value},
                     .iterations = 1,
                     .wall_time = Clock::now() - start};
}

Policy optimize_policy(const Mmdp& mmdp, const WeightTable& weights, const Policy& warm_start) {
  check_policy_shape(mmdp, warm_start);
  if (!warm_start.is_deterministic()) throw DimensionMismatch("optimize_policy needs a deterministic warm start");
  if (weights.horizon() != mmdp.horizon() || weights.n_models() != mmdp.n_models() ||
      weights.n_states() != mmdp.n_states()) {
    throw StaleWeights("weight table is " + std::to_string(weights.horizon()) + "x" +
                       std::to_string(weights.n_models()) + "x" + std::to_string(weights.n_states()) +
                       ", instance needs " + std::to_string(mmdp.horizon()) + "x" + std::to_string(mmdp.n_models()) +
                       "x" + std::to_string(mmdp.n_states()));
  }
  GreedyResult pass = greedy_pass(
      mmdp, [&](int t, int m, int s) { return weights.b(t, m, s); }, &warm_start);
  return to_policy(mmdp, std::move(pass.actions));
}

SolveReport solve_cadp(const Mmdp& mmdp, const CadpOptions& options) {
  const auto start = Clock::now();
  if (options.max_iters < 1) throw DimensionMismatch("max_iters must be positive");

  Policy current = [&] {
    if (options.initial_policy) {
      if (!options.initial_policy->is_deterministic()) {
        throw DimensionMismatch("CADP needs a deterministic initial policy");
      }
      check_policy_shape(mmdp, *options.initial_policy);
      return *options.initial_policy;
    }
    switch (options.init) {
      case InitialPolicy::kMvp:
        return solve_mvp(mmdp).policy;
      case InitialPolicy::kRandom:
        return Policy::random_deterministic(mmdp.horizon(), mmdp.n_states(), mmdp.n_actions(), options.seed);
      case InitialPolicy::kWsu:
        break;
    }
    return solve_wsu(mmdp).policy;
  }();
  double current_return = exact_return(mmdp, current);

  SolveReport report{.algorithm = "cadp", .policy = current, .return_value = current_return};
  report.initial_return = current_return;
  report.termination = Termination::kMaxIterations;

  for (int n = 1; n <= options.max_iters; ++n) {
    const WeightTable weights = forward_weights(mmdp, current);
    Policy next = optimize_policy(mmdp, weights, current);
    const double next_return = exact_return(mmdp, next);
    if (options.check_monotone && next_return < current_return - 1e-7) {
      throw NonMonotone("CADP iteration " + std::to_string(n) + " decreased the return from " +
                        std::to_string(current_return) + " to " + std::to_string(next_return));
    }
    report.iterate_returns.push_back(next_return);
    report.iterations = n;

    const bool unchanged = next == current;
    const double improvement = next_return - current_return;
    current = std::move(next);
    current_return = next_return;
    if (unchanged) {
      report.termination = Termination::kFixedPoint;
      break;
    }
    if (improvement < options.tol) {
      report.termination = Termination::kTolerance;
      break;
    }
  }
  report.policy = std::move(current);
  report.return_value = current_return;
  report.wall_time = Clock::now() - start;
  return report;
}

}  // namespace mmdp
