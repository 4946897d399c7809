#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mmdp/core/mmdp.hpp"
#include "mmdp/core/policy.hpp"
#include "mmdp/core/random.hpp"

namespace mmdp {

struct EvalResult {
  double mean_return = 0.0;  // exact
  double mc_mean = 0.0;
  double mc_std = 0.0;  // sample standard deviation of episode returns
  int episodes = 0;
  std::uint64_t seed = 0;
};

struct StepRecord {
  int t;
  int state;
  int action;
  double reward;
};

/// Simulates one episode of `policy` in model m from `start_state` and returns
/// the realized return. Appends one record per step to `steps` when given.
double rollout(const Mmdp& mmdp, int m, int start_state, const Policy& policy, Rng& rng,
               std::vector<StepRecord>* steps = nullptr);

/// Exact return plus a Monte-Carlo estimate. Episode i draws the model from
/// lambda, the start state from mu and the trajectory from stream
/// derive_seed(seed, i), so results do not depend on the thread count.
EvalResult monte_carlo_eval(const Mmdp& mmdp, const Policy& policy, int episodes, std::uint64_t seed);

/// sum_m lambda_m * (optimal value of model m alone); an upper bound on the
/// best Markov return.
double solve_oracle(const Mmdp& mmdp);

struct SearchResult {
  Policy policy;
  double value;
  std::uint64_t candidates;
};

/// Enumerates every deterministic Markov policy. Throws Intractable when
/// A^(S*T) exceeds 2^24.
SearchResult brute_force_best(const Mmdp& mmdp);

/**
 * Enumerates the actions of the listed (t, s) cells and keeps every other
 * cell at its action in `base`. Throws Intractable when A^cells exceeds 2^20.
 * Ties keep the first candidate in odometer order (cell 0 varies fastest).
 */
SearchResult markov_search(const Mmdp& mmdp, const std::vector<std::pair<int, int>>& cells, const Policy& base);

/// Random instance with sparse random rows (each next state kept with
/// probability `sparsity`, never empty), rewards uniform in [-1, 1] and
/// normalized uniform initial distribution and model weights.
Mmdp random_instance(int n_states, int n_actions, int n_models, int horizon, std::uint64_t seed,
                     double sparsity = 1.0);

}  // namespace mmdp
