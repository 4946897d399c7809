#include "mmdp/eval/eval.hpp"

#include <cmath>
#include <string>

#include "mmdp/core/errors.hpp"
#include "mmdp/core/parallel.hpp"
#include "mmdp/dp/solvers.hpp"
#include "mmdp/dp/values.hpp"

namespace mmdp {
namespace {

int draw_action(const Policy& policy, int t, int s, Rng& rng) {
  if (policy.is_deterministic()) return policy.action(t, s);
  return static_cast<int>(sample_index(policy.row(t, s), uniform01(rng)));
}

int draw_next(const Mmdp& mmdp, int m, int s, int a, Rng& rng) {
  const auto row = mmdp.transitions(m, s, a);
  if (row.size() == 1) return row.front().next;
  const double u = uniform01(rng);
  double total = 0.0;
  for (const Transition& tr : row) total += tr.probability;
  const double target = u * total;
  double acc = 0.0;
  for (const Transition& tr : row) {
    acc += tr.probability;
    if (target < acc) return tr.next;
  }
  return row.back().next;
}

/// Decision counts beyond this are refused; log2 of the candidate count.
double log2_candidates(int n_actions, double cells) { return cells * std::log2(static_cast<double>(n_actions)); }

SearchResult enumerate(const Mmdp& mmdp, const std::vector<std::size_t>& cells, std::vector<int> actions) {
  const int A = mmdp.n_actions();
  const int T = mmdp.horizon();
  const int S = mmdp.n_states();
  for (std::size_t c : cells) actions[c] = 0;
  auto make = [&] { return Policy::deterministic(T, S, A, actions); };

  Policy best = make();
  double best_value = exact_return(mmdp, best);
  std::uint64_t count = 1;
  while (true) {
    std::size_t k = 0;
    for (; k < cells.size(); ++k) {
      int& a = actions[cells[k]];
      if (++a < A) break;
      a = 0;
    }
    if (k == cells.size()) break;
    ++count;
    Policy candidate = make();
    const double value = exact_return(mmdp, candidate);
    if (value > best_value) {
      best_value = value;
      best = std::move(candidate);
    }
  }
  return {std::move(best), best_value, count};
}

}  // namespace

double rollout(const Mmdp& mmdp, int m, int start_state, const Policy& policy, Rng& rng,
               std::vector<StepRecord>* steps) {
  double total = 0.0;
  int s = start_state;
  for (int t = 0; t < mmdp.horizon(); ++t) {
    const int a = draw_action(policy, t, s, rng);
    const double r = mmdp.reward(m, t, s, a);
    total += r;
    if (steps != nullptr) steps->push_back({t, s, a, r});
    s = draw_next(mmdp, m, s, a, rng);
  }
  return total;
}

EvalResult monte_carlo_eval(const Mmdp& mmdp, const Policy& policy, int episodes, std::uint64_t seed) {
  if (episodes < 1) throw DimensionMismatch("episodes must be positive, got " + std::to_string(episodes));
  check_policy_shape(mmdp, policy);
  EvalResult result;
  result.mean_return = exact_return(mmdp, policy);
  result.episodes = episodes;
  result.seed = seed;

  std::vector<double> returns(static_cast<std::size_t>(episodes));
  parallel_for(returns.size(), [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const int m = static_cast<int>(sample_index(mmdp.model_weights(), uniform01(rng)));
    const int s = static_cast<int>(sample_index(mmdp.initial_distribution(), uniform01(rng)));
    returns[i] = rollout(mmdp, m, s, policy, rng);
  });

  double sum = 0.0;
  for (double r : returns) sum += r;
  result.mc_mean = sum / static_cast<double>(episodes);
  if (episodes > 1) {
    double squares = 0.0;
    for (double r : returns) squares += (r - result.mc_mean) * (r - result.mc_mean);
    result.mc_std = std::sqrt(squares / static_cast<double>(episodes - 1));
  }
  return result;
}

double solve_oracle(const Mmdp& mmdp) {
  std::vector<double> optimum(static_cast<std::size_t>(mmdp.n_models()));
  parallel_for(optimum.size(), [&](std::size_t m) { optimum[m] = optimal_policy(mmdp, static_cast<int>(m)).value; });
  double total = 0.0;
  for (std::size_t m = 0; m < optimum.size(); ++m) total += mmdp.model_weight(static_cast<int>(m)) * optimum[m];
  return total;
}

SearchResult brute_force_best(const Mmdp& mmdp) {
  const double cells = static_cast<double>(mmdp.horizon()) * static_cast<double>(mmdp.n_states());
  if (log2_candidates(mmdp.n_actions(), cells) > 24.0 + 1e-9) {
    throw Intractable("brute force over " + std::to_string(mmdp.n_actions()) + "^" +
                      std::to_string(static_cast<long long>(cells)) + " policies exceeds 2^24");
  }
  std::vector<std::size_t> all(static_cast<std::size_t>(cells));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return enumerate(mmdp, all, std::vector<int>(all.size(), 0));
}

SearchResult markov_search(const Mmdp& mmdp, const std::vector<std::pair<int, int>>& cells, const Policy& base) {
  check_policy_shape(mmdp, base);
  if (!base.is_deterministic()) throw DimensionMismatch("markov_search needs a deterministic base policy");
  if (log2_candidates(mmdp.n_actions(), static_cast<double>(cells.size())) > 20.0 + 1e-9) {
    throw Intractable("Markov search over " + std::to_string(cells.size()) + " cells exceeds 2^20 candidates");
  }
  std::vector<std::size_t> index;
  index.reserve(cells.size());
  for (const auto& [t, s] : cells) {
    if (t < 0 || t >= mmdp.horizon() || s < 0 || s >= mmdp.n_states()) {
      throw IndexError("search cell (" + std::to_string(t) + ", " + std::to_string(s) + ") is out of range");
    }
    index.push_back(static_cast<std::size_t>(t) * static_cast<std::size_t>(mmdp.n_states()) +
                    static_cast<std::size_t>(s));
  }
  return enumerate(mmdp, index, {base.actions().begin(), base.actions().end()});
}

Mmdp random_instance(int n_states, int n_actions, int n_models, int horizon, std::uint64_t seed, double sparsity) {
  if (n_states < 1 || n_actions < 1 || n_models < 1 || horizon < 1) {
    throw DimensionMismatch("random_instance dimensions must be positive");
  }
  if (!(sparsity > 0.0 && sparsity <= 1.0)) throw DimensionMismatch("sparsity must lie in (0, 1]");
  Rng rng(derive_seed(seed, 0x1257));
  auto positive = [&] { return 1.0 - uniform01(rng); };

  MmdpBuilder builder(n_states, n_actions, n_models);
  builder.horizon(horizon);
  std::vector<double> row(static_cast<std::size_t>(n_states));
  for (int m = 0; m < n_models; ++m) {
    for (int s = 0; s < n_states; ++s) {
      for (int a = 0; a < n_actions; ++a) {
        double sum = 0.0;
        for (double& p : row) {
          const bool keep = sparsity >= 1.0 || uniform01(rng) < sparsity;
          p = keep ? positive() : 0.0;
          sum += p;
        }
        if (sum == 0.0) {
          row[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n_states))] = 1.0;
          sum = 1.0;
        }
        for (int next = 0; next < n_states; ++next) {
          const double p = row[static_cast<std::size_t>(next)];
          if (p > 0.0) builder.add_transition(m, s, a, next, p / sum);
        }
        builder.set_reward(m, s, a, 2.0 * uniform01(rng) - 1.0);
      }
    }
  }
  auto normalized = [&](int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (double& x : v) sum += (x = positive());
    for (double& x : v) x /= sum;
    return v;
  };
  builder.initial_distribution(normalized(n_states));
  builder.model_weights(normalized(n_models));
  return builder.build();
}

}  // namespace mmdp
