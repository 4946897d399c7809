#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmdp/core/mmdp.hpp"
#include "mmdp/eval/eval.hpp"

namespace mmdp {

/**
 * Two-model instance on which every Markov policy has linear regret.
 *
 * States 0..3, actions 0..1, start in state 0. In both models action 0 at
 * state 0 leads to state 1 with reward 2. Action 1 at state 0 leads to state 2
 * with reward 0 under model 0 and to state 3 with reward 3 under model 1.
 * States 1, 2 (model 0) and 1, 3 (model 1) return to state 0 under either
 * action; the remaining state is an unreachable self-loop. Weights (lambda,
 * 1 - lambda).
 */
Mmdp counterexample_mmdp(double lambda, int horizon);

enum class Likelihood { kRewards, kRewardsAndTransitions };

struct Posterior {
  std::vector<double> p;
  int updates = 0;
};

struct EpisodeLog {
  int episode = 0;
  int true_model = 0;
  int sampled_model = 0;
  std::vector<StepRecord> steps;
  double realized_return = 0.0;
  /// Exact return of the episode's policy in the true model.
  double expected_return = 0.0;
  /// Optimal value of the true model minus expected_return.
  double regret = 0.0;
};

struct MixtsOptions {
  int episodes = 100;
  std::uint64_t seed = 0;
  double likelihood_floor = 1e-6;
  Likelihood likelihood = Likelihood::kRewards;
};

struct MixtsResult {
  int true_model = 0;
  Posterior prior;
  std::vector<EpisodeLog> episodes;
  /// Posterior after each episode.
  std::vector<Posterior> posterior_trace;
  double mean_return = 0.0;
};

/**
 * Episodic Thompson sampling over the models of `prior`, acting in
 * `environment`. The true model is drawn once from the environment weights;
 * episode i samples a model from the posterior, follows that model's optimal
 * policy, and updates the posterior with the per-step likelihood
 *
 *   (1 - floor) * [r^m(s, a) == y within 1e-9] + floor
 *
 * times (1 - floor) * p^m(s'|s, a) + floor for kRewardsAndTransitions.
 * Episode i uses stream derive_seed(seed, i). Throws DegeneratePosterior when
 * every model gets likelihood zero, and DimensionMismatch when the two
 * instances differ in shape or the options are out of range.
 */
MixtsResult mixts_run(const Mmdp& prior, const Mmdp& environment, const MixtsOptions& options);
inline MixtsResult mixts_run(const Mmdp& mmdp, const MixtsOptions& options) {
  return mixts_run(mmdp, mmdp, options);
}

enum class RegretSource { kMarkovBest, kMvp, kWsu, kCadp };

const char* to_string(RegretSource source);
/// Parses "markov-best", "mvp", "wsu" or "cadp"; throws DimensionMismatch otherwise.
RegretSource parse_regret_source(const std::string& name);

struct RegretRow {
  int horizon = 0;
  double markov_best = 0.0;
  double history_best = 0.0;
  /// Exact return of the policy produced by the source.
  double achieved = 0.0;
  /// history_best - achieved.
  double regret = 0.0;
  /// min(2 lambda, 1 - lambda) / 2 * T (counterexample only, else 0).
  double bound = 0.0;
  /// Oracle value minus achieved: shortfall against knowing the model upfront.
  double clairvoyant_regret = 0.0;
};

struct RegretReport {
  std::string source;
  double lambda = 0.0;
  std::vector<RegretRow> rows;
  /// Least-squares slope of regret against T over the second half of the rows.
  double slope = 0.0;
};

/// Best return over history-dependent policies on the counterexample: either
/// always take action 0, or take action 1 once to identify the model and then
/// play that model's best action. T must be even.
double counterexample_history_best(double lambda, int horizon);

/// Regret scan on the counterexample. The Markov search enumerates only the
/// decisions at state 0 on even steps (2^(T/2) candidates).
RegretReport counterexample_regret_scan(double lambda, RegretSource source, const std::vector<int>& horizons);

/// Regret scan on any instance, measured against the Oracle bound (an upper
/// bound on the history-dependent optimum). markov-best enumerates every
/// Markov policy and throws Intractable beyond 2^20 candidates.
RegretReport regret_scan(const Mmdp& mmdp, RegretSource source, const std::vector<int>& horizons);

double fitted_slope(const std::vector<RegretRow>& rows);

}  // namespace mmdp
