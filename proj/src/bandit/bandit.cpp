#include "mmdp/bandit/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "mmdp/core/errors.hpp"
#include "mmdp/core/random.hpp"
#include "mmdp/dp/solvers.hpp"
#include "mmdp/dp/values.hpp"

namespace mmdp {
namespace {

constexpr std::uint64_t kTrueModelStream = 0x7ab1e5eedULL;

Posterior normalize(const std::vector<double>& log_p, int updates) {
  const double top = *std::max_element(log_p.begin(), log_p.end());
  if (top == -std::numeric_limits<double>::infinity()) {
    throw DegeneratePosterior("every model has likelihood zero after " + std::to_string(updates) + " updates");
  }
  Posterior posterior;
  posterior.updates = updates;
  posterior.p.resize(log_p.size());
  double sum = 0.0;
  for (std::size_t m = 0; m < log_p.size(); ++m) sum += posterior.p[m] = std::exp(log_p[m] - top);
  for (double& x : posterior.p) x /= sum;
  return posterior;
}

void check_compatible(const Mmdp& prior, const Mmdp& environment) {
  if (prior.n_states() != environment.n_states() || prior.n_actions() != environment.n_actions() ||
      prior.horizon() != environment.horizon()) {
    throw DimensionMismatch("prior and environment instances differ in states, actions or horizon");
  }
}

double bound_for(double lambda, int horizon) { return std::min(2.0 * lambda, 1.0 - lambda) / 2.0 * horizon; }

Policy source_policy(const Mmdp& mmdp, RegretSource source) {
  switch (source) {
    case RegretSource::kMvp:
      return solve_mvp(mmdp).policy;
    case RegretSource::kWsu:
      return solve_wsu(mmdp).policy;
    case RegretSource::kCadp:
      return solve_cadp(mmdp).policy;
    case RegretSource::kMarkovBest:
      break;
  }
  throw DimensionMismatch("markov-best has no solver policy");
}

}  // namespace

Mmdp counterexample_mmdp(double lambda, int horizon) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DimensionMismatch("lambda must lie in (0, 1)");
  if (horizon < 2) throw DimensionMismatch("the counterexample needs a horizon of at least 2");
  MmdpBuilder builder(4, 2, 2);
  builder.horizon(horizon).model_weights({lambda, 1.0 - lambda}).initial_distribution({1.0, 0.0, 0.0, 0.0});
  for (int m = 0; m < 2; ++m) {
    const int explore = m == 0 ? 2 : 3;  // where action 1 leads from state 0
    const int trap = m == 0 ? 3 : 2;
    builder.add_transition(m, 0, 0, 1, 1.0).set_reward(m, 0, 0, 2.0);
    builder.add_transition(m, 0, 1, explore, 1.0).set_reward(m, 0, 1, m == 0 ? 0.0 : 3.0);
    for (int a = 0; a < 2; ++a) {
      builder.add_transition(m, 1, a, 0, 1.0);
      builder.add_transition(m, explore, a, 0, 1.0);
      builder.add_transition(m, trap, a, trap, 1.0);
    }
  }
  return builder.build();
}

MixtsResult mixts_run(const Mmdp& prior, const Mmdp& environment, const MixtsOptions& options) {
  check_compatible(prior, environment);
  if (options.episodes < 1) throw DimensionMismatch("episodes must be positive");
  if (!(options.likelihood_floor >= 0.0 && options.likelihood_floor < 1.0)) {
    throw DimensionMismatch("likelihood floor must lie in [0, 1)");
  }
  const int M = prior.n_models();
  const double floor = options.likelihood_floor;

  MixtsResult result;
  {
    Rng rng(derive_seed(options.seed, kTrueModelStream));
    result.true_model = static_cast<int>(sample_index(environment.model_weights(), uniform01(rng)));
  }
  const int truth = result.true_model;
  const double truth_optimum = optimal_policy(environment, truth).value;

  std::vector<std::optional<Policy>> policies(static_cast<std::size_t>(M));
  std::vector<double> log_p(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    const double w = prior.model_weight(m);
    log_p[static_cast<std::size_t>(m)] = w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity();
  }
  result.prior = normalize(log_p, 0);
  Posterior current = result.prior;

  double total = 0.0;
  for (int i = 0; i < options.episodes; ++i) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(i)));
    EpisodeLog log;
    log.episode = i;
    log.true_model = truth;
    log.sampled_model = static_cast<int>(sample_index(current.p, uniform01(rng)));
    auto& policy = policies[static_cast<std::size_t>(log.sampled_model)];
    if (!policy) policy = optimal_policy(prior, log.sampled_model).policy;

    int s = static_cast<int>(sample_index(environment.initial_distribution(), uniform01(rng)));
    for (int t = 0; t < environment.horizon(); ++t) {
      const int a = policy->action(t, s);
      const double y = environment.reward(truth, t, s, a);
      const auto row = environment.transitions(truth, s, a);
      int next = row.back().next;
      if (row.size() > 1) {
        std::vector<double> p(row.size());
        for (std::size_t k = 0; k < row.size(); ++k) p[k] = row[k].probability;
        next = row[sample_index(p, uniform01(rng))].next;
      }
      for (int m = 0; m < M; ++m) {
        double& lp = log_p[static_cast<std::size_t>(m)];
        const bool match = std::abs(prior.reward(m, t, s, a) - y) <= 1e-9;
        lp += std::log((match ? 1.0 - floor : 0.0) + floor);
        if (options.likelihood == Likelihood::kRewardsAndTransitions) {
          lp += std::log((1.0 - floor) * prior.probability(m, s, a, next) + floor);
        }
      }
      log.steps.push_back({t, s, a, y});
      log.realized_return += y;
      s = next;
    }
    current = normalize(log_p, i + 1);
    log.expected_return = model_return(environment, *policy, truth);
    log.regret = truth_optimum - log.expected_return;
    total += log.realized_return;
    result.posterior_trace.push_back(current);
    result.episodes.push_back(std::move(log));
  }
  result.mean_return = total / static_cast<double>(options.episodes);
  return result;
}

const char* to_string(RegretSource source) {
  switch (source) {
    case RegretSource::kMarkovBest:
      return "markov-best";
    case RegretSource::kMvp:
      return "mvp";
    case RegretSource::kWsu:
      return "wsu";
    case RegretSource::kCadp:
      return "cadp";
  }
  return "unknown";
}

RegretSource parse_regret_source(const std::string& name) {
  for (RegretSource source : {RegretSource::kMarkovBest, RegretSource::kMvp, RegretSource::kWsu, RegretSource::kCadp}) {
    if (name == to_string(source)) return source;
  }
  throw DimensionMismatch("unknown regret policy source '" + name + "'");
}

double counterexample_history_best(double lambda, int horizon) {
  if (horizon < 2 || horizon % 2 != 0) throw DimensionMismatch("counterexample horizons must be even");
  const double cycles = horizon / 2;
  const double identify = (1.0 - lambda) * 3.0 + (cycles - 1.0) * (2.0 * lambda + 3.0 * (1.0 - lambda));
  return std::max(2.0 * cycles, identify);
}

double fitted_slope(const std::vector<RegretRow>& rows) {
  if (rows.empty()) return 0.0;
  if (rows.size() == 1) return rows.front().regret / rows.front().horizon;
  const std::size_t first = rows.size() >= 4 ? rows.size() / 2 : 0;
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(rows.size() - first);
  for (std::size_t i = first; i < rows.size(); ++i) {
    mx += rows[i].horizon;
    my += rows[i].regret;
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = first; i < rows.size(); ++i) {
    sxy += (rows[i].horizon - mx) * (rows[i].regret - my);
    sxx += (rows[i].horizon - mx) * (rows[i].horizon - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

RegretReport counterexample_regret_scan(double lambda, RegretSource source, const std::vector<int>& horizons) {
  RegretReport report;
  report.source = to_string(source);
  report.lambda = lambda;
  for (int T : horizons) {
    if (T < 2 || T % 2 != 0) throw DimensionMismatch("counterexample horizons must be even, got " + std::to_string(T));
    const Mmdp mmdp = counterexample_mmdp(lambda, T);
    std::vector<std::pair<int, int>> cells;
    for (int t = 0; t < T; t += 2) cells.emplace_back(t, 0);
    const SearchResult best = markov_search(mmdp, cells, Policy::constant(T, 4, 2, 0));

    RegretRow row;
    row.horizon = T;
    row.markov_best = best.value;
    row.history_best = counterexample_history_best(lambda, T);
    row.achieved = source == RegretSource::kMarkovBest ? best.value : exact_return(mmdp, source_policy(mmdp, source));
    row.regret = row.history_best - row.achieved;
    row.bound = bound_for(lambda, T);
    row.clairvoyant_regret = solve_oracle(mmdp) - row.achieved;
    report.rows.push_back(row);
  }
  report.slope = fitted_slope(report.rows);
  return report;
}

RegretReport regret_scan(const Mmdp& base, RegretSource source, const std::vector<int>& horizons) {
  RegretReport report;
  report.source = to_string(source);
  for (int T : horizons) {
    if (T < 1) throw DimensionMismatch("horizons must be positive");
    const Mmdp mmdp = base.with_horizon(T);
    std::vector<std::pair<int, int>> cells;
    for (int t = 0; t < T; ++t) {
      for (int s = 0; s < mmdp.n_states(); ++s) cells.emplace_back(t, s);
    }
    RegretRow row;
    row.horizon = T;
    row.history_best = solve_oracle(mmdp);
    if (source == RegretSource::kMarkovBest) {
      row.markov_best = markov_search(mmdp, cells, Policy::constant(T, mmdp.n_states(), mmdp.n_actions(), 0)).value;
      row.achieved = row.markov_best;
    } else {
      row.achieved = exact_return(mmdp, source_policy(mmdp, source));
      row.markov_best = std::numeric_limits<double>::quiet_NaN();
    }
    row.regret = row.history_best - row.achieved;
    row.clairvoyant_regret = row.regret;
    report.rows.push_back(row);
  }
  report.slope = fitted_slope(report.rows);
  return report;
}

}  // namespace mmdp
