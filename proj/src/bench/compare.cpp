#include "mmdp/bench/compare.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "mmdp/core/errors.hpp"
#include "mmdp/core/parallel.hpp"
#include "mmdp/eval/eval.hpp"

namespace mmdp {
namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kEvalStream = 1;
constexpr std::uint64_t kMixtsStream = 2;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double squares = 0.0;
  for (double x : xs) squares += (x - mean) * (x - mean);
  return std::sqrt(squares / static_cast<double>(xs.size() - 1));
}

void policy_row(ComparisonRow& row, const Mmdp& test, const SolveReport& report, const CompareOptions& options) {
  row.wall_time_s = report.wall_time.count();
  const EvalResult eval = monte_carlo_eval(test, report.policy, options.episodes, derive_seed(options.seed, kEvalStream));
  row.mean_return = eval.mean_return;
  row.std_return = eval.mc_std;
}

/// Each episode draws a test model and follows that model's own optimum.
void oracle_row(ComparisonRow& row, const Mmdp& test, const CompareOptions& options) {
  const auto start = Clock::now();
  std::vector<Policy> optima;
  for (int m = 0; m < test.n_models(); ++m) optima.push_back(optimal_policy(test, m).policy);
  row.mean_return = solve_oracle(test);
  row.wall_time_s = seconds_since(start);

  const std::uint64_t seed = derive_seed(options.seed, kEvalStream);
  std::vector<double> returns(static_cast<std::size_t>(options.episodes));
  parallel_for(returns.size(), [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const int m = static_cast<int>(sample_index(test.model_weights(), uniform01(rng)));
    const int s = static_cast<int>(sample_index(test.initial_distribution(), uniform01(rng)));
    returns[i] = rollout(test, m, s, optima[static_cast<std::size_t>(m)], rng);
  });
  double mean = 0.0;
  for (double r : returns) mean += r;
  row.std_return = sample_std(returns, mean / static_cast<double>(returns.size()));
}

void mixts_row(ComparisonRow& row, const Mmdp& training, const Mmdp& test, const CompareOptions& options) {
  const auto start = Clock::now();
  std::vector<std::vector<double>> per_run(static_cast<std::size_t>(std::max(options.mixts_runs, 1)));
  parallel_for(per_run.size(), [&](std::size_t r) {
    MixtsOptions mixts;
    mixts.episodes = options.mixts_episodes;
    mixts.seed = derive_seed(derive_seed(options.seed, kMixtsStream), r);
    mixts.likelihood_floor = options.likelihood_floor;
    mixts.likelihood = options.likelihood;
    const MixtsResult result = mixts_run(training, test, mixts);
    for (const EpisodeLog& log : result.episodes) per_run[r].push_back(log.realized_return);
  });
  row.wall_time_s = seconds_since(start);
  std::vector<double> returns;
  for (const auto& run : per_run) returns.insert(returns.end(), run.begin(), run.end());
  double mean = 0.0;
  for (double r : returns) mean += r;
  row.mean_return = mean / static_cast<double>(returns.size());
  row.std_return = sample_std(returns, row.mean_return);
}

}  // namespace

const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names{"mvp", "wsu", "cadp", "mirror", "gradient", "mixts", "oracle"};
  return names;
}

const ComparisonRow* ComparisonTable::find(const std::string& algorithm) const {
  for (const ComparisonRow& row : rows) {
    if (row.algorithm == algorithm) return &row;
  }
  return nullptr;
}

ComparisonTable compare(const DomainBundle& bundle, const std::vector<std::string>& algorithms,
                        const CompareOptions& options) {
  for (const std::string& name : algorithms) {
    const auto& known = known_algorithms();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw DimensionMismatch("unknown algorithm '" + name + "'");
    }
  }
  if (options.horizon < 1) throw DimensionMismatch("horizon must be positive");
  if (options.episodes < 1) throw DimensionMismatch("episodes must be positive");

  const Mmdp training = fold_discount(bundle.training.with_horizon(options.horizon));
  const Mmdp test = fold_discount(bundle.test.with_horizon(options.horizon));

  ComparisonTable table;
  table.horizon = options.horizon;
  table.episodes = options.episodes;
  table.seed = options.seed;
  for (const std::string& name : algorithms) {
    ComparisonRow row;
    row.algorithm = name;
    try {
      if (name == "mvp") {
        policy_row(row, test, solve_mvp(training), options);
      } else if (name == "wsu") {
        policy_row(row, test, solve_wsu(training), options);
      } else if (name == "cadp") {
        policy_row(row, test, solve_cadp(training, options.cadp), options);
      } else if (name == "mirror") {
        policy_row(row, test, solve_first_order(training, options.mirror), options);
      } else if (name == "gradient") {
        policy_row(row, test, solve_first_order(training, options.gradient), options);
      } else if (name == "oracle") {
        oracle_row(row, test, options);
      } else {
        mixts_row(row, training, test, options);
      }
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace mmdp
