#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmdp/bandit/bandit.hpp"
#include "mmdp/core/mmdp.hpp"
#include "mmdp/dp/solvers.hpp"
#include "mmdp/gradient/gradient.hpp"

namespace mmdp {

/// Algorithm names accepted by compare(), in table order.
const std::vector<std::string>& known_algorithms();

struct CompareOptions {
  int horizon = 50;
  int episodes = 10000;
  std::uint64_t seed = 0;
  CadpOptions cadp;
  FirstOrderConfig mirror = FirstOrderConfig::defaults(FirstOrderVariant::kMirror);
  FirstOrderConfig gradient = FirstOrderConfig::defaults(FirstOrderVariant::kProjected);
  /// MixTS row: independent runs of `mixts_episodes` episodes each, with the
  /// training models as prior and the test models as environment.
  int mixts_runs = 20;
  int mixts_episodes = 100;
  double likelihood_floor = 1e-6;
  Likelihood likelihood = Likelihood::kRewards;
};

struct ComparisonRow {
  std::string algorithm;
  bool ok = true;
  std::string error;
  double mean_return = 0.0;
  double std_return = 0.0;
  double wall_time_s = 0.0;
};

struct ComparisonTable {
  std::string domain;
  int horizon = 0;
  int episodes = 0;
  std::uint64_t seed = 0;
  std::vector<ComparisonRow> rows;

  const ComparisonRow* find(const std::string& algorithm) const;
};

/**
 * Solves each algorithm on the training models and evaluates the policy on
 * the test models: exact mean return and Monte-Carlo episode std. The
 * discount is folded into the rewards first. Wall time covers the solve only.
 * A row whose solver throws is marked failed and the run continues.
 * Throws DimensionMismatch for unknown algorithm names.
 */
ComparisonTable compare(const DomainBundle& bundle, const std::vector<std::string>& algorithms,
                        const CompareOptions& options);

}  // namespace mmdp
