#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmdp/core/mmdp.hpp"
#include "mmdp/core/policy.hpp"
#include "mmdp/dp/values.hpp"

namespace mmdp {

enum class Termination {
  kSinglePass,     // one-shot algorithms (MVP, WSU)
  kFixedPoint,     // the policy did not change
  kTolerance,      // return improved by less than the tolerance
  kMaxIterations,  // iteration budget exhausted
};

const char* to_string(Termination termination);

struct SolveReport {
  std::string algorithm;
  Policy policy;
  /// Exact mean return of `policy` on the instance it was solved on.
  double return_value = 0.0;
  /// One entry per iteration; CADP's sequence is non-decreasing.
  std::vector<double> iterate_returns;
  int iterations = 0;
  std::chrono::duration<double> wall_time{0.0};
  Termination termination = Termination::kSinglePass;
  /// CADP only: return of the starting policy.
  std::optional<double> initial_return;
  /// First-order methods only: return of the final randomized iterate.
  std::optional<double> randomized_return;
};

/// Optimal deterministic policy of model m alone (backward induction, lowest
/// action index on ties) and its value sum_s mu(s) v*[0][m][s].
struct ModelOptimum {
  Policy policy;
  double value;
};
ModelOptimum optimal_policy(const Mmdp& mmdp, int m);

/// The single-model instance with p = sum_m lambda_m p^m and r = sum_m lambda_m r^m.
Mmdp mean_model(const Mmdp& mmdp);

/// Mean value problem: solves mean_model() and reports the exact multi-model
/// return of the resulting policy.
SolveReport solve_mvp(const Mmdp& mmdp);

/// Weight-select-update: backward pass maximizing sum_m lambda_m q_m(s, a)
/// under the partially built policy.
SolveReport solve_wsu(const Mmdp& mmdp);

/**
 * One coordinate-ascent sweep. Walks t = T-1..0 and sets
 *
 *   pi_t(s) in argmax_a sum_m b[t][m][s] * q_{t,m}(s, a)
 *
 * where b comes from the previous policy and q from the already-updated
 * suffix. The incumbent action of `warm_start` wins every tie it takes part
 * in; other ties go to the lowest action index.
 *
 * Throws DimensionMismatch for a mismatched warm start and StaleWeights when
 * the weight table does not fit the instance.
 */
Policy optimize_policy(const Mmdp& mmdp, const WeightTable& weights, const Policy& warm_start);

enum class InitialPolicy { kWsu, kMvp, kRandom };

struct CadpOptions {
  InitialPolicy init = InitialPolicy::kWsu;
  /// Overrides `init` when set. Must be deterministic.
  std::optional<Policy> initial_policy;
  /// Seed of the random initial policy.
  std::uint64_t seed = 0;
  int max_iters = 100;
  double tol = 1e-9;
  /// Throw NonMonotone if an iteration loses more than 1e-7.
  bool check_monotone = true;
};

/// Coordinate ascent dynamic programming. Alternates forward_weights and
/// optimize_policy until the policy is a fixed point, the improvement drops
/// below `tol`, or `max_iters` is reached.
SolveReport solve_cadp(const Mmdp& mmdp, const CadpOptions& options = {});

}  // namespace mmdp
