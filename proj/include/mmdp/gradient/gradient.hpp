#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mmdp/core/mmdp.hpp"
#include "mmdp/core/policy.hpp"
#include "mmdp/dp/solvers.hpp"

namespace mmdp {

/// g[t][s][a] = d rho / d pi_t(s, a).
class GradientTable {
 public:
  GradientTable(int horizon, int n_states, int n_actions);

  int horizon() const { return horizon_; }
  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }

  double g(int t, int s, int a) const { return g_[index(t, s, a)]; }
  double& g(int t, int s, int a) { return g_[index(t, s, a)]; }
  std::span<const double> values() const { return g_; }

 private:
  std::size_t index(int t, int s, int a) const {
    return (static_cast<std::size_t>(t) * static_cast<std::size_t>(n_states_) + static_cast<std::size_t>(s)) *
               static_cast<std::size_t>(n_actions_) +
           static_cast<std::size_t>(a);
  }

  int horizon_, n_states_, n_actions_;
  std::vector<double> g_;
};

/// g[t][s][a] = sum_m b[t][m][s] * q[t][m][s][a]: one forward and one backward pass.
GradientTable policy_gradient(const Mmdp& mmdp, const Policy& policy);
GradientTable policy_gradient(const Mmdp& mmdp, std::span<const double> table);

struct GradCheckReport {
  double max_rel_err = 0.0;
  double mean_rel_err = 0.0;
  double h = 0.0;
  std::size_t checks = 0;
};

/**
 * Compares analytic and central-difference directional derivatives for every
 * (t, s, a). The direction adds h to pi_t(s, a) and removes h/(A-1) from each
 * other action of the row, so it stays tangent to the simplex (for A = 1 the
 * direction is the raw coordinate). Relative error is
 *
 *   |analytic - numeric| / max(|analytic|, |numeric|, 1e-6 * max(1, |rho|)).
 */
GradCheckReport grad_check(const Mmdp& mmdp, const Policy& policy, double h = 1e-5);

/// Euclidean projection of `values` onto the probability simplex, in place.
void project_to_simplex(std::span<double> values);

enum class FirstOrderVariant { kMirror, kProjected };

struct FirstOrderConfig {
  double step_size = 0.1;
  int iterations = 200;
  std::uint64_t seed = 0;
  FirstOrderVariant variant = FirstOrderVariant::kMirror;

  /// Default step for each variant: 0.1 mirror, 0.01 projected.
  static FirstOrderConfig defaults(FirstOrderVariant variant);
};

/**
 * Gradient ascent from the uniform policy. The report's policy is the argmax
 * rounding of the last iterate and return_value its exact return;
 * iterate_returns and randomized_return track the randomized iterates.
 * Throws StepSizeError for a non-positive step and DimensionMismatch for a
 * non-positive iteration count.
 */
SolveReport solve_first_order(const Mmdp& mmdp, const FirstOrderConfig& config);

}  // namespace mmdp
