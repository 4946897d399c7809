#include "mmdp/gradient/gradient.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <string>

#include "mmdp/core/errors.hpp"
#include "mmdp/dp/values.hpp"

namespace mmdp {
namespace {

GradientTable assemble(const Mmdp& mmdp, const ValueTable& values, const WeightTable& weights) {
  const int T = mmdp.horizon();
  const int S = mmdp.n_states();
  const int A = mmdp.n_actions();
  const int M = mmdp.n_models();
  GradientTable grad(T, S, A);
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        double total = 0.0;
        for (int m = 0; m < M; ++m) {
          const double b = weights.b(t, m, s);
          if (b != 0.0) total += b * values.q(t, m, s, a);
        }
        grad.g(t, s, a) = total;
      }
    }
  }
  return grad;
}

std::size_t table_size(const Mmdp& mmdp) {
  return static_cast<std::size_t>(mmdp.horizon()) * static_cast<std::size_t>(mmdp.n_states()) *
         static_cast<std::size_t>(mmdp.n_actions());
}

}  // namespace

GradientTable::GradientTable(int horizon, int n_states, int n_actions)
    : horizon_(horizon), n_states_(n_states), n_actions_(n_actions) {
  g_.assign(static_cast<std::size_t>(horizon) * static_cast<std::size_t>(n_states) *
                static_cast<std::size_t>(n_actions),
            0.0);
}

GradientTable policy_gradient(const Mmdp& mmdp, const Policy& policy) {
  return assemble(mmdp, backward_values(mmdp, policy, true), forward_weights(mmdp, policy));
}

GradientTable policy_gradient(const Mmdp& mmdp, std::span<const double> table) {
  return assemble(mmdp, backward_values(mmdp, table, true), forward_weights(mmdp, table));
}

GradCheckReport grad_check(const Mmdp& mmdp, const Policy& policy, double h) {
  const GradientTable grad = policy_gradient(mmdp, policy);
  const double rho = exact_return(mmdp, policy);
  const double floor = 1e-6 * std::max(1.0, std::abs(rho));
  const int A = mmdp.n_actions();
  const double other = A > 1 ? h / static_cast<double>(A - 1) : 0.0;

  std::vector<double> probe(policy.probabilities().begin(), policy.probabilities().end());
  GradCheckReport report;
  report.h = h;
  double total = 0.0;
  for (int t = 0; t < mmdp.horizon(); ++t) {
    for (int s = 0; s < mmdp.n_states(); ++s) {
      const std::size_t base = (static_cast<std::size_t>(t) * static_cast<std::size_t>(mmdp.n_states()) +
                                static_cast<std::size_t>(s)) *
                               static_cast<std::size_t>(A);
      for (int a = 0; a < A; ++a) {
        double analytic = 0.0;
        for (int b = 0; b < A; ++b) analytic += grad.g(t, s, b) * (b == a ? 1.0 : -other / h);
        auto shift = [&](double sign) {
          for (int b = 0; b < A; ++b) probe[base + static_cast<std::size_t>(b)] += sign * (b == a ? h : -other);
        };
        shift(1.0);
        const double up = exact_return(mmdp, probe);
        shift(-2.0);
        const double down = exact_return(mmdp, probe);
        for (int b = 0; b < A; ++b) {
          probe[base + static_cast<std::size_t>(b)] = policy.prob(t, s, b);
        }
        const double numeric = (up - down) / (2.0 * h);
        const double err =
            std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
        report.max_rel_err = std::max(report.max_rel_err, err);
        total += err;
        ++report.checks;
      }
    }
  }
  if (report.checks > 0) report.mean_rel_err = total / static_cast<double>(report.checks);
  return report;
}

void project_to_simplex(std::span<double> values) {
  if (values.empty()) return;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  double sum = 0.0;
  for (double& v : values) {
    v = std::max(v - theta, 0.0);
    sum += v;
  }
  for (double& v : values) v /= sum;
}

FirstOrderConfig FirstOrderConfig::defaults(FirstOrderVariant variant) {
  FirstOrderConfig config;
  config.variant = variant;
  config.step_size = variant == FirstOrderVariant::kMirror ? 0.1 : 0.01;
  return config;
}

SolveReport solve_first_order(const Mmdp& mmdp, const FirstOrderConfig& config) {
  if (!(config.step_size > 0.0) || !std::isfinite(config.step_size)) {
    throw StepSizeError("step size must be positive, got " + std::to_string(config.step_size));
  }
  if (config.iterations < 1) throw DimensionMismatch("iterations must be positive");
  const auto start = std::chrono::steady_clock::now();
  const int A = mmdp.n_actions();
  const auto uA = static_cast<std::size_t>(A);
  const std::size_t rows = table_size(mmdp) / uA;

  std::vector<double> table(table_size(mmdp), 1.0 / static_cast<double>(A));
  SolveReport report{.algorithm = config.variant == FirstOrderVariant::kMirror ? "mirror" : "gradient",
                     .policy = Policy::uniform(mmdp.horizon(), mmdp.n_states(), A)};
  report.termination = Termination::kMaxIterations;

  for (int n = 0; n < config.iterations; ++n) {
    const GradientTable grad = policy_gradient(mmdp, table);
    const auto g = grad.values();
    for (std::size_t r = 0; r < rows; ++r) {
      const std::span<double> row(table.data() + r * uA, uA);
      const std::span<const double> gr = g.subspan(r * uA, uA);
      if (config.variant == FirstOrderVariant::kMirror) {
        const double top = *std::max_element(gr.begin(), gr.end());
        double sum = 0.0;
        for (std::size_t a = 0; a < uA; ++a) {
          row[a] *= std::exp(config.step_size * (gr[a] - top));
          sum += row[a];
        }
        for (double& p : row) p /= sum;
      } else {
        for (std::size_t a = 0; a < uA; ++a) row[a] += config.step_size * gr[a];
        project_to_simplex(row);
      }
    }
    report.iterate_returns.push_back(exact_return(mmdp, table));
  }

  const Policy randomized = Policy::randomized(mmdp.horizon(), mmdp.n_states(), A, table);
  report.policy = randomized.rounded();
  report.return_value = exact_return(mmdp, report.policy);
  report.randomized_return = report.iterate_returns.back();
  report.iterations = config.iterations;
  report.wall_time = std::chrono::steady_clock::now() - start;
  return report;
}

}  // namespace mmdp
