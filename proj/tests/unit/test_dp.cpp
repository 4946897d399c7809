#include <doctest.h>

#include <vector>

#include "mmdp/core/errors.hpp"
#include "mmdp/dp/solvers.hpp"
#include "mmdp/dp/values.hpp"
#include "mmdp/eval/eval.hpp"
#include "oracles.hpp"

using namespace mmdp;

namespace {

Mmdp small_instance(int i) {
  return random_instance(2 + i % 3, 2 + i % 2, 1 + i % 3, 1 + i % 4, 500 + static_cast<std::uint64_t>(i),
                         i % 2 ? 0.5 : 1.0);
}

}  // namespace

TEST_CASE("exact_return matches trajectory enumeration") {
  for (int i = 0; i < 30; ++i) {
    const Mmdp p = small_instance(i);
    const Policy d = Policy::random_deterministic(p.horizon(), p.n_states(), p.n_actions(), i);
    const Policy r = Policy::random_interior(p.horizon(), p.n_states(), p.n_actions(), i);
    CHECK(exact_return(p, d) == doctest::Approx(oracle::trajectory_return(p, d)).epsilon(1e-12));
    CHECK(exact_return(p, r) == doctest::Approx(oracle::trajectory_return(p, r)).epsilon(1e-12));
    double weighted = 0.0;
    for (int m = 0; m < p.n_models(); ++m) weighted += p.model_weight(m) * model_return(p, r, m);
    CHECK(weighted == doctest::Approx(exact_return(p, r)).epsilon(1e-12));
  }
}

TEST_CASE("backward values: terminal zero, q consistent with v") {
  const Mmdp p = small_instance(7);
  const Policy pi = Policy::random_interior(p.horizon(), p.n_states(), p.n_actions(), 3);
  const ValueTable v = backward_values(p, pi);
  for (int m = 0; m < p.n_models(); ++m) {
    for (int s = 0; s < p.n_states(); ++s) {
      CHECK(v.v(p.horizon(), m, s) == 0.0);
      for (int t = 0; t < p.horizon(); ++t) {
        double expect = 0.0;
        for (int a = 0; a < p.n_actions(); ++a) expect += pi.prob(t, s, a) * v.q(t, m, s, a);
        CHECK(v.v(t, m, s) == doctest::Approx(expect).epsilon(1e-13));
      }
    }
  }
  CHECK_FALSE(backward_values(p, pi, false).has_q());
}

TEST_CASE("forward weights keep model mass and match the hand recursion on E1") {
  for (int i = 0; i < 20; ++i) {
    const Mmdp p = small_instance(i);
    const Policy pi = Policy::random_interior(p.horizon(), p.n_states(), p.n_actions(), i);
    const WeightTable b = forward_weights(p, pi);
    for (int t = 0; t < p.horizon(); ++t) {
      double all = 0.0;
      for (int m = 0; m < p.n_models(); ++m) {
        double mass = 0.0;
        for (int s = 0; s < p.n_states(); ++s) mass += b.b(t, m, s);
        CHECK(mass == doctest::Approx(p.model_weight(m)).epsilon(1e-12));
        all += mass;
      }
      CHECK(all == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  const Mmdp e1 = oracle::e1();
  const WeightTable b = forward_weights(e1, Policy::deterministic(2, 2, 2, {1, 0, 0, 0}));
  CHECK(b.b(0, 0, 0) == 0.5);
  CHECK(b.b(1, 0, 1) == 0.5);
  CHECK(b.b(1, 1, 0) == 0.0);
}

TEST_CASE("dimension checks") {
  const Mmdp e1 = oracle::e1();
  CHECK_THROWS_AS(exact_return(e1, Policy::uniform(3, 2, 2)), DimensionMismatch);
  CHECK_THROWS_AS(backward_values(e1, Policy::uniform(2, 3, 2)), DimensionMismatch);
  CHECK_THROWS_AS(exact_return(e1, std::vector<double>(3, 0.0)), DimensionMismatch);
  const WeightTable wrong(3, 2, 2);
  CHECK_THROWS_AS(optimize_policy(e1, wrong, Policy::constant(2, 2, 2, 0)), StaleWeights);
}

TEST_CASE("E1 solver values") {
  const Mmdp e1 = oracle::e1();
  const oracle::Best best = oracle::enumerate_policies(e1);
  CHECK(best.value == doctest::Approx(1.4).epsilon(1e-15));

  const SolveReport wsu = solve_wsu(e1);
  CHECK(wsu.return_value == doctest::Approx(1.4));
  CHECK(wsu.policy.action(0, 0) == 0);
  CHECK(wsu.policy.action(1, 0) == 1);
  CHECK(wsu.termination == Termination::kSinglePass);

  // The averaged model prefers waiting one step (0.5 + 0.9) to switching now (0.9).
  const SolveReport mvp = solve_mvp(e1);
  CHECK(mvp.return_value == doctest::Approx(1.4));
  CHECK(mvp.policy == wsu.policy);

  const SolveReport cadp = solve_cadp(e1);
  CHECK(cadp.return_value == doctest::Approx(best.value).epsilon(1e-12));
  CHECK(*cadp.initial_return == doctest::Approx(1.4));
  CHECK(cadp.termination == Termination::kFixedPoint);

  CHECK(optimal_policy(e1, 0).value == doctest::Approx(2.0));
  CHECK(optimal_policy(e1, 1).value == doctest::Approx(1.8));
}

TEST_CASE("mean model averages transitions and rewards") {
  const Mmdp mean = mean_model(oracle::e1());
  CHECK(mean.n_models() == 1);
  CHECK(mean.base_reward(0, 0, 0) == doctest::Approx(0.5));
  CHECK(mean.base_reward(0, 0, 1) == doctest::Approx(0.9));
  CHECK(mean.probability(0, 0, 1, 1) == doctest::Approx(1.0));
  const Mmdp two = random_instance(3, 2, 2, 2, 4);
  const Mmdp avg = mean_model(two);
  for (int s = 0; s < 3; ++s) {
    for (int n = 0; n < 3; ++n) {
      const double expect = two.model_weight(0) * two.probability(0, s, 1, n) + two.model_weight(1) * two.probability(1, s, 1, n);
      CHECK(avg.probability(0, s, 1, n) == doctest::Approx(expect).epsilon(1e-14));
    }
  }
}

TEST_CASE("CADP is monotone, dominates WSU and never beats enumeration") {
  for (int i = 0; i < 60; ++i) {
    const Mmdp p = small_instance(i);
    const SolveReport wsu = solve_wsu(p);
    const SolveReport cadp = solve_cadp(p);
    for (std::size_t k = 1; k < cadp.iterate_returns.size(); ++k) {
      CHECK(cadp.iterate_returns[k] >= cadp.iterate_returns[k - 1] - 1e-9);
    }
    CHECK(cadp.iterate_returns.front() >= *cadp.initial_return - 1e-9);
    CHECK(cadp.return_value >= wsu.return_value - 1e-9);
    CHECK(cadp.return_value == doctest::Approx(exact_return(p, cadp.policy)).epsilon(1e-14));
    if (p.n_states() * p.horizon() <= 8) {
      CHECK(oracle::enumerate_policies(p).value >= cadp.return_value - 1e-9);
    }
  }
}

TEST_CASE("CADP initial policies") {
  const Mmdp p = random_instance(4, 3, 3, 5, 77);
  CadpOptions options;
  options.init = InitialPolicy::kMvp;
  CHECK(*solve_cadp(p, options).initial_return == doctest::Approx(solve_mvp(p).return_value));
  options.init = InitialPolicy::kRandom;
  options.seed = 7;
  const SolveReport r1 = solve_cadp(p, options);
  const SolveReport r2 = solve_cadp(p, options);
  CHECK(r1.policy == r2.policy);
  CHECK(*r1.initial_return == doctest::Approx(exact_return(p, Policy::random_deterministic(5, 4, 3, 7))));
  options.initial_policy = Policy::constant(5, 4, 3, 2);
  CHECK(*solve_cadp(p, options).initial_return == doctest::Approx(exact_return(p, Policy::constant(5, 4, 3, 2))));
  options.initial_policy = Policy::uniform(5, 4, 3);
  CHECK_THROWS_AS(solve_cadp(p, options), DimensionMismatch);
  options.initial_policy.reset();
  options.max_iters = 1;
  CHECK(solve_cadp(p, options).iterations == 1);
}

TEST_CASE("incumbent keeps ties, fresh passes take the lowest index") {
  MmdpBuilder b(1, 3, 2);
  for (int m = 0; m < 2; ++m) {
    for (int a = 0; a < 3; ++a) b.add_transition(m, 0, a, 0, 1.0).set_reward(m, 0, a, 1.0);
  }
  const Mmdp flat = b.horizon(3).build();
  const Policy incumbent = Policy::deterministic(3, 1, 3, {2, 1, 2});
  CHECK(optimize_policy(flat, forward_weights(flat, incumbent), incumbent) == incumbent);
  CHECK(solve_wsu(flat).policy == Policy::constant(3, 1, 3, 0));
  const SolveReport cadp = solve_cadp(flat);
  CHECK(cadp.termination == Termination::kFixedPoint);
  CHECK(cadp.iterations == 1);
}

TEST_CASE("optimal_policy equals enumeration on single models") {
  for (int i = 0; i < 20; ++i) {
    const Mmdp p = random_instance(2 + i % 2, 2, 1, 1 + i % 4, 900 + static_cast<std::uint64_t>(i));
    const ModelOptimum opt = optimal_policy(p, 0);
    CHECK(opt.value == doctest::Approx(oracle::enumerate_policies(p).value).epsilon(1e-12));
    CHECK(opt.value == doctest::Approx(exact_return(p, opt.policy)).epsilon(1e-12));
    CHECK(solve_mvp(p).return_value == doctest::Approx(opt.value).epsilon(1e-12));
    CHECK(solve_wsu(p).return_value == doctest::Approx(opt.value).epsilon(1e-12));
    CHECK(solve_cadp(p).return_value == doctest::Approx(opt.value).epsilon(1e-12));
  }
}

TEST_CASE("to_string(Termination)") {
  CHECK(std::string(to_string(Termination::kFixedPoint)) == "fixed_point");
  CHECK(std::string(to_string(Termination::kMaxIterations)) == "max_iterations");
}
