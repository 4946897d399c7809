#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mmdp/bandit/bandit.hpp"
#include "mmdp/core/errors.hpp"
#include "mmdp/core/validate.hpp"
#include "mmdp/dp/solvers.hpp"
#include "mmdp/dp/values.hpp"
#include "mmdp/eval/eval.hpp"
#include "oracles.hpp"

using namespace mmdp;

TEST_CASE("counterexample structure") {
  const Mmdp p = counterexample_mmdp(0.5, 4);
  CHECK(validate(p).ok());
  CHECK(p.n_states() == 4);
  for (int m = 0; m < 2; ++m) {
    for (int s = 0; s < 4; ++s) {
      for (int a = 0; a < 2; ++a) CHECK(p.transitions(m, s, a).size() == 1);
    }
  }
  CHECK(model_return(p, Policy::constant(4, 4, 2, 0), 0) == 4.0);
  CHECK(model_return(p, Policy::constant(4, 4, 2, 1), 1) == 6.0);
  CHECK(model_return(p, Policy::constant(4, 4, 2, 1), 0) == 0.0);
  CHECK(counterexample_mmdp(0.3, 6).model_weight(0) == 0.3);
  CHECK_THROWS_AS(counterexample_mmdp(1.0, 4), DimensionMismatch);
  CHECK_THROWS_AS(counterexample_mmdp(0.5, 1), DimensionMismatch);
}

TEST_CASE("history-dependent optimum matches expectimax") {
  for (double lambda : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (int T : {2, 4, 6, 8, 10}) {
      const double tree = oracle::history_best(counterexample_mmdp(lambda, T));
      CHECK(counterexample_history_best(lambda, T) == doctest::Approx(tree).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(counterexample_history_best(0.5, 5), DimensionMismatch);
}

TEST_CASE("reduced Markov search equals full enumeration") {
  for (double lambda : {0.1, 0.5, 0.9}) {
    for (int T : {2, 4}) {
      const RegretReport r = counterexample_regret_scan(lambda, RegretSource::kMarkovBest, {T});
      CHECK(r.rows[0].markov_best == doctest::Approx(brute_force_best(counterexample_mmdp(lambda, T)).value));
    }
  }
}

TEST_CASE("counterexample regret values") {
  const RegretReport r = counterexample_regret_scan(0.5, RegretSource::kMarkovBest, {4, 8, 12, 16, 20});
  for (const RegretRow& row : r.rows) {
    const int K = row.horizon / 2;
    CHECK(row.markov_best == doctest::Approx(2.0 * K));
    CHECK(row.history_best == doctest::Approx(2.5 * K - 1.0));
    CHECK(row.regret == doctest::Approx(0.25 * row.horizon - 1.0));
    CHECK(row.bound == doctest::Approx(0.25 * row.horizon));
    CHECK(row.clairvoyant_regret == doctest::Approx(0.25 * row.horizon));
    CHECK(row.regret >= -1e-9);
  }
  CHECK(r.slope == doctest::Approx(0.25));
  const RegretReport low = counterexample_regret_scan(0.1, RegretSource::kMarkovBest, {4, 8});
  CHECK(low.rows[1].markov_best == doctest::Approx(4 * 2.7));
  for (auto source : {RegretSource::kMvp, RegretSource::kWsu, RegretSource::kCadp}) {
    const RegretReport s = counterexample_regret_scan(0.5, source, {8});
    CHECK(s.rows[0].achieved <= s.rows[0].markov_best + 1e-9);
    CHECK(s.source == to_string(source));
  }
  CHECK_THROWS_AS(counterexample_regret_scan(0.5, RegretSource::kMarkovBest, {5}), DimensionMismatch);
  CHECK(parse_regret_source("cadp") == RegretSource::kCadp);
  CHECK_THROWS_AS(parse_regret_source("mixts"), DimensionMismatch);
}

TEST_CASE("general regret scan uses the oracle bound") {
  const Mmdp e1 = oracle::e1();
  const RegretReport r = regret_scan(e1, RegretSource::kMarkovBest, {2});
  CHECK(r.rows[0].history_best == doctest::Approx(1.9));
  CHECK(r.rows[0].regret == doctest::Approx(0.5));
  CHECK(regret_scan(e1, RegretSource::kCadp, {1, 2, 3}).rows.size() == 3);
}

TEST_CASE("MixTS with one model acts optimally from the start") {
  const Mmdp p = random_instance(3, 2, 1, 4, 17);
  const MixtsResult r = mixts_run(p, {.episodes = 5, .seed = 1});
  for (const Posterior& post : r.posterior_trace) CHECK(post.p[0] == 1.0);
  for (const EpisodeLog& log : r.episodes) {
    CHECK(std::abs(log.regret) <= 1e-12);
    CHECK(log.steps.size() == 4);
  }
}

TEST_CASE("MixTS identifies the model from distinct initial rewards") {
  MmdpBuilder b(1, 1, 2);
  b.add_transition(0, 0, 0, 0, 1.0).set_reward(0, 0, 0, 1.0);
  b.add_transition(1, 0, 0, 0, 1.0).set_reward(1, 0, 0, 2.0);
  const Mmdp p = b.horizon(3).build();
  const MixtsResult r = mixts_run(p, {.episodes = 3, .seed = 5, .likelihood_floor = 0.0});
  CHECK(r.posterior_trace[0].p[static_cast<std::size_t>(r.true_model)] >= 0.99);
  CHECK(r.posterior_trace[0].updates == 1);

  MmdpBuilder other(1, 1, 1);
  other.add_transition(0, 0, 0, 0, 1.0).set_reward(0, 0, 0, 7.0);
  CHECK_THROWS_AS(mixts_run(p, other.horizon(3).build(), {.episodes = 1, .likelihood_floor = 0.0}),
                  DegeneratePosterior);
  const MixtsResult floored = mixts_run(p, other.horizon(3).build(), {.episodes = 2});
  CHECK(std::accumulate(floored.posterior_trace[1].p.begin(), floored.posterior_trace[1].p.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("MixTS on the counterexample concentrates and then has zero regret") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const MixtsResult r = mixts_run(counterexample_mmdp(0.5, 10), {.episodes = 100, .seed = seed});
    const auto truth = static_cast<std::size_t>(r.true_model);
    bool concentrated = false;
    for (std::size_t i = 0; i < r.episodes.size(); ++i) {
      const auto& post = r.posterior_trace[i].p;
      CHECK(std::abs(post[0] + post[1] - 1.0) <= 1e-12);
      CHECK(post[truth] > 0.0);
      if (concentrated) CHECK(std::abs(r.episodes[i].regret) <= 1e-9);
      concentrated = concentrated || post[truth] >= 0.99;
    }
    CHECK(concentrated);
  }
}

TEST_CASE("MixTS is deterministic and supports transition likelihoods") {
  const Mmdp p = random_instance(4, 2, 3, 5, 31, 0.6);
  const MixtsOptions options{.episodes = 20, .seed = 9, .likelihood = Likelihood::kRewardsAndTransitions};
  const MixtsResult a = mixts_run(p, options);
  const MixtsResult b = mixts_run(p, options);
  CHECK(a.true_model == b.true_model);
  CHECK(a.mean_return == b.mean_return);
  for (std::size_t i = 0; i < a.posterior_trace.size(); ++i) CHECK(a.posterior_trace[i].p == b.posterior_trace[i].p);
  CHECK_THROWS_AS(mixts_run(p, {.episodes = 0}), DimensionMismatch);
  CHECK_THROWS_AS(mixts_run(p, {.likelihood_floor = 1.0}), DimensionMismatch);
}
