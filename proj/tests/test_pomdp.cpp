#include <doctest.h>

#include <random>

#include "models.hpp"
#include "oracles.hpp"
#include "reach/errors.hpp"
#include "reach/generators.hpp"
#include "reach/pomdp.hpp"

using namespace reach;

namespace {

// Random POMDP with dense-ish rows; the last state is the target.
Pomdp random_pomdp(std::mt19937_64& rng, int S, int A, int O) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Pomdp p(S, A, O);
  for (int a = 0; a < A; ++a) {
    for (int s = 0; s < S; ++s) {
      std::vector<double> w(S);
      double total = 0.0;
      for (auto& x : w) total += (x = u(rng) < 0.5 ? 0.0 : u(rng));
      if (total == 0.0) w[s] = total = 1.0;
      for (int n = 0; n < S; ++n) {
        if (w[n] > 0.0) p.add_transition(s, a, n, w[n] / total);
      }
      std::vector<double> z(O);
      total = 0.0;
      for (auto& x : z) total += (x = u(rng));
      for (int o = 0; o < O; ++o) p.add_observation(s, a, o, z[o] / total);
    }
  }
  std::vector<Belief::Entry> b0;
  for (int s = 0; s + 1 < S; ++s) b0.push_back({s, u(rng) + 0.1});
  p.set_initial_belief(Belief::from_entries(std::move(b0)));
  p.set_targets({S - 1});
  return p;
}

Belief random_belief(std::mt19937_64& rng, int S) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Belief::Entry> e;
  for (int s = 0; s < S; ++s) {
    if (u(rng) < 0.7) e.push_back({s, u(rng) + 1e-3});
  }
  if (e.empty()) e.push_back({0, 1.0});
  return Belief::from_entries(std::move(e));
}

}  // namespace

TEST_CASE("belief canonical form") {
  const auto b = Belief::from_entries({{3, 0.2}, {1, 0.6}, {3, 0.2}, {2, 0.0}});
  REQUIRE(b.size() == 2);
  CHECK(b.entries()[0].state == 1);
  CHECK(b.entries()[1].state == 3);
  CHECK(b[1] == doctest::Approx(0.6));
  CHECK(b[3] == doctest::Approx(0.4));
  CHECK(b[2] == 0.0);

  SUBCASE("dust is dropped and the rest renormalized") {
    const auto d = Belief::from_entries({{0, 1.0}, {1, 1e-14}});
    CHECK(d.size() == 1);
    CHECK(d[0] == 1.0);
  }
  SUBCASE("no positive mass") {
    CHECK_THROWS_AS(Belief::from_entries({{0, 0.0}}), ValidationError);
  }
  SUBCASE("from_normalized rejects unnormalized input") {
    CHECK_THROWS_AS(Belief::from_normalized({{0, 0.5}, {1, 0.4}}), ValidationError);
  }
}

TEST_CASE("observation_prob") {
  SUBCASE("deterministic point belief") {
    const auto p = augment(generate_chain(2));
    const auto b = Belief::point(0);
    CHECK(p.observation_prob(b, 0, 0) == 1.0);
  }
  SUBCASE("two-state noisy sensor") {
    const auto p = augment(testmodels::two_state_noisy());
    const auto b = p.initial_belief();
    CHECK(p.observation_prob(b, 0, 0) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(p.observation_prob(b, 0, 1) == doctest::Approx(0.6).epsilon(1e-15));

    // Brute force over (s, s') pairs.
    const auto d = oracle::densify(p);
    double sum = 0.0;
    for (int s = 0; s < d.S; ++s) {
      for (int n = 0; n < d.S; ++n) sum += b[s] * d.t(0, s, n) * d.z(0, n, 0);
    }
    CHECK(sum == doctest::Approx(0.4).epsilon(1e-15));
  }
  SUBCASE("sums to one over observations") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      const auto p = augment(random_pomdp(rng, 5, 3, 4));
      const auto b = random_belief(rng, p.num_states());
      for (int a = 0; a < p.num_actions(); ++a) {
        double total = 0.0;
        for (double x : p.observation_probs(b, a)) total += x;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("belief_update") {
  SUBCASE("deterministic chain step") {
    const auto p = augment(generate_chain(2));
    CHECK(p.belief_update(Belief::point(0), 0, 0) == Belief::point(1));
  }
  SUBCASE("Bayes rule on the noisy sensor") {
    const auto p = augment(testmodels::two_state_noisy());
    const auto post = p.belief_update(p.initial_belief(), 0, 0);
    CHECK(post[0] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(post[1] == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("impossible observation") {
    const auto p = augment(generate_chain(2));
    CHECK_THROWS_AS(p.belief_update(Belief::point(0), 0, 1), ZeroProbabilityObservation);
  }
  SUBCASE("matches the dense update on random models") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const auto p = augment(random_pomdp(rng, 6, 2, 3));
      const auto d = oracle::densify(p);
      const auto b = random_belief(rng, p.num_states());
      const auto bd = oracle::to_dense(b, d.S);
      for (int a = 0; a < p.num_actions(); ++a) {
        for (const auto& br : p.successors(b, a)) {
          CHECK(br.prob == doctest::Approx(oracle::obs_prob(d, bd, a, br.observation)));
          const auto ref = oracle::update(d, bd, a, br.observation);
          CHECK(oracle::linf(oracle::to_dense(br.belief, d.S), ref) < 1e-12);
        }
      }
    }
  }
  SUBCASE("successor weights form a distribution") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const auto p = augment(random_pomdp(rng, 4, 2, 3));
      const auto b = random_belief(rng, p.num_states());
      for (int a = 0; a < p.num_actions(); ++a) {
        double total = 0.0;
        for (const auto& br : p.successors(b, a)) total += br.prob;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }
  SUBCASE("text round trip is exact") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const auto p = augment(random_pomdp(rng, 5, 2, 3));
      const auto b = random_belief(rng, p.num_states());
      for (const auto& br : p.successors(b, 0)) {
        CHECK(Belief::parse(br.belief.to_string()) == br.belief);
      }
    }
  }
}

TEST_CASE("augment") {
  SUBCASE("empty target set") {
    CHECK_THROWS_AS(augment(generate_chain(2), {}), EmptyTargetSet);
  }
  SUBCASE("sink and collect action") {
    const auto base = fixture_fig1();
    const auto p = augment(base);
    CHECK(p.num_states() == base.num_states() + 1);
    CHECK(p.num_actions() == base.num_actions() + 1);
    const int aT = p.sink_action();
    const int sT = p.sink_state();
    for (int s = 0; s < p.num_states(); ++s) {
      for (int a = 0; a < p.num_actions(); ++a) {
        CHECK(p.reward(s, a) == ((a == aT && s != sT && base.is_target(s)) ? 1.0 : 0.0));
      }
      const auto& row = p.transition(s, aT);
      REQUIRE(row.size() == 1);
      if (s == sT || base.is_target(s)) {
        CHECK(row[0].index == sT);
      } else {
        CHECK(row[0].index == s);  // reward-0 self-loop off target
      }
    }
    for (int a = 0; a < p.num_actions(); ++a) {
      REQUIRE(p.transition(sT, a).size() == 1);
      CHECK(p.transition(sT, a)[0].index == sT);
    }
  }
  SUBCASE("single target state is worth one") {
    Pomdp one(1, 1, 1);
    one.add_transition(0, 0, 0, 1.0);
    one.add_observation(0, 0, 0, 1.0);
    one.set_initial_belief(Belief::point(0));
    one.set_targets({0});
    const auto p = augment(one);
    const auto d = oracle::densify(p);
    CHECK(oracle::finite_horizon_value(d, oracle::to_dense(p.initial_belief(), d.S), 1) == 1.0);
  }
  SUBCASE("two-state chain needs two steps") {
    const auto p = augment(generate_chain(1));
    const auto d = oracle::densify(p);
    const auto b0 = oracle::to_dense(p.initial_belief(), d.S);
    CHECK(oracle::finite_horizon_value(d, b0, 1) == 0.0);
    CHECK(oracle::finite_horizon_value(d, b0, 2) == 1.0);
  }
  SUBCASE("fixture rewards only collect at the goal") {
    const auto p = augment(fixture_fig1());
    for (int s = 0; s < p.num_states(); ++s) {
      for (int a = 0; a < p.num_actions(); ++a) {
        if (p.reward(s, a) > 0.0) {
          CHECK(s == Fig1States::goal);
          CHECK(a == p.sink_action());
        }
      }
    }
  }
}

TEST_CASE("expected_reward") {
  const auto p = augment(generate_chain(2));
  const int aT = p.sink_action();
  CHECK(p.expected_reward(Belief::point(2), aT) == 1.0);
  const auto b = Belief::from_entries({{2, 0.3}, {0, 0.7}});
  CHECK(p.expected_reward(b, aT) == doctest::Approx(0.3));
  for (int a = 0; a < aT; ++a) CHECK(p.expected_reward(b, a) == 0.0);
}

TEST_CASE("total reward equals reachability probability") {
  // Open-loop action sequences on random models: the augmented model's
  // total reward (collecting after every move) equals the probability of
  // having entered the target in the base model, computed by first-passage
  // propagation on the base chain.
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const auto base = random_pomdp(rng, 5, 2, 2);
    const auto p = augment(base);
    const auto d = oracle::densify(p);
    const int aT = p.sink_action();
    std::uniform_int_distribution<int> pick(0, base.num_actions() - 1);
    std::vector<int> plan(60);
    for (auto& a : plan) a = pick(rng);

    // Augmented: state distribution, reward from a_T after each move.
    std::vector<double> x = oracle::to_dense(p.initial_belief(), d.S);
    double total = 0.0;
    auto step = [&](int a) {
      std::vector<double> y(d.S, 0.0);
      for (int s = 0; s < d.S; ++s) {
        total += x[s] * d.r(s, a);
        for (int n = 0; n < d.S; ++n) y[n] += x[s] * d.t(a, s, n);
      }
      x = std::move(y);
    };
    step(aT);
    for (int a : plan) {
      step(a);
      step(aT);
    }

    // Base model: mass that has not yet hit the target, first passage.
    std::vector<double> alive(base.num_states(), 0.0);
    for (const auto& e : base.initial_belief().entries()) alive[e.state] = e.prob;
    double hit = 0.0;
    auto absorb = [&] {
      for (int t : base.targets()) {
        hit += alive[t];
        alive[t] = 0.0;
      }
    };
    absorb();
    for (int a : plan) {
      std::vector<double> y(base.num_states(), 0.0);
      for (int s = 0; s < base.num_states(); ++s) {
        for (const auto& e : base.transition(s, a)) y[e.index] += alive[s] * e.prob;
      }
      alive = std::move(y);
      absorb();
    }
    CHECK(total == doctest::Approx(hit).epsilon(1e-12));
  }
}
