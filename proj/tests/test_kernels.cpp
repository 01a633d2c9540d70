#include <doctest.h>

#include <random>

#include "reach/kernels.hpp"

using namespace reach;
using namespace reach::kernels;

namespace {

SweepGraph random_graph(std::mt19937_64& rng, int nodes, int choices, int edges) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, nodes - 1);
  SweepGraph g;
  for (int n = 0; n < nodes; ++n) {
    g.add_node(u(rng) < 0.05);
    for (int c = 0; c < choices; ++c) {
      g.add_choice(0.1 * u(rng));
      double left = 0.9;
      for (int e = 0; e < edges; ++e) {
        const double p = left * u(rng);
        left -= p;
        g.add_edge(pick(rng), p);
      }
    }
  }
  return g;
}

Belief random_belief(std::mt19937_64& rng, int S, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Belief::Entry> e;
  for (int s = 0; s < S; ++s) {
    if (u(rng) < density) e.push_back({s, u(rng) + 1e-3});
  }
  if (e.empty()) e.push_back({0, 1.0});
  return Belief::from_entries(std::move(e));
}

std::vector<AlphaVector> random_alphas(std::mt19937_64& rng, int count, int S) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<AlphaVector> out(count);
  for (int i = 0; i < count; ++i) {
    out[i].values.resize(S);
    for (auto& v : out[i].values) v = u(rng);
    out[i].action = i % 3;
  }
  return out;
}

}  // namespace

TEST_CASE("bellman_apply: serial and parallel agree bit for bit") {
  std::mt19937_64 rng(1);
  const auto g = random_graph(rng, 20000, 3, 4);
  std::vector<double> in(g.num_nodes());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& x : in) x = u(rng);
  std::vector<double> a(in.size()), b(in.size()), c(in.size());
  const auto sa = serial::bellman_apply(g, in, a);
  const auto sb = parallel::bellman_apply(g, in, b);
  bellman_apply(g, in, c);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(sa.max_change == sb.max_change);
  CHECK(sa.max_decrease == sb.max_decrease);
}

TEST_CASE("bellman_apply on a tiny graph") {
  SweepGraph g;
  g.add_node(false);
  g.add_choice(0.5);
  g.add_edge(1, 0.5);
  g.add_choice(0.0);
  g.add_edge(0, 1.0);
  g.add_node(true);
  std::vector<double> in{0.2, 0.8}, out(2);
  const auto stats = serial::bellman_apply(g, in, out);
  CHECK(out[0] == doctest::Approx(0.9));
  CHECK(out[1] == 0.8);  // fixed node keeps its value
  CHECK(stats.max_change == doctest::Approx(0.7));
  CHECK(stats.max_decrease == 0.0);
}

TEST_CASE("best_alpha: serial and parallel agree, ties go to the lowest index") {
  std::mt19937_64 rng(2);
  auto alphas = random_alphas(rng, 3000, 40);
  alphas.push_back(alphas[17]);
  for (int k = 0; k < 20; ++k) {
    const auto b = random_belief(rng, 40, 0.8);
    const auto s = serial::best_alpha(alphas, b);
    const auto p = parallel::best_alpha(alphas, b);
    CHECK(s.index == p.index);
    CHECK(s.value == p.value);
    double best = -1.0;
    for (const auto& a : alphas) best = std::max(best, a.dot(b));
    CHECK(s.value == best);
  }
  std::vector<AlphaVector> twins{{{0.5, 0.5}, 1}, {{0.5, 0.5}, 2}};
  CHECK(serial::best_alpha(twins, Belief::point(0)).index == 0);
  CHECK(parallel::best_alpha(twins, Belief::point(0)).index == 0);
  CHECK(serial::best_alpha({}, Belief::point(0)).index == -1);
}

TEST_CASE("sawtooth: serial and parallel agree") {
  std::mt19937_64 rng(3);
  const int S = 30;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> corners(S);
  for (auto& c : corners) c = 0.5 + 0.5 * u(rng);
  std::vector<UpperPoint> points;
  for (int i = 0; i < 20000; ++i) {
    const auto b = random_belief(rng, S, 0.2);
    double interp = 0.0;
    for (const auto& e : b.entries()) interp += e.prob * corners[e.state];
    points.push_back({b, interp * u(rng)});
  }
  for (int k = 0; k < 20; ++k) {
    const auto b = random_belief(rng, S, 0.3);
    CHECK(serial::sawtooth(corners, points, b) == parallel::sawtooth(corners, points, b));
  }
}

TEST_CASE("sawtooth basics") {
  const std::vector<double> corners{1.0, 0.5};
  const auto mid = Belief::from_entries({{0, 0.5}, {1, 0.5}});
  CHECK(serial::sawtooth(corners, {}, mid) == doctest::Approx(0.75));
  const std::vector<UpperPoint> pts{{mid, 0.6}};
  CHECK(serial::sawtooth(corners, pts, mid) == doctest::Approx(0.6));
  // Halfway between the stored point and corner 0.
  const auto q = Belief::from_entries({{0, 0.75}, {1, 0.25}});
  CHECK(serial::sawtooth(corners, pts, q) == doctest::Approx(0.8));
  CHECK(serial::sawtooth(corners, pts, Belief::point(1)) == doctest::Approx(0.5));
}

TEST_CASE("dominated: serial and parallel agree") {
  std::mt19937_64 rng(4);
  auto alphas = random_alphas(rng, 600, 6);
  alphas.push_back(alphas[3]);
  const auto s = serial::dominated(alphas);
  const auto p = parallel::dominated(alphas);
  CHECK(s == p);
  CHECK(s.back() == 1);  // duplicate of an earlier vector
  CHECK(s[3] == 0);

  std::vector<AlphaVector> pair{{{0.5, 0.5}, 0}, {{0.6, 0.6}, 1}};
  CHECK(serial::dominated(pair) == std::vector<char>{1, 0});
  // A later vector that only ties on the earlier one's support leaves it.
  std::vector<AlphaVector> tied{{{0.0, 0.0, 0.3}, 1}, {{0.0, 0.3, 0.3}, 0}};
  CHECK(serial::dominated(tied) == std::vector<char>{0, 0});
  std::vector<AlphaVector> tied_rev{{{0.0, 0.3, 0.3}, 0}, {{0.0, 0.0, 0.3}, 1}};
  CHECK(serial::dominated(tied_rev) == std::vector<char>{0, 1});
  std::vector<AlphaVector> incomparable{{{1.0, 0.0}, 0}, {{0.0, 1.0}, 1}};
  CHECK(serial::dominated(incomparable) == std::vector<char>{0, 0});
}
