// Serial vs OpenMP kernels. Run with --benchmark_filter=<kernel> to compare
// one pair.

#include <benchmark/benchmark.h>

#include <random>

#include "reach/kernels.hpp"

using namespace reach;
using namespace reach::kernels;

namespace {

SweepGraph make_graph(int nodes) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, nodes - 1);
  SweepGraph g;
  for (int n = 0; n < nodes; ++n) {
    g.add_node(false);
    for (int c = 0; c < 4; ++c) {
      g.add_choice(0.05 * u(rng));
      double left = 0.95;
      for (int e = 0; e < 6; ++e) {
        const double p = left * u(rng);
        left -= p;
        g.add_edge(pick(rng), p);
      }
    }
  }
  return g;
}

Belief make_belief(std::mt19937_64& rng, int S, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Belief::Entry> e;
  for (int s = 0; s < S; ++s) {
    if (u(rng) < density) e.push_back({s, u(rng) + 1e-3});
  }
  if (e.empty()) e.push_back({0, 1.0});
  return Belief::from_entries(std::move(e));
}

std::vector<AlphaVector> make_alphas(int count, int S) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<AlphaVector> out(count);
  for (auto& a : out) {
    a.values.resize(S);
    for (auto& v : a.values) v = u(rng);
  }
  return out;
}

template <bool Parallel>
void BM_BellmanApply(benchmark::State& state) {
  const auto g = make_graph(static_cast<int>(state.range(0)));
  std::vector<double> in(g.num_nodes(), 0.5), out(g.num_nodes());
  for (auto _ : state) {
    if constexpr (Parallel) {
      parallel::bellman_apply(g, in, out);
    } else {
      serial::bellman_apply(g, in, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * g.num_nodes());
}

template <bool Parallel>
void BM_BestAlpha(benchmark::State& state) {
  const int S = 200;
  const auto alphas = make_alphas(static_cast<int>(state.range(0)), S);
  std::mt19937_64 rng(3);
  const auto b = make_belief(rng, S, 0.3);
  for (auto _ : state) {
    const auto r = Parallel ? parallel::best_alpha(alphas, b) : serial::best_alpha(alphas, b);
    benchmark::DoNotOptimize(r);
  }
}

template <bool Parallel>
void BM_Sawtooth(benchmark::State& state) {
  const int S = 200;
  std::mt19937_64 rng(4);
  std::vector<double> corners(S, 1.0);
  std::vector<UpperPoint> points;
  for (int i = 0; i < state.range(0); ++i) points.push_back({make_belief(rng, S, 0.05), 0.5});
  const auto b = make_belief(rng, S, 0.3);
  for (auto _ : state) {
    const double v = Parallel ? parallel::sawtooth(corners, points, b)
                              : serial::sawtooth(corners, points, b);
    benchmark::DoNotOptimize(v);
  }
}

template <bool Parallel>
void BM_Dominated(benchmark::State& state) {
  const auto alphas = make_alphas(static_cast<int>(state.range(0)), 50);
  for (auto _ : state) {
    auto d = Parallel ? parallel::dominated(alphas) : serial::dominated(alphas);
    benchmark::DoNotOptimize(d.data());
  }
}

}  // namespace

BENCHMARK(BM_BellmanApply<false>)->Arg(10000)->Arg(100000)->UseRealTime();
BENCHMARK(BM_BellmanApply<true>)->Arg(10000)->Arg(100000)->UseRealTime();
BENCHMARK(BM_BestAlpha<false>)->Arg(1000)->Arg(20000)->UseRealTime();
BENCHMARK(BM_BestAlpha<true>)->Arg(1000)->Arg(20000)->UseRealTime();
BENCHMARK(BM_Sawtooth<false>)->Arg(1000)->Arg(20000)->UseRealTime();
BENCHMARK(BM_Sawtooth<true>)->Arg(1000)->Arg(20000)->UseRealTime();
BENCHMARK(BM_Dominated<false>)->Arg(500)->Arg(2000)->UseRealTime();
BENCHMARK(BM_Dominated<true>)->Arg(500)->Arg(2000)->UseRealTime();

BENCHMARK_MAIN();
