#include "reach/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef REACH_HAVE_OPENMP
#include <omp.h>
#endif

namespace reach::kernels {
namespace {

// Below this many multiply-adds the fork/join cost dominates.
constexpr std::size_t kParallelWork = 1u << 15;

bool better(const ArgMax& x, const ArgMax& y) {
  if (y.index < 0) return true;
  return x.value > y.value || (x.value == y.value && x.index < y.index);
}

double choice_value(const SweepGraph& g, int c, std::span<const double> in) {
  double v = g.choice_constant[c];
  for (int e = g.edge_begin[c]; e < g.edge_begin[c + 1]; ++e) {
    v += g.edge_prob[e] * in[g.edge_target[e]];
  }
  return v;
}

double node_value(const SweepGraph& g, int n, std::span<const double> in) {
  if (g.fixed[n] || g.choice_begin[n] == g.choice_begin[n + 1]) return in[n];
  double best = -std::numeric_limits<double>::infinity();
  for (int c = g.choice_begin[n]; c < g.choice_begin[n + 1]; ++c) {
    best = std::max(best, choice_value(g, c, in));
  }
  return best;
}

double point_value(std::span<const double> corners, const std::vector<double>& dense,
                   double corner_at_b, const UpperPoint& p) {
  double ratio = std::numeric_limits<double>::infinity();
  double corner_at_point = 0.0;
  for (const auto& e : p.belief.entries()) {
    const double mass = dense[e.state];
    if (mass <= 0.0) return std::numeric_limits<double>::infinity();
    ratio = std::min(ratio, mass / e.prob);
    corner_at_point += corners[e.state] * e.prob;
  }
  return corner_at_b + ratio * (p.value - corner_at_point);
}

std::vector<double>& dense_scratch(std::size_t n) {
  thread_local std::vector<double> dense;
  if (dense.size() < n) dense.assign(n, 0.0);
  return dense;
}

double corner_interpolation(std::span<const double> corners, const Belief& b) {
  double v = 0.0;
  for (const auto& e : b.entries()) v += corners[e.state] * e.prob;
  return v;
}

bool dominates(const AlphaVector& x, const AlphaVector& y) {
  for (std::size_t s = 0; s < x.values.size(); ++s) {
    if (x.values[s] < y.values[s]) return false;
  }
  return true;
}

bool above_on_support(const AlphaVector& x, const AlphaVector& y) {
  for (std::size_t s = 0; s < x.values.size(); ++s) {
    if (y.values[s] > 0.0 && !(x.values[s] > y.values[s])) return false;
  }
  return true;
}

// A newer dominator must beat an older vector strictly on its support; on a
// tie the older vector (and its action) stays.
bool is_dominated(std::span<const AlphaVector> alphas, std::size_t i) {
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    if (j == i || !dominates(alphas[j], alphas[i])) continue;
    if (j < i || above_on_support(alphas[j], alphas[i])) return true;
  }
  return false;
}

}  // namespace

int max_threads() {
#ifdef REACH_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// ---------------------------------------------------------------------------
// serial

namespace serial {

SweepStats bellman_apply(const SweepGraph& g, std::span<const double> in, std::span<double> out) {
  SweepStats stats;
  for (int n = 0; n < g.num_nodes(); ++n) {
    out[n] = node_value(g, n, in);
    stats.max_change = std::max(stats.max_change, std::abs(out[n] - in[n]));
    stats.max_decrease = std::max(stats.max_decrease, in[n] - out[n]);
  }
  return stats;
}

ArgMax best_alpha(std::span<const AlphaVector> alphas, const Belief& b) {
  ArgMax best;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double v = alphas[i].dot(b);
    if (best.index < 0 || v > best.value) best = {static_cast<int>(i), v};
  }
  return best;
}

double sawtooth(std::span<const double> corners, std::span<const UpperPoint> points,
                const Belief& b) {
  const double base = corner_interpolation(corners, b);
  if (points.empty()) return base;
  auto& dense = dense_scratch(corners.size());
  for (const auto& e : b.entries()) dense[e.state] = e.prob;
  double best = base;
  for (const auto& p : points) best = std::min(best, point_value(corners, dense, base, p));
  for (const auto& e : b.entries()) dense[e.state] = 0.0;
  return best;
}

std::vector<char> dominated(std::span<const AlphaVector> alphas) {
  std::vector<char> flags(alphas.size(), 0);
  for (std::size_t i = 0; i < alphas.size(); ++i) flags[i] = is_dominated(alphas, i) ? 1 : 0;
  return flags;
}

}  // namespace serial

// ---------------------------------------------------------------------------
// parallel

namespace parallel {

SweepStats bellman_apply(const SweepGraph& g, std::span<const double> in, std::span<double> out) {
  const int n_nodes = g.num_nodes();
  double max_change = 0.0;
  double max_decrease = 0.0;
#ifdef REACH_HAVE_OPENMP
#pragma omp parallel for schedule(static) reduction(max : max_change, max_decrease)
#endif
  for (int n = 0; n < n_nodes; ++n) {
    out[n] = node_value(g, n, in);
    max_change = std::max(max_change, std::abs(out[n] - in[n]));
    max_decrease = std::max(max_decrease, in[n] - out[n]);
  }
  return {max_change, max_decrease};
}

ArgMax best_alpha(std::span<const AlphaVector> alphas, const Belief& b) {
  const int n = static_cast<int>(alphas.size());
  std::vector<ArgMax> partial(max_threads());
#ifdef REACH_HAVE_OPENMP
#pragma omp parallel
#endif
  {
#ifdef REACH_HAVE_OPENMP
    const int tid = omp_get_thread_num();
#else
    const int tid = 0;
#endif
    ArgMax local;
#ifdef REACH_HAVE_OPENMP
#pragma omp for schedule(static)
#endif
    for (int i = 0; i < n; ++i) {
      const double v = alphas[i].dot(b);
      if (local.index < 0 || v > local.value) local = {i, v};
    }
    partial[tid] = local;
  }
  ArgMax best;
  for (const auto& p : partial) {
    if (p.index >= 0 && better(p, best)) best = p;
  }
  return best;
}

double sawtooth(std::span<const double> corners, std::span<const UpperPoint> points,
                const Belief& b) {
  const double base = corner_interpolation(corners, b);
  if (points.empty()) return base;
  std::vector<double> dense(corners.size(), 0.0);
  for (const auto& e : b.entries()) dense[e.state] = e.prob;
  double best = base;
  const int n = static_cast<int>(points.size());
#ifdef REACH_HAVE_OPENMP
#pragma omp parallel for schedule(static) reduction(min : best)
#endif
  for (int i = 0; i < n; ++i) best = std::min(best, point_value(corners, dense, base, points[i]));
  return best;
}

std::vector<char> dominated(std::span<const AlphaVector> alphas) {
  const int n = static_cast<int>(alphas.size());
  std::vector<char> flags(alphas.size(), 0);
#ifdef REACH_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
  for (int i = 0; i < n; ++i) flags[i] = is_dominated(alphas, i) ? 1 : 0;
  return flags;
}

}  // namespace parallel

// ---------------------------------------------------------------------------
// dispatch

SweepStats bellman_apply(const SweepGraph& g, std::span<const double> in, std::span<double> out) {
  if (max_threads() > 1 && g.edge_target.size() > kParallelWork) {
    return parallel::bellman_apply(g, in, out);
  }
  return serial::bellman_apply(g, in, out);
}

ArgMax best_alpha(std::span<const AlphaVector> alphas, const Belief& b) {
  if (max_threads() > 1 && alphas.size() * b.size() > kParallelWork) {
    return parallel::best_alpha(alphas, b);
  }
  return serial::best_alpha(alphas, b);
}

double sawtooth(std::span<const double> corners, std::span<const UpperPoint> points,
                const Belief& b) {
  if (max_threads() > 1 && points.size() * 4 > kParallelWork) {
    return parallel::sawtooth(corners, points, b);
  }
  return serial::sawtooth(corners, points, b);
}

std::vector<char> dominated(std::span<const AlphaVector> alphas) {
  const std::size_t width = alphas.empty() ? 0 : alphas.front().values.size();
  if (max_threads() > 1 && alphas.size() * alphas.size() * width > kParallelWork) {
    return parallel::dominated(alphas);
  }
  return serial::dominated(alphas);
}

}  // namespace reach::kernels
