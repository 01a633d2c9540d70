#pragma once

// Data-parallel inner loops of the solver. Every kernel has a serial
// reference in `serial::` and an OpenMP version in `parallel::`; both return
// bit-identical results (reductions break ties by lowest index). The
// unqualified entry points pick the parallel path above a work threshold.

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "reach/pomdp.hpp"

namespace reach {

struct AlphaVector {
  std::vector<double> values;
  ActionId action = 0;

  double dot(const Belief& b) const {
    double v = 0.0;
    for (const auto& e : b.entries()) v += values[e.state] * e.prob;
    return v;
  }

  bool operator==(const AlphaVector&) const = default;
};

struct UpperPoint {
  Belief belief;
  double value;
};

namespace kernels {

struct ArgMax {
  int index = -1;
  double value = -std::numeric_limits<double>::infinity();
};

/// Node-action-edge structure swept by Jacobi value iteration. Each node
/// maximizes over its choices; a choice is `constant + sum prob * value`.
struct SweepGraph {
  std::vector<int> choice_begin{0};   // size nodes + 1
  std::vector<double> choice_constant;
  std::vector<int> edge_begin{0};     // size choices + 1
  std::vector<int> edge_target;
  std::vector<double> edge_prob;
  std::vector<char> fixed;            // node value held constant

  int num_nodes() const { return static_cast<int>(choice_begin.size()) - 1; }

  void add_node(bool is_fixed) {
    fixed.push_back(is_fixed ? 1 : 0);
    choice_begin.push_back(choice_begin.back());
  }
  // Appends a choice to the most recently added node.
  void add_choice(double constant) {
    choice_constant.push_back(constant);
    edge_begin.push_back(edge_begin.back());
    ++choice_begin.back();
  }
  // Appends an edge to the most recently added choice.
  void add_edge(int target, double prob) {
    edge_target.push_back(target);
    edge_prob.push_back(prob);
    ++edge_begin.back();
  }
};

struct SweepStats {
  double max_change = 0.0;    // max |out - in|
  double max_decrease = 0.0;  // max (in - out), 0 if nothing decreased
};

/// Apply the Bellman operator once at every node: out = B(in).
SweepStats bellman_apply(const SweepGraph& g, std::span<const double> in, std::span<double> out);

/// Max over alpha-vectors of alpha . b; ties go to the lowest index.
ArgMax best_alpha(std::span<const AlphaVector> alphas, const Belief& b);

/// Sawtooth upper bound at b from corner values and interior points.
double sawtooth(std::span<const double> corners, std::span<const UpperPoint> points,
                const Belief& b);

/// flags[i] = 1 when alphas[i] is pointwise dominated by an earlier vector,
/// or by a later one that is strictly greater wherever alphas[i] is positive.
/// Removing flagged vectors changes neither max α·b nor the insertion-order
/// argmax action.
std::vector<char> dominated(std::span<const AlphaVector> alphas);

namespace serial {
SweepStats bellman_apply(const SweepGraph& g, std::span<const double> in, std::span<double> out);
ArgMax best_alpha(std::span<const AlphaVector> alphas, const Belief& b);
double sawtooth(std::span<const double> corners, std::span<const UpperPoint> points,
                const Belief& b);
std::vector<char> dominated(std::span<const AlphaVector> alphas);
}  // namespace serial

namespace parallel {
SweepStats bellman_apply(const SweepGraph& g, std::span<const double> in, std::span<double> out);
ArgMax best_alpha(std::span<const AlphaVector> alphas, const Belief& b);
double sawtooth(std::span<const double> corners, std::span<const UpperPoint> points,
                const Belief& b);
std::vector<char> dominated(std::span<const AlphaVector> alphas);
}  // namespace parallel

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();

}  // namespace kernels
}  // namespace reach
