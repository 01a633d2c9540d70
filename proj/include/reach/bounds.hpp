#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include "reach/kernels.hpp"
#include "reach/pomdp.hpp"

namespace reach {

/// The set Γ of α-vectors. V^L(b) = max α·b, and the argmax vector's action
/// is the executable policy.
class LowerBoundSet {
 public:
  LowerBoundSet() = default;
  explicit LowerBoundSet(std::vector<AlphaVector> vectors);

  std::span<const AlphaVector> vectors() const { return vectors_; }
  std::size_t size() const { return vectors_.size(); }
  bool empty() const { return vectors_.empty(); }

  /// 0 for an empty set.
  double value(const Belief& b) const;
  kernels::ArgMax best(const Belief& b) const;

  void add(AlphaVector alpha);

  /// Removes pointwise-dominated vectors; returns how many were removed.
  std::size_t prune();
  std::size_t size_at_last_prune() const { return size_at_last_prune_; }
  /// True once the set grew by `growth` (fraction) since the last prune.
  bool should_prune(double growth) const;

 private:
  std::vector<AlphaVector> vectors_;
  std::size_t size_at_last_prune_ = 0;
};

/// Upper bound from corner values plus (belief, value) points, evaluated by
/// sawtooth interpolation.
class UpperBoundSet {
 public:
  UpperBoundSet() = default;
  explicit UpperBoundSet(std::vector<double> corner_values);

  std::span<const double> corner_values() const { return corners_; }
  std::span<const UpperPoint> points() const { return points_; }

  double value(const Belief& b) const;
  double corner_interpolation(const Belief& b) const;

  /// Stores (b, v) when it lowers the bound at b. Point beliefs update the
  /// corner value; a stored point at the same belief is replaced. Returns
  /// whether anything changed.
  bool insert(const Belief& b, double v);

  /// Drops points whose value is implied (within `tol`) by the rest of the
  /// set; returns how many were removed.
  std::size_t collect_garbage(double tol = 1e-12);
  std::size_t size_at_last_collect() const { return size_at_last_collect_; }
  bool should_collect(double growth) const;

 private:
  void reindex();

  std::vector<double> corners_;
  std::vector<UpperPoint> points_;
  std::unordered_multimap<std::uint64_t, std::size_t> index_;
  std::size_t size_at_last_collect_ = 0;
};

/// Reward and observation branches of one action at one belief.
struct ActionSuccessors {
  double reward = 0.0;
  std::vector<BeliefSuccessor> successors;
};

std::vector<ActionSuccessors> compute_successors(const AugmentedPomdp& p, const Belief& b);

/// One α-vector per action: the fixed-action policy evaluated for `steps`
/// sweeps from zero (stopping early once the residual is below `residual`).
LowerBoundSet init_lower_blind(const AugmentedPomdp& p, int steps, double gamma = 1.0,
                               double residual = 1e-6);

/// Corner values from the fully observable MDP (value iteration from zero to
/// residual `tol`, then certified as an over-approximation).
UpperBoundSet init_upper_vmdp(const AugmentedPomdp& p, double tol, double gamma = 1.0);

/// Optimal fully observable values (the certified corner values).
std::vector<double> mdp_values(const AugmentedPomdp& p, double tol, double gamma = 1.0);

/// Point-based backup at b. Returns the maximizing α-vector and adds it to Γ
/// when it raises V^L(b).
AlphaVector backup_lower(const AugmentedPomdp& p, LowerBoundSet& lower, const Belief& b,
                         std::span<const ActionSuccessors> branches, double gamma = 1.0);
AlphaVector backup_lower(const AugmentedPomdp& p, LowerBoundSet& lower, const Belief& b,
                         double gamma = 1.0);

/// Upper Q-values: R(b,a) + γ Σ_o P(o|b,a) Υ(b').
std::vector<double> upper_q_values(const UpperBoundSet& upper,
                                   std::span<const ActionSuccessors> branches,
                                   double gamma = 1.0);

struct UpperBackup {
  double value;
  ActionId action;
};

/// Bellman backup of the point set at b; inserts (b, value) if it improves.
UpperBackup backup_upper(const AugmentedPomdp& p, UpperBoundSet& upper, const Belief& b,
                         std::span<const ActionSuccessors> branches, double gamma = 1.0);
UpperBackup backup_upper(const AugmentedPomdp& p, UpperBoundSet& upper, const Belief& b,
                         double gamma = 1.0);

}  // namespace reach
