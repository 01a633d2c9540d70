#include "reach/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "reach/value_iteration.hpp"

namespace reach {
namespace {

constexpr double kPointMatchTolerance = 1e-9;
constexpr double kImprovement = 1e-12;

}  // namespace

// ---------------------------------------------------------------------------
// LowerBoundSet

LowerBoundSet::LowerBoundSet(std::vector<AlphaVector> vectors)
    : vectors_(std::move(vectors)), size_at_last_prune_(vectors_.size()) {}

double LowerBoundSet::value(const Belief& b) const {
  if (vectors_.empty()) return 0.0;
  return kernels::best_alpha(vectors_, b).value;
}

kernels::ArgMax LowerBoundSet::best(const Belief& b) const {
  return kernels::best_alpha(vectors_, b);
}

void LowerBoundSet::add(AlphaVector alpha) { vectors_.push_back(std::move(alpha)); }

std::size_t LowerBoundSet::prune() {
  const auto flags = kernels::dominated(vectors_);
  std::size_t removed = 0;
  std::vector<AlphaVector> kept;
  kept.reserve(vectors_.size());
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    if (flags[i]) {
      ++removed;
    } else {
      kept.push_back(std::move(vectors_[i]));
    }
  }
  vectors_ = std::move(kept);
  size_at_last_prune_ = vectors_.size();
  return removed;
}

bool LowerBoundSet::should_prune(double growth) const {
  return static_cast<double>(vectors_.size()) >=
         (1.0 + growth) * static_cast<double>(std::max<std::size_t>(size_at_last_prune_, 1));
}

// ---------------------------------------------------------------------------
// UpperBoundSet

UpperBoundSet::UpperBoundSet(std::vector<double> corner_values)
    : corners_(std::move(corner_values)) {}

double UpperBoundSet::corner_interpolation(const Belief& b) const {
  double v = 0.0;
  for (const auto& e : b.entries()) v += corners_[e.state] * e.prob;
  return v;
}

double UpperBoundSet::value(const Belief& b) const {
  return kernels::sawtooth(corners_, points_, b);
}

bool UpperBoundSet::insert(const Belief& b, double v) {
  v = std::max(v, 0.0);
  if (b.size() == 1) {
    double& corner = corners_[b.entries().front().state];
    if (v < corner - kImprovement) {
      corner = v;
      return true;
    }
    return false;
  }
  if (v >= value(b) - kImprovement) return false;
  const auto key = b.rounded_hash();
  auto [first, last] = index_.equal_range(key);
  for (auto it = first; it != last; ++it) {
    UpperPoint& p = points_[it->second];
    if (p.belief.linf_distance(b) <= kPointMatchTolerance) {
      p.value = std::min(p.value, v);
      return true;
    }
  }
  index_.emplace(key, points_.size());
  points_.push_back({b, v});
  return true;
}

void UpperBoundSet::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    index_.emplace(points_[i].belief.rounded_hash(), i);
  }
}

std::size_t UpperBoundSet::collect_garbage(double tol) {
  std::vector<UpperPoint> kept;
  kept.reserve(points_.size());
  std::size_t removed = 0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const std::span<const UpperPoint> rest(points_.data() + i + 1, points_.size() - i - 1);
    const double without = std::min(kernels::sawtooth(corners_, kept, points_[i].belief),
                                    kernels::sawtooth(corners_, rest, points_[i].belief));
    if (without <= points_[i].value + tol) {
      ++removed;
    } else {
      kept.push_back(std::move(points_[i]));
    }
  }
  points_ = std::move(kept);
  reindex();
  size_at_last_collect_ = points_.size();
  return removed;
}

bool UpperBoundSet::should_collect(double growth) const {
  return static_cast<double>(points_.size()) >=
         (1.0 + growth) * static_cast<double>(std::max<std::size_t>(size_at_last_collect_, 1));
}

// ---------------------------------------------------------------------------
// Initialization

std::vector<ActionSuccessors> compute_successors(const AugmentedPomdp& p, const Belief& b) {
  std::vector<ActionSuccessors> out(p.num_actions());
  for (ActionId a = 0; a < p.num_actions(); ++a) {
    out[a].reward = p.expected_reward(b, a);
    out[a].successors = p.successors(b, a);
  }
  return out;
}

LowerBoundSet init_lower_blind(const AugmentedPomdp& p, int steps, double gamma,
                               double residual) {
  const int n = p.num_states();
  std::vector<AlphaVector> vectors;
  for (ActionId a = 0; a < p.num_actions(); ++a) {
    std::vector<double> alpha(n, 0.0), next(n, 0.0);
    for (int k = 0; k < steps; ++k) {
      double change = 0.0;
      for (StateId s = 0; s < n; ++s) {
        double v = p.reward(s, a);
        for (const auto& t : p.transition(s, a)) v += gamma * t.prob * alpha[t.index];
        next[s] = std::clamp(v, 0.0, 1.0);
        change = std::max(change, std::abs(next[s] - alpha[s]));
      }
      alpha.swap(next);
      if (change < residual) break;
    }
    vectors.push_back({std::move(alpha), a});
  }
  return LowerBoundSet(std::move(vectors));
}

std::vector<double> mdp_values(const AugmentedPomdp& p, double tol, double gamma) {
  const int n = p.num_states();
  // States that can reach a target under some action sequence.
  std::vector<std::vector<StateId>> predecessors(n);
  for (ActionId a = 0; a < p.num_actions(); ++a) {
    for (StateId s = 0; s < n; ++s) {
      for (const auto& t : p.transition(s, a)) {
        if (t.prob > 0.0) predecessors[t.index].push_back(s);
      }
    }
  }
  std::vector<char> can_reach(n, 0);
  std::deque<StateId> queue;
  for (StateId s = 0; s < n; ++s) {
    if (p.is_target(s)) {
      can_reach[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    for (StateId pred : predecessors[s]) {
      if (!can_reach[pred]) {
        can_reach[pred] = 1;
        queue.push_back(pred);
      }
    }
  }

  kernels::SweepGraph g;
  for (StateId s = 0; s < n; ++s) {
    const bool fixed = !can_reach[s];
    g.add_node(fixed);
    if (fixed) continue;
    for (ActionId a = 0; a < p.num_actions(); ++a) {
      g.add_choice(p.reward(s, a));
      for (const auto& t : p.transition(s, a)) {
        if (can_reach[t.index]) g.add_edge(t.index, gamma * t.prob);
      }
    }
  }
  auto fp = certified_least_fixed_point(g, std::vector<double>(n, 0.0), tol);
  if (fp.certified) return fp.upper;
  std::vector<double> ones(n, 0.0);
  for (StateId s = 0; s < n; ++s) ones[s] = can_reach[s] ? 1.0 : 0.0;
  return ones;
}

UpperBoundSet init_upper_vmdp(const AugmentedPomdp& p, double tol, double gamma) {
  return UpperBoundSet(mdp_values(p, tol, gamma));
}

// ---------------------------------------------------------------------------
// Backups

AlphaVector backup_lower(const AugmentedPomdp& p, LowerBoundSet& lower, const Belief& b,
                         std::span<const ActionSuccessors> branches, double gamma) {
  const int n = p.num_states();
  const AlphaVector zero{std::vector<double>(n, 0.0), 0};
  auto pick = [&](const Belief& belief) -> const AlphaVector& {
    if (lower.empty()) return zero;
    return lower.vectors()[lower.best(belief).index];
  };
  const AlphaVector& fallback = pick(b);

  AlphaVector best{{}, -1};
  double best_value = -1.0;
  std::vector<const AlphaVector*> chosen(p.num_observations());
  std::vector<double> projected(n);
  for (ActionId a = 0; a < p.num_actions(); ++a) {
    std::fill(chosen.begin(), chosen.end(), &fallback);
    for (const auto& succ : branches[a].successors) chosen[succ.observation] = &pick(succ.belief);
    for (StateId next = 0; next < n; ++next) {
      double v = 0.0;
      for (const auto& z : p.observation(next, a)) v += z.prob * chosen[z.index]->values[next];
      projected[next] = v;
    }
    AlphaVector alpha{std::vector<double>(n), a};
    for (StateId s = 0; s < n; ++s) {
      double v = p.reward(s, a);
      for (const auto& t : p.transition(s, a)) v += gamma * t.prob * projected[t.index];
      alpha.values[s] = std::clamp(v, 0.0, 1.0);
    }
    const double value = alpha.dot(b);
    if (value > best_value) {
      best_value = value;
      best = std::move(alpha);
    }
  }
  if (best_value > lower.value(b) + kImprovement || lower.empty()) lower.add(best);
  return best;
}

AlphaVector backup_lower(const AugmentedPomdp& p, LowerBoundSet& lower, const Belief& b,
                         double gamma) {
  const auto branches = compute_successors(p, b);
  return backup_lower(p, lower, b, branches, gamma);
}

std::vector<double> upper_q_values(const UpperBoundSet& upper,
                                   std::span<const ActionSuccessors> branches, double gamma) {
  std::vector<double> q(branches.size());
  for (std::size_t a = 0; a < branches.size(); ++a) {
    double v = branches[a].reward;
    for (const auto& succ : branches[a].successors) v += gamma * succ.prob * upper.value(succ.belief);
    q[a] = v;
  }
  return q;
}

UpperBackup backup_upper(const AugmentedPomdp& p, UpperBoundSet& upper, const Belief& b,
                         std::span<const ActionSuccessors> branches, double gamma) {
  (void)p;
  const auto q = upper_q_values(upper, branches, gamma);
  const auto it = std::max_element(q.begin(), q.end());
  UpperBackup result{std::clamp(*it, 0.0, 1.0), static_cast<ActionId>(it - q.begin())};
  upper.insert(b, result.value);
  return result;
}

UpperBackup backup_upper(const AugmentedPomdp& p, UpperBoundSet& upper, const Belief& b,
                         double gamma) {
  const auto branches = compute_successors(p, b);
  return backup_upper(p, upper, b, branches, gamma);
}

}  // namespace reach
