#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reach {

using StateId = int;
using ActionId = int;
using ObservationId = int;

// Tolerance used to validate stochastic rows and belief normalization.
inline constexpr double kStochasticTolerance = 1e-9;
// Belief entries below this mass are dropped (then the belief is renormalized).
inline constexpr double kSupportDropThreshold = 1e-12;

struct SparseEntry {
  int index;
  double prob;

  bool operator==(const SparseEntry&) const = default;
};

using SparseDistribution = std::vector<SparseEntry>;

/// Sparse probability distribution over states, kept in canonical form:
/// ascending state index, strictly positive entries, unit mass.
class Belief {
 public:
  struct Entry {
    StateId state;
    double prob;

    bool operator==(const Entry&) const = default;
  };

  Belief() = default;

  static Belief point(StateId s);

  /// Sorts, merges duplicate states, drops entries below `drop_below`, and
  /// renormalizes. Throws ValidationError when no positive mass remains.
  static Belief from_entries(std::vector<Entry> entries,
                             double drop_below = kSupportDropThreshold);

  /// Like from_entries but requires the input to already sum to one.
  static Belief from_normalized(std::vector<Entry> entries);

  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  double operator[](StateId s) const;
  double linf_distance(const Belief& other) const;

  /// Hash of the support with probabilities rounded to 10 decimal digits.
  std::uint64_t rounded_hash() const;

  /// `s:p s:p ...` with round-trip precision.
  std::string to_string() const;
  static Belief parse(std::string_view text);

  bool operator==(const Belief&) const = default;

 private:
  std::vector<Entry> entries_;
};

/// Finite POMDP with a reachability target set.
class Pomdp {
 public:
  Pomdp() = default;
  Pomdp(int num_states, int num_actions, int num_observations);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int num_observations() const { return num_observations_; }

  const SparseDistribution& transition(StateId s, ActionId a) const {
    return transitions_[row(s, a)];
  }
  const SparseDistribution& observation(StateId next, ActionId a) const {
    return observations_[row(next, a)];
  }

  void set_transition(StateId s, ActionId a, SparseDistribution dist);
  void set_observation(StateId next, ActionId a, SparseDistribution dist);
  /// Adds probability mass to T(s, a, next) (accumulating duplicates).
  void add_transition(StateId s, ActionId a, StateId next, double p);
  void add_observation(StateId next, ActionId a, ObservationId o, double p);

  const Belief& initial_belief() const { return initial_belief_; }
  void set_initial_belief(Belief b) { initial_belief_ = std::move(b); }

  const std::vector<StateId>& targets() const { return targets_; }
  void set_targets(std::vector<StateId> targets);
  bool is_target(StateId s) const { return target_flags_[s] != 0; }

  std::vector<std::string> state_labels;
  std::vector<std::string> action_labels;
  std::vector<std::string> observation_labels;

  /// Throws ValidationError naming the first violated row.
  void validate() const;

  bool operator==(const Pomdp&) const = default;

 private:
  std::size_t row(int s, int a) const {
    return static_cast<std::size_t>(a) * num_states_ + s;
  }

  int num_states_ = 0;
  int num_actions_ = 0;
  int num_observations_ = 0;
  std::vector<SparseDistribution> transitions_;
  std::vector<SparseDistribution> observations_;
  Belief initial_belief_;
  std::vector<StateId> targets_;
  std::vector<char> target_flags_;
};

/// One branch of a belief transition: observation, its probability, and the
/// posterior belief.
struct BeliefSuccessor {
  ObservationId observation;
  double prob;
  Belief belief;
};

/// The POMDP with an absorbing sink s_T and a collect action a_T such that
/// the undiscounted total reward equals the probability of reaching T.
///
/// a_T moves target mass to the sink with reward 1 and is a reward-0
/// self-loop elsewhere. Targets are absorbing under the base actions. Both
/// a_T and the sink emit observation 0.
class AugmentedPomdp {
 public:
  explicit AugmentedPomdp(Pomdp base);

  const Pomdp& base() const { return base_; }

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int num_observations() const { return num_observations_; }
  StateId sink_state() const { return num_states_ - 1; }
  ActionId sink_action() const { return num_actions_ - 1; }

  const SparseDistribution& transition(StateId s, ActionId a) const {
    return transitions_[static_cast<std::size_t>(a) * num_states_ + s];
  }
  const SparseDistribution& observation(StateId next, ActionId a) const {
    return observations_[static_cast<std::size_t>(a) * num_states_ + next];
  }

  double reward(StateId s, ActionId a) const {
    return (a == sink_action() && is_target(s)) ? 1.0 : 0.0;
  }
  bool is_target(StateId s) const { return s < sink_state() && base_.is_target(s); }

  /// Initial belief embedded into the augmented state space.
  const Belief& initial_belief() const { return base_.initial_belief(); }

  double expected_reward(const Belief& b, ActionId a) const;
  double observation_prob(const Belief& b, ActionId a, ObservationId o) const;
  std::vector<double> observation_probs(const Belief& b, ActionId a) const;

  /// Throws ZeroProbabilityObservation when P(o | b, a) <= 1e-12.
  Belief belief_update(const Belief& b, ActionId a, ObservationId o) const;

  /// All positive-probability observation branches of (b, a), ordered by
  /// observation index.
  std::vector<BeliefSuccessor> successors(const Belief& b, ActionId a) const;

 private:
  Pomdp base_;
  int num_states_;
  int num_actions_;
  int num_observations_;
  std::vector<SparseDistribution> transitions_;
  std::vector<SparseDistribution> observations_;
};

/// Builds the augmented model; throws EmptyTargetSet if `targets` is empty.
AugmentedPomdp augment(Pomdp p, std::vector<StateId> targets);
/// Uses the targets already stored on `p`.
AugmentedPomdp augment(Pomdp p);

}  // namespace reach
