#pragma once

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "reach/belief_graph.hpp"
#include "reach/bounds.hpp"

namespace reach {

enum class HeuristicMode {
  reachability,  // UCB actions within radius ξ, count-bonus observations, loop rule
  hsvi2,         // IE-MAX actions, excess-uncertainty observations, γ^-t termination
};

struct HeuristicConfig {
  double c_a = 0.01;
  double c_z = 0.01;
  double xi = 0.1;
  double kappa = 0.01;
  double mix_p = 0.0;  // probability of scoring observations with the hsvi2 rule
  HeuristicMode mode = HeuristicMode::reachability;
  double gamma = 1.0;
  // Score observations as WEU(b) + bonus (WEU constant across o) instead of
  // P(o)·WEU(b') + bonus.
  bool literal_observation_score = false;

  /// Throws ValidationError when a field is out of range.
  void validate() const;
};

/// Weighted excess uncertainty: gap - eps·γ^-t.
double weu(double upper, double lower, int t, double eps, double gamma);

/// UCB choice among non-barred actions whose Q^U is within ξ of the best
/// non-barred Q^U. Ties go to the lowest index. Throws NoAdmissibleAction
/// when every action is barred.
ActionId select_action(std::span<const double> q_upper, std::span<const int> action_counts,
                       int node_visits, std::span<const char> barred,
                       const HeuristicConfig& cfg);

/// IE-MAX: argmax Q^U over non-barred actions, lowest index on ties.
ActionId select_action_ie_max(std::span<const double> q_upper, std::span<const char> barred);

struct ObservationCandidate {
  ObservationId observation;
  double prob;          // P(o | b, a*)
  double weu;           // WEU(b', t+1, eps)
  int successor_visits; // N(b')
  bool admissible = true;
};

/// Index of the chosen candidate. `hsvi2_rule` scores by P·WEU(b') alone;
/// otherwise P·WEU(b') + P·c_z·sqrt(N(b,a*))/(1+N(b')), or the literal
/// variant with `node_weu` in place of P·WEU(b'). Ties go to the lowest
/// observation. Throws NoAdmissibleObservation.
std::size_t select_observation(std::span<const ObservationCandidate> candidates,
                               int action_visits, bool hsvi2_rule, double node_weu,
                               const HeuristicConfig& cfg);

struct TrialResult {
  int steps = 0;        // selections made
  int depth = 0;        // t at termination
  int dead_ends = 0;    // nodes where every action was barred
  bool exhausted = false;  // ended because no node in the sequence had a choice
  std::vector<NodeId> sequence;
};

/// Runs depth-first trials from the graph root and backs up bounds along the
/// sampled sequence.
class Explorer {
 public:
  Explorer(const AugmentedPomdp& p, BeliefGraph& graph, LowerBoundSet& lower,
           UpperBoundSet& upper, const HeuristicConfig& cfg, std::uint64_t seed);

  /// `eps` is the root gap at trial start in reachability mode and the
  /// target precision in hsvi2 mode.
  TrialResult run_trial(double eps, int d_trial);

  double lower_value(const Belief& b) const { return lower_->value(b); }
  double upper_value(const Belief& b) const { return upper_->value(b); }

 private:
  struct Choice {
    ActionId action;
    NodeId next;
  };

  std::optional<Choice> choose(NodeId id, int t, double eps, const std::vector<char>& visited);
  bool use_hsvi2_observation_rule();

  const AugmentedPomdp* p_;
  BeliefGraph* graph_;
  LowerBoundSet* lower_;
  UpperBoundSet* upper_;
  HeuristicConfig cfg_;
  std::mt19937_64 rng_;
};

}  // namespace reach
