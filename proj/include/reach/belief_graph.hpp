#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <unordered_map>
#include <utility>
#include <vector>

#include "reach/bounds.hpp"
#include "reach/pomdp.hpp"

namespace reach {

using NodeId = int;

struct Edge {
  ObservationId observation;
  double prob;
  NodeId target;
};

struct BeliefNode {
  NodeId id = -1;
  Belief belief;

  // Successor branches of every action, filled by BeliefGraph::prepare.
  std::vector<ActionSuccessors> successors;
  // successor_ids[a][k] is the node of successors[a].successors[k], or -1
  // while that belief is not in the graph.
  std::vector<std::vector<NodeId>> successor_ids;
  std::vector<char> expanded;  // per action

  int visit_count = 0;  // times a trial chose an action here
  int arrivals = 0;     // times a trial reached this node, including as its last node
  std::vector<int> action_counts;

  double local_upper = 0.0;
  double local_lower_cache = 0.0;

  bool prepared() const { return !successors.empty(); }
  bool is_frontier() const { return num_expanded == 0; }
  int num_expanded = 0;
};

/// Finite fragment of the belief MDP. Beliefs within `merge_tol` (sup norm)
/// share a node, so the structure is a graph with cycles rather than a tree.
class BeliefGraph {
 public:
  BeliefGraph(const AugmentedPomdp& p, const Belief& root, double merge_tol = 1e-9);

  const AugmentedPomdp& pomdp() const { return *p_; }
  NodeId root() const { return 0; }
  std::size_t size() const { return nodes_.size(); }
  double merge_tolerance() const { return merge_tol_; }

  const BeliefNode& node(NodeId id) const { return nodes_[id]; }
  BeliefNode& node(NodeId id) { return nodes_[id]; }

  /// -1 when no node lies within the merge tolerance.
  NodeId find(const Belief& b) const;
  std::pair<NodeId, bool> find_or_insert(const Belief& b);

  /// Computes the successor branches of every action at `id` (once).
  void prepare(NodeId id);

  /// Materializes every branch of (id, a) as a node and records the edges.
  /// Returns the successor ids in observation order. Expanding an action a
  /// second time just returns the existing successors.
  const std::vector<NodeId>& expand(NodeId id, ActionId a);

  std::vector<Edge> edges(NodeId id, ActionId a) const;

  void record_visit(NodeId id, ActionId a);
  void record_arrival(NodeId id) { ++nodes_[id].arrivals; }

  std::vector<NodeId> frontier() const;
  std::size_t frontier_size() const { return frontier_count_; }

  /// Number of distinct (node, action) edges entering each node.
  std::vector<int> in_degrees() const;

  /// Re-resolves -1 successor ids against the current node set.
  void resolve_successors(NodeId id);

  /// Deterministic text dump: one line per node with its bounds, followed by
  /// one line per expanded action listing `observation:prob->node`.
  void dump(std::ostream& os, const std::function<double(const Belief&)>& lower,
            const std::function<double(const Belief&)>& upper) const;

 private:
  const AugmentedPomdp* p_;
  double merge_tol_;
  std::vector<BeliefNode> nodes_;
  std::unordered_multimap<std::uint64_t, NodeId> index_;
  std::size_t frontier_count_ = 0;
};

}  // namespace reach
