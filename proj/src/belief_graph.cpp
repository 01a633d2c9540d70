#include "reach/belief_graph.hpp"

#include <cstdio>
#include <ostream>

namespace reach {

BeliefGraph::BeliefGraph(const AugmentedPomdp& p, const Belief& root, double merge_tol)
    : p_(&p), merge_tol_(merge_tol) {
  find_or_insert(root);
}

NodeId BeliefGraph::find(const Belief& b) const {
  auto [first, last] = index_.equal_range(b.rounded_hash());
  for (auto it = first; it != last; ++it) {
    if (nodes_[it->second].belief.linf_distance(b) <= merge_tol_) return it->second;
  }
  return -1;
}

std::pair<NodeId, bool> BeliefGraph::find_or_insert(const Belief& b) {
  if (NodeId id = find(b); id >= 0) return {id, false};
  BeliefNode n;
  n.id = static_cast<NodeId>(nodes_.size());
  n.belief = b;
  n.expanded.assign(p_->num_actions(), 0);
  n.action_counts.assign(p_->num_actions(), 0);
  index_.emplace(b.rounded_hash(), n.id);
  nodes_.push_back(std::move(n));
  ++frontier_count_;
  return {nodes_.back().id, true};
}

void BeliefGraph::prepare(NodeId id) {
  if (nodes_[id].prepared()) return;
  auto succ = compute_successors(*p_, nodes_[id].belief);
  std::vector<std::vector<NodeId>> ids(succ.size());
  for (std::size_t a = 0; a < succ.size(); ++a) {
    ids[a].reserve(succ[a].successors.size());
    for (const auto& s : succ[a].successors) ids[a].push_back(find(s.belief));
  }
  nodes_[id].successors = std::move(succ);
  nodes_[id].successor_ids = std::move(ids);
}

void BeliefGraph::resolve_successors(NodeId id) {
  auto& n = nodes_[id];
  for (std::size_t a = 0; a < n.successors.size(); ++a) {
    for (std::size_t k = 0; k < n.successors[a].successors.size(); ++k) {
      if (n.successor_ids[a][k] < 0) {
        n.successor_ids[a][k] = find(n.successors[a].successors[k].belief);
      }
    }
  }
}

const std::vector<NodeId>& BeliefGraph::expand(NodeId id, ActionId a) {
  prepare(id);
  if (!nodes_[id].expanded[a]) {
    const std::size_t count = nodes_[id].successors[a].successors.size();
    for (std::size_t k = 0; k < count; ++k) {
      // find_or_insert may reallocate nodes_, so re-index every time.
      if (nodes_[id].successor_ids[a][k] >= 0) continue;
      const Belief b = nodes_[id].successors[a].successors[k].belief;
      nodes_[id].successor_ids[a][k] = find_or_insert(b).first;
    }
    nodes_[id].expanded[a] = 1;
    if (nodes_[id].num_expanded++ == 0) --frontier_count_;
  }
  return nodes_[id].successor_ids[a];
}

std::vector<Edge> BeliefGraph::edges(NodeId id, ActionId a) const {
  std::vector<Edge> out;
  const auto& n = nodes_[id];
  if (!n.expanded[a]) return out;
  for (std::size_t k = 0; k < n.successors[a].successors.size(); ++k) {
    const auto& s = n.successors[a].successors[k];
    out.push_back({s.observation, s.prob, n.successor_ids[a][k]});
  }
  return out;
}

void BeliefGraph::record_visit(NodeId id, ActionId a) {
  ++nodes_[id].visit_count;
  ++nodes_[id].action_counts[a];
}

std::vector<NodeId> BeliefGraph::frontier() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.is_frontier()) out.push_back(n.id);
  }
  return out;
}

std::vector<int> BeliefGraph::in_degrees() const {
  std::vector<int> deg(nodes_.size(), 0);
  for (const auto& n : nodes_) {
    for (std::size_t a = 0; a < n.expanded.size(); ++a) {
      if (!n.expanded[a]) continue;
      for (NodeId t : n.successor_ids[a]) ++deg[t];
    }
  }
  return deg;
}

void BeliefGraph::dump(std::ostream& os, const std::function<double(const Belief&)>& lower,
                       const std::function<double(const Belief&)>& upper) const {
  char buf[128];
  for (const auto& n : nodes_) {
    std::snprintf(buf, sizeof buf, "node %d frontier=%d visits=%d lower=%.9f upper=%.9f ", n.id,
                  n.is_frontier() ? 1 : 0, n.visit_count, lower(n.belief), upper(n.belief));
    os << buf << "belief=" << n.belief.to_string() << '\n';
    for (std::size_t a = 0; a < n.expanded.size(); ++a) {
      if (!n.expanded[a]) continue;
      os << "  action " << a << " count=" << n.action_counts[a] << ':';
      for (const auto& e : edges(n.id, static_cast<ActionId>(a))) {
        std::snprintf(buf, sizeof buf, " %d:%.9f->%d", e.observation, e.prob, e.target);
        os << buf;
      }
      os << '\n';
    }
  }
}

}  // namespace reach
