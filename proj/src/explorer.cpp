#include "reach/explorer.hpp"

#include <algorithm>
#include <cmath>

#include "reach/errors.hpp"

namespace reach {

void HeuristicConfig::validate() const {
  if (!(kappa > 0.0 && kappa < 1.0)) throw ValidationError("kappa must lie in (0, 1)");
  if (!(xi >= 0.0 && xi <= 1.0)) throw ValidationError("xi must lie in [0, 1]");
  if (!(mix_p >= 0.0 && mix_p <= 1.0)) throw ValidationError("mix_p must lie in [0, 1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in (0, 1]");
  if (c_a < 0.0 || c_z < 0.0) throw ValidationError("exploration constants must be >= 0");
}

double weu(double upper, double lower, int t, double eps, double gamma) {
  return upper - lower - eps * std::pow(gamma, -t);
}

ActionId select_action(std::span<const double> q_upper, std::span<const int> action_counts,
                       int node_visits, std::span<const char> barred,
                       const HeuristicConfig& cfg) {
  double best_q = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < q_upper.size(); ++a) {
    if (!barred[a]) best_q = std::max(best_q, q_upper[a]);
  }
  if (best_q == -std::numeric_limits<double>::infinity()) throw NoAdmissibleAction();

  const double root_visits = std::sqrt(static_cast<double>(node_visits));
  ActionId choice = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < q_upper.size(); ++a) {
    if (barred[a]) continue;
    const double diff = best_q - q_upper[a];
    if (!(diff < cfg.xi || diff == 0.0)) continue;
    const double score = q_upper[a] + cfg.c_a * root_visits / (1.0 + action_counts[a]);
    if (score > best_score) {
      best_score = score;
      choice = static_cast<ActionId>(a);
    }
  }
  return choice;
}

ActionId select_action_ie_max(std::span<const double> q_upper, std::span<const char> barred) {
  ActionId choice = -1;
  for (std::size_t a = 0; a < q_upper.size(); ++a) {
    if (barred[a]) continue;
    if (choice < 0 || q_upper[a] > q_upper[choice]) choice = static_cast<ActionId>(a);
  }
  if (choice < 0) throw NoAdmissibleAction();
  return choice;
}

std::size_t select_observation(std::span<const ObservationCandidate> candidates,
                               int action_visits, bool hsvi2_rule, double node_weu,
                               const HeuristicConfig& cfg) {
  const double root_visits = std::sqrt(static_cast<double>(action_visits));
  std::size_t choice = candidates.size();
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto& c = candidates[k];
    if (!c.admissible) continue;
    double score;
    if (hsvi2_rule) {
      score = c.prob * c.weu;
    } else {
      const double bonus = c.prob * cfg.c_z * root_visits / (1.0 + c.successor_visits);
      score = (cfg.literal_observation_score ? node_weu : c.prob * c.weu) + bonus;
    }
    if (choice == candidates.size() || score > best_score ||
        (score == best_score && c.observation < candidates[choice].observation)) {
      best_score = score;
      choice = k;
    }
  }
  if (choice == candidates.size()) throw NoAdmissibleObservation();
  return choice;
}

Explorer::Explorer(const AugmentedPomdp& p, BeliefGraph& graph, LowerBoundSet& lower,
                   UpperBoundSet& upper, const HeuristicConfig& cfg, std::uint64_t seed)
    : p_(&p), graph_(&graph), lower_(&lower), upper_(&upper), cfg_(cfg), rng_(seed) {}

bool Explorer::use_hsvi2_observation_rule() {
  if (cfg_.mode == HeuristicMode::hsvi2) return true;
  if (cfg_.mix_p <= 0.0) return false;
  if (cfg_.mix_p >= 1.0) return true;
  return std::bernoulli_distribution(cfg_.mix_p)(rng_);
}

std::optional<Explorer::Choice> Explorer::choose(NodeId id, int t, double eps,
                                                 const std::vector<char>& visited) {
  const bool rp = cfg_.mode == HeuristicMode::reachability;
  graph_->prepare(id);
  graph_->resolve_successors(id);
  const auto q = upper_q_values(*upper_, graph_->node(id).successors, cfg_.gamma);
  std::vector<char> barred(q.size(), 0);
  const double weu_eps = rp ? cfg_.kappa * eps : eps;
  const bool hsvi2_rule = use_hsvi2_observation_rule();

  while (true) {
    ActionId a;
    try {
      if (rp) {
        const auto& n = graph_->node(id);
        a = select_action(q, n.action_counts, n.visit_count, barred, cfg_);
      } else {
        a = select_action_ie_max(q, barred);
      }
    } catch (const NoAdmissibleAction&) {
      return std::nullopt;
    }

    const auto& n = graph_->node(id);
    const auto& branches = n.successors[a].successors;
    std::vector<ObservationCandidate> candidates;
    candidates.reserve(branches.size());
    bool any = false;
    for (std::size_t k = 0; k < branches.size(); ++k) {
      const NodeId sid = n.successor_ids[a][k];
      const Belief& b = sid >= 0 ? graph_->node(sid).belief : branches[k].belief;
      ObservationCandidate c{branches[k].observation, branches[k].prob,
                             weu(upper_->value(b), lower_->value(b), t + 1, weu_eps, cfg_.gamma),
                             sid >= 0 ? graph_->node(sid).arrivals : 0};
      c.admissible = !rp || sid < 0 || !visited[sid];
      any = any || c.admissible;
      candidates.push_back(c);
    }
    if (!any) {
      barred[a] = 1;
      continue;
    }
    const double node_weu =
        weu(upper_->value(n.belief), lower_->value(n.belief), t, weu_eps, cfg_.gamma);
    const std::size_t k =
        select_observation(candidates, n.action_counts[a], hsvi2_rule, node_weu, cfg_);
    const NodeId next = graph_->expand(id, a)[k];
    return Choice{a, next};
  }
}

TrialResult Explorer::run_trial(double eps, int d_trial) {
  const bool rp = cfg_.mode == HeuristicMode::reachability;
  TrialResult result;
  std::vector<char> visited(graph_->size(), 0);
  std::vector<NodeId> backups;
  auto mark = [&](NodeId id) {
    if (visited.size() <= static_cast<std::size_t>(id)) visited.resize(graph_->size(), 0);
    visited[id] = 1;
  };

  NodeId cur = graph_->root();
  int t = 0;
  while (true) {
    mark(cur);
    graph_->record_arrival(cur);
    const Belief& b = graph_->node(cur).belief;
    const double gap = upper_->value(b) - lower_->value(b);
    const double threshold = rp ? cfg_.kappa * eps : eps * std::pow(cfg_.gamma, -t);
    if (gap <= threshold || t > d_trial) break;

    auto choice = choose(cur, t, eps, visited);
    if (!choice) {
      // Every action at cur leads only into the current sequence. Resume
      // from the earliest sequence node that cur can reach, wrapping around.
      ++result.dead_ends;
      backups.push_back(cur);
      std::size_t entry = result.sequence.size();
      const auto& n = graph_->node(cur);
      for (const auto& ids : n.successor_ids) {
        for (NodeId sid : ids) {
          if (sid < 0) continue;
          auto it = std::find(result.sequence.begin(), result.sequence.end(), sid);
          entry = std::min(entry, static_cast<std::size_t>(it - result.sequence.begin()));
        }
      }
      if (entry == result.sequence.size()) entry = 0;
      std::vector<char> tried(graph_->size(), 0);
      const std::size_t len = result.sequence.size();
      for (std::size_t i = 0; i < len && !choice; ++i) {
        const NodeId candidate = result.sequence[(entry + i) % len];
        if (tried[candidate]) continue;
        tried[candidate] = 1;
        choice = choose(candidate, t, eps, visited);
        if (choice) cur = candidate;
      }
      if (!choice) {
        result.exhausted = true;
        break;
      }
    }
    graph_->record_visit(cur, choice->action);
    result.sequence.push_back(cur);
    backups.push_back(cur);
    ++result.steps;
    cur = choice->next;
    ++t;
  }
  result.depth = t;

  for (auto it = backups.rbegin(); it != backups.rend(); ++it) {
    const auto& n = graph_->node(*it);
    backup_lower(*p_, *lower_, n.belief, n.successors, cfg_.gamma);
    backup_upper(*p_, *upper_, n.belief, n.successors, cfg_.gamma);
  }
  return result;
}

}  // namespace reach
