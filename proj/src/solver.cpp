#include "reach/solver.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "reach/errors.hpp"
#include "reach/value_iteration.hpp"

namespace reach {

void SolverConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in (0, 1]");
  if (trials_per_vi <= 0) throw ValidationError("trials_per_vi must be positive");
  if (d_trial_init < 0 || d_inc < 0) throw ValidationError("trial depths must be >= 0");
  if (stall_window < 0) throw ValidationError("stall_window must be >= 0");
  if (!(vi_tol > 0.0)) throw ValidationError("vi_tol must be positive");
  if (blind_steps < 0) throw ValidationError("blind_steps must be >= 0");
  if (!(wall_clock_budget > 0.0)) throw ValidationError("budget must be positive");
  if (max_trials && *max_trials < 0) throw ValidationError("max_trials must be >= 0");
  if (!(merge_tol >= 0.0)) throw ValidationError("merge_tol must be >= 0");
  heuristic.validate();
}

Solver::Solver(const AugmentedPomdp& p, SolverConfig cfg)
    : p_(&p),
      cfg_((cfg.validate(), std::move(cfg))),
      lower_(init_lower_blind(p, cfg_.blind_steps, cfg_.heuristic.gamma, cfg_.blind_residual)),
      upper_(init_upper_vmdp(p, cfg_.vmdp_tol, cfg_.heuristic.gamma)),
      graph_(p, p.initial_belief(), cfg_.merge_tol),
      explorer_(p, graph_, lower_, upper_, cfg_.heuristic, cfg_.rng_seed),
      start_(std::chrono::steady_clock::now()),
      d_trial_(cfg_.d_trial_init) {
  if (cfg_.stall_window == 0) cfg_.stall_window = cfg_.trials_per_vi;
  stall_lower_ = root_lower();
  stall_upper_ = root_upper();
  emit(false);
}

double Solver::root_lower() const { return lower_.value(graph_.node(graph_.root()).belief); }
double Solver::root_upper() const { return upper_.value(graph_.node(graph_.root()).belief); }

double Solver::elapsed() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

bool Solver::out_of_budget() const {
  if (cfg_.max_trials && trials_ >= *cfg_.max_trials) return true;
  return elapsed() >= cfg_.wall_clock_budget;
}

bool Solver::done() const { return gap() <= cfg_.epsilon || out_of_budget(); }

void Solver::emit(bool after_vi) {
  double t;
  if (cfg_.trace_clock == TraceClock::logical) {
    t = static_cast<double>(events_);
  } else {
    t = std::max(elapsed(), last_time_ + 1e-9);
  }
  ++events_;
  last_time_ = t;
  trace_.push_back({t, trials_, root_lower(), root_upper(), lower_.size(), upper_.points().size(),
                    graph_.size(), after_vi});
  if (on_event) on_event(*this);
}

void Solver::run_trial() {
  const bool rp = cfg_.heuristic.mode == HeuristicMode::reachability;
  const double eps = rp ? gap() : cfg_.epsilon;
  const auto r = explorer_.run_trial(eps, d_trial_);
  ++trials_;
  trial_steps_ += r.steps;

  if (lower_.should_prune(cfg_.prune_growth)) lower_.prune();
  if (upper_.should_collect(cfg_.prune_growth)) upper_.collect_garbage(0.0);

  if (trials_ - stall_mark_ >= cfg_.stall_window) {
    const double lo = root_lower();
    const double hi = root_upper();
    if (std::abs(lo - stall_lower_) + std::abs(hi - stall_upper_) < cfg_.stall_threshold) {
      d_trial_ += cfg_.d_inc;
    }
    stall_lower_ = lo;
    stall_upper_ = hi;
    stall_mark_ = trials_;
  }
  emit(false);
}

int reset_and_vi(BeliefGraph& graph, const LowerBoundSet& lower, UpperBoundSet& upper,
                 double vi_tol, double gamma, const std::function<bool()>& stop) {
  const int n = static_cast<int>(graph.size());
  std::vector<double> init(n);
  kernels::SweepGraph g;
  std::vector<std::pair<int, double>> edges;
  for (NodeId id = 0; id < n; ++id) {
    if (stop && id % 256 == 0 && stop()) return -1;
    const Belief& b = graph.node(id).belief;
    if (graph.node(id).is_frontier()) {
      g.add_node(true);
      init[id] = upper.value(b);
      graph.node(id).local_upper = init[id];
      continue;
    }
    g.add_node(false);
    init[id] = lower.value(b);
    graph.resolve_successors(id);
    const auto& node = graph.node(id);
    for (std::size_t a = 0; a < node.successors.size(); ++a) {
      double constant = node.successors[a].reward;
      edges.clear();
      const auto& branches = node.successors[a].successors;
      for (std::size_t k = 0; k < branches.size(); ++k) {
        const NodeId target = node.successor_ids[a][k];
        if (target >= 0) {
          edges.emplace_back(target, gamma * branches[k].prob);
        } else {
          constant += gamma * branches[k].prob * upper.value(branches[k].belief);
        }
      }
      g.add_choice(constant);
      for (const auto& [target, prob] : edges) g.add_edge(target, prob);
    }
  }

  const auto fp = certified_least_fixed_point(g, std::move(init), vi_tol, vi_tol);
  if (stop && stop()) return -1;
  if (fp.certified) {
    for (NodeId id = 0; id < n; ++id) {
      auto& node = graph.node(id);
      if (node.is_frontier()) continue;
      node.local_upper = fp.upper[id];
      upper.insert(node.belief, fp.upper[id]);
    }
  }
  return fp.sweeps;
}

int Solver::reset_and_vi() {
  return reach::reset_and_vi(graph_, lower_, upper_, cfg_.vi_tol, cfg_.heuristic.gamma,
                             [this] { return elapsed() >= cfg_.wall_clock_budget; });
}

bool Solver::run_batch() {
  if (done()) return false;
  for (int i = 0; i < cfg_.trials_per_vi && !done(); ++i) run_trial();
  ++iterations_;
  if (cfg_.heuristic.mode == HeuristicMode::reachability) {
    if (reset_and_vi() >= 0) emit(true);
  }
  return !done();
}

SolveResult Solver::solve() {
  while (run_batch()) {
  }
  return result();
}

SolveResult Solver::result() const {
  SolveResult r;
  r.lower = root_lower();
  r.upper = root_upper();
  r.iterations = iterations_;
  r.trials = trials_;
  r.trial_steps = trial_steps_;
  r.beliefs_expanded = graph_.size() - graph_.frontier_size();
  r.wall_time = elapsed();
  r.converged = gap() <= cfg_.epsilon;
  r.final_d_trial = d_trial_;
  r.trace = trace_;
  r.policy = lower_;
  return r;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "time_s,trial,lower,upper,n_alpha,n_upper_points,n_beliefs\n";
  char buf[256];
  for (const auto& row : trace) {
    std::snprintf(buf, sizeof buf, "%.9f,%lld,%.12f,%.12f,%zu,%zu,%zu\n", row.time,
                  static_cast<long long>(row.trial), row.lower, row.upper, row.n_alpha,
                  row.n_upper_points, row.n_beliefs);
    os << buf;
  }
}

std::string result_json(const SolveResult& r, const std::string& trace_path) {
  nlohmann::ordered_json j;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  j["gap"] = r.upper - r.lower;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["trials"] = r.trials;
  j["trial_steps"] = r.trial_steps;
  j["beliefs_expanded"] = r.beliefs_expanded;
  j["wall_time"] = r.wall_time;
  j["d_trial"] = r.final_d_trial;
  if (trace_path.empty()) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : r.trace) {
      rows.push_back({row.time, row.trial, row.lower, row.upper, row.n_alpha,
                      row.n_upper_points, row.n_beliefs});
    }
    j["trace_columns"] = {"time_s", "trial", "lower", "upper", "n_alpha", "n_upper_points",
                          "n_beliefs"};
    j["trace"] = std::move(rows);
  } else {
    j["trace_path"] = trace_path;
  }
  auto policy = nlohmann::ordered_json::array();
  for (const auto& alpha : r.policy.vectors()) {
    policy.push_back({{"action", alpha.action}, {"values", alpha.values}});
  }
  j["policy"] = std::move(policy);
  return j.dump(2);
}

}  // namespace reach
