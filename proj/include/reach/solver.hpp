#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "reach/belief_graph.hpp"
#include "reach/bounds.hpp"
#include "reach/explorer.hpp"

namespace reach {

enum class TraceClock {
  wall,     // seconds since the solve started
  logical,  // event counter; makes traces reproducible byte for byte
};

struct SolverConfig {
  double epsilon = 1e-3;
  int trials_per_vi = 10;
  int d_trial_init = 200;
  int d_inc = 10;
  double stall_threshold = 0.01;
  int stall_window = 0;  // trials; 0 means trials_per_vi
  double vi_tol = 1e-8;
  double vmdp_tol = 1e-10;
  int blind_steps = 50;
  double blind_residual = 1e-6;
  double wall_clock_budget = 900.0;  // seconds
  std::optional<std::int64_t> max_trials;
  std::uint64_t rng_seed = 0;
  double prune_growth = 0.10;
  double merge_tol = 1e-9;
  TraceClock trace_clock = TraceClock::wall;
  HeuristicConfig heuristic;

  /// Throws ValidationError.
  void validate() const;
};

struct TraceRow {
  double time;
  std::int64_t trial;
  double lower;
  double upper;
  std::size_t n_alpha;
  std::size_t n_upper_points;
  std::size_t n_beliefs;
  bool after_vi = false;  // row emitted right after an exact VI phase
};

struct SolveResult {
  double lower = 0.0;
  double upper = 1.0;
  std::int64_t iterations = 0;  // outer batches
  std::int64_t trials = 0;
  std::int64_t trial_steps = 0;
  std::size_t beliefs_expanded = 0;
  double wall_time = 0.0;
  bool converged = false;
  int final_d_trial = 0;
  std::vector<TraceRow> trace;
  LowerBoundSet policy;
};

/// Trial-based two-sided bound refinement with periodic exact upper-bound
/// value iteration over the explored belief graph.
///
/// Step-wise use: construct, then call run_batch() until done(); or call
/// solve() for the whole loop.
class Solver {
 public:
  Solver(const AugmentedPomdp& p, SolverConfig cfg);
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  SolveResult solve();

  /// Runs up to trials_per_vi trials, then the exact VI phase. Returns false
  /// once the solve is finished (converged, budget or trial limit).
  bool run_batch();
  bool done() const;

  /// reach::reset_and_vi on the solver's graph and bounds; abandoned once the
  /// wall-clock budget runs out.
  int reset_and_vi();

  double root_lower() const;
  double root_upper() const;
  double gap() const { return root_upper() - root_lower(); }

  const BeliefGraph& graph() const { return graph_; }
  const LowerBoundSet& lower() const { return lower_; }
  const UpperBoundSet& upper() const { return upper_; }
  LowerBoundSet& lower() { return lower_; }
  UpperBoundSet& upper() { return upper_; }
  const std::vector<TraceRow>& trace() const { return trace_; }
  int d_trial() const { return d_trial_; }
  std::int64_t trials() const { return trials_; }
  std::int64_t trial_steps() const { return trial_steps_; }
  const SolverConfig& config() const { return cfg_; }

  /// Called after every trial and every VI phase (for soundness probes).
  std::function<void(const Solver&)> on_event;

  SolveResult result() const;

 private:
  void run_trial();
  void emit(bool after_vi);
  double elapsed() const;
  bool out_of_budget() const;

  const AugmentedPomdp* p_;
  SolverConfig cfg_;
  LowerBoundSet lower_;
  UpperBoundSet upper_;
  BeliefGraph graph_;
  Explorer explorer_;
  std::vector<TraceRow> trace_;
  std::chrono::steady_clock::time_point start_;
  int d_trial_;
  std::int64_t trials_ = 0;
  std::int64_t trial_steps_ = 0;
  std::int64_t iterations_ = 0;
  std::int64_t events_ = 0;
  double last_time_ = -1.0;
  double stall_lower_ = 0.0;
  double stall_upper_ = 1.0;
  std::int64_t stall_mark_ = 0;
};

/// Exact upper-bound value iteration over `graph`: interior nodes start at
/// V^L, frontier nodes are held at the current Υ^U, and Jacobi sweeps over
/// every action run to the least fixed point (successors outside the graph
/// contribute their Υ^U value). Certified node values are inserted into
/// `upper`. Returns the number of sweeps, or -1 when `stop` fired before the
/// values were committed (the bounds are then left as they were).
int reset_and_vi(BeliefGraph& graph, const LowerBoundSet& lower, UpperBoundSet& upper,
                 double vi_tol, double gamma = 1.0, const std::function<bool()>& stop = {});

/// Trace CSV with header `time_s,trial,lower,upper,n_alpha,n_upper_points,n_beliefs`.
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);

/// Result JSON; the trace is inlined unless `trace_path` is given.
std::string result_json(const SolveResult& r, const std::string& trace_path = {});

}  // namespace reach
