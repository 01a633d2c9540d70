#include "reach/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "reach/errors.hpp"
#include "reach/generators.hpp"
#include "reach/model_io.hpp"
#include "reach/policy_sim.hpp"
#include "reach/solver.hpp"

namespace reach::cli {
namespace {

struct ModelSource {
  std::string path;
  std::string preset;

  Pomdp load() const {
    if (!path.empty() && !preset.empty()) throw Error("give either a model file or --preset");
    if (!preset.empty()) return reach::preset(preset);
    if (path.empty()) throw Error("no model: pass a model file or --preset");
    return load_model(path);
  }
};

struct SolverFlags {
  SolverConfig cfg;
  std::string heuristic = "rp";
  std::string budget = "900s";
  std::string trace_clock = "wall";
  std::int64_t max_trials = -1;

  SolverConfig resolve() {
    SolverConfig out = cfg;
    out.heuristic.mode = heuristic == "hsvi2" ? HeuristicMode::hsvi2 : HeuristicMode::reachability;
    out.wall_clock_budget = parse_duration(budget);
    out.trace_clock = trace_clock == "logical" ? TraceClock::logical : TraceClock::wall;
    if (max_trials >= 0) out.max_trials = max_trials;
    return out;
  }
};

void add_model_options(CLI::App* app, ModelSource& src) {
  app->add_option("model", src.path, "Model file in the text format");
  app->add_option("--preset", src.preset, "Named benchmark model")
      ->check(CLI::IsMember(preset_names()));
}

void add_solver_options(CLI::App* app, SolverFlags& f) {
  auto& c = f.cfg;
  auto& h = c.heuristic;
  app->add_option("--epsilon", c.epsilon, "Target gap at the initial belief")
      ->capture_default_str();
  app->add_option("--budget", f.budget, "Wall-clock budget (e.g. 900s, 2h)")
      ->capture_default_str();
  app->add_option("--max-trials", f.max_trials, "Stop after this many trials");
  app->add_option("--seed", c.rng_seed, "Random seed")->capture_default_str();
  app->add_option("--heuristic", f.heuristic, "rp (reachability) or hsvi2 (discounted baseline)")
      ->check(CLI::IsMember({"rp", "hsvi2"}))
      ->capture_default_str();
  app->add_option("--gamma", h.gamma, "Discount factor")->capture_default_str();
  app->add_option("--c-a", h.c_a, "Action exploration constant")->capture_default_str();
  app->add_option("--c-z", h.c_z, "Observation exploration constant")->capture_default_str();
  app->add_option("--xi", h.xi, "Action selection radius")->capture_default_str();
  app->add_option("--kappa", h.kappa, "Trial termination gap factor")->capture_default_str();
  app->add_option("--mix-p", h.mix_p, "Probability of the hsvi2 observation rule")
      ->capture_default_str();
  app->add_flag("--literal-observation-score", h.literal_observation_score,
                "Score observations with WEU(b) instead of P(o)*WEU(b')");
  app->add_option("--d-trial", c.d_trial_init, "Initial trial depth")->capture_default_str();
  app->add_option("--d-inc", c.d_inc, "Trial depth increment")->capture_default_str();
  app->add_option("--trials-per-vi", c.trials_per_vi, "Trials between exact VI phases")
      ->capture_default_str();
  app->add_option("--stall-window", c.stall_window, "Trials per stall check (0: trials-per-vi)")
      ->capture_default_str();
  app->add_option("--stall-threshold", c.stall_threshold, "Root bound change counted as progress")
      ->capture_default_str();
  app->add_option("--vi-tol", c.vi_tol, "Residual for exact upper-bound VI")
      ->capture_default_str();
  app->add_option("--prune-growth", c.prune_growth, "Relative growth that triggers pruning")
      ->capture_default_str();
  app->add_option("--merge-tol", c.merge_tol, "Belief merge tolerance (sup norm)")
      ->capture_default_str();
  app->add_option("--blind-steps", c.blind_steps, "Sweeps of blind-policy initialization")
      ->capture_default_str();
  app->add_option("--trace-clock", f.trace_clock, "wall or logical time column")
      ->check(CLI::IsMember({"wall", "logical"}))
      ->capture_default_str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

Cell parse_cell(const std::string& text) {
  int x = 0, y = 0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> x >> comma >> y) || comma != ',') throw Error("bad cell '" + text + "' (want x,y)");
  return {x, y};
}

std::vector<Cell> parse_cells(const std::vector<std::string>& items) {
  std::vector<Cell> out;
  for (const auto& s : items) out.push_back(parse_cell(s));
  return out;
}

struct SolveOutputs {
  std::string result_path;
  std::string trace_path;
  std::string graph_path;
};

int do_solve(const ModelSource& src, SolverFlags& flags, const SolveOutputs& out) {
  const auto model = augment(src.load());
  Solver solver(model, flags.resolve());
  const auto r = solver.solve();

  std::printf("lower    %.9f\n", r.lower);
  std::printf("upper    %.9f\n", r.upper);
  std::printf("gap      %.9f\n", r.upper - r.lower);
  std::printf("time     %.3f s\n", r.wall_time);
  std::printf("beliefs  %zu\n", solver.graph().size());
  std::printf("trials   %lld\n", static_cast<long long>(r.trials));
  std::printf("status   %s\n", r.converged ? "converged" : "anytime");

  if (!out.trace_path.empty()) {
    std::ostringstream csv;
    write_trace_csv(csv, r.trace);
    write_file(out.trace_path, csv.str());
  }
  if (!out.result_path.empty()) write_file(out.result_path, result_json(r, out.trace_path) + "\n");
  if (!out.graph_path.empty()) {
    std::ostringstream dump;
    solver.graph().dump(
        dump, [&](const Belief& b) { return solver.lower().value(b); },
        [&](const Belief& b) { return solver.upper().value(b); });
    write_file(out.graph_path, dump.str());
  }
  return r.converged ? kExitConverged : kExitAnytime;
}

LowerBoundSet load_policy(const std::string& path, int num_states) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open policy file '" + path + "'");
  const auto j = nlohmann::json::parse(in);
  std::vector<AlphaVector> vectors;
  for (const auto& item : j.at("policy")) {
    AlphaVector alpha{item.at("values").get<std::vector<double>>(), item.at("action").get<int>()};
    if (static_cast<int>(alpha.values.size()) != num_states) {
      throw Error("policy vector length does not match the model");
    }
    vectors.push_back(std::move(alpha));
  }
  return LowerBoundSet(std::move(vectors));
}

int do_simulate(const ModelSource& src, SolverFlags& flags, const std::string& policy_path,
                std::int64_t episodes, int max_steps, const std::string& output) {
  const auto model = augment(src.load());
  auto cfg = flags.resolve();
  LowerBoundSet gamma_set;
  int d_trial = cfg.d_trial_init;
  std::optional<SolveResult> solved;
  if (!policy_path.empty()) {
    gamma_set = load_policy(policy_path, model.num_states());
  } else {
    Solver solver(model, cfg);
    solved = solver.solve();
    gamma_set = solved->policy;
    d_trial = solved->final_d_trial;
  }
  if (max_steps <= 0) max_steps = 10 * d_trial;
  const AlphaPolicy policy(model, std::move(gamma_set));
  const auto report = simulate(policy, episodes, max_steps, cfg.rng_seed);

  std::printf("estimate   %.6f\n", report.estimate);
  std::printf("ci99       %.6f\n", report.ci99);
  std::printf("episodes   %lld\n", static_cast<long long>(report.episodes));
  std::printf("truncated  %lld\n", static_cast<long long>(report.truncated));
  if (solved) {
    std::printf("bounds     [%.9f, %.9f]\n", solved->lower, solved->upper);
    std::printf("sandwich   %s\n", report.sandwiched(solved->lower, solved->upper) ? "ok" : "VIOLATED");
  }
  if (!output.empty()) write_file(output, sim_report_json(report) + "\n");
  if (solved && !report.sandwiched(solved->lower, solved->upper)) return kExitError;
  return kExitConverged;
}

}  // namespace

double parse_duration(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error("bad duration '" + text + "'");
  }
  const std::string unit = text.substr(used);
  double scale = 0.0;
  if (unit.empty() || unit == "s") scale = 1.0;
  if (unit == "ms") scale = 1e-3;
  if (unit == "m" || unit == "min") scale = 60.0;
  if (unit == "h") scale = 3600.0;
  if (scale == 0.0 || !(value > 0.0)) throw Error("bad duration '" + text + "'");
  return value * scale;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Two-sided bounds on maximal reachability probabilities in POMDPs"};
  app.name("pomdp-reach");
  app.require_subcommand(1);

  ModelSource src;
  SolverFlags flags;
  SolveOutputs outputs;

  auto* solve = app.add_subcommand("solve", "Compute bounds on the reachability probability");
  add_model_options(solve, src);
  add_solver_options(solve, flags);
  solve->add_option("--result", outputs.result_path, "Result JSON path");
  solve->add_option("--trace", outputs.trace_path, "Trace CSV path");
  solve->add_option("--graph-dump", outputs.graph_path, "Belief graph dump path");

  auto* sim = app.add_subcommand("simulate", "Monte-Carlo evaluation of the alpha-vector policy");
  add_model_options(sim, src);
  add_solver_options(sim, flags);
  std::string policy_path, sim_output;
  std::int64_t episodes = 100000;
  int max_steps = 0;
  sim->add_option("--policy", policy_path, "Result JSON holding the policy (solves if absent)");
  sim->add_option("--episodes", episodes, "Number of episodes")->capture_default_str();
  sim->add_option("--max-steps", max_steps, "Episode truncation (default 10*d_trial)");
  sim->add_option("-o,--output", sim_output, "Report JSON path");

  auto* gen = app.add_subcommand("generate", "Write a generated benchmark model");
  std::string family, gen_preset, gen_output;
  int gen_n = 0;
  std::optional<double> gen_slip;
  double continuation = 1.0;
  std::vector<std::string> obstacles, stations;
  std::string target;
  int energy_init = -1;
  gen->add_option("--family", family, "grid_av, refuel, fixture_fig1 or chain")
      ->check(CLI::IsMember({"grid_av", "refuel", "fixture_fig1", "chain"}));
  gen->add_option("--preset", gen_preset, "Named benchmark model")
      ->check(CLI::IsMember(preset_names()));
  gen->add_option("--n", gen_n, "Grid size or chain length");
  gen->add_option("--slip", gen_slip, "Slip probability");
  gen->add_option("--continuation", continuation, "fixture_fig1 success probability beyond b4")
      ->capture_default_str();
  gen->add_option("--obstacles", obstacles, "Obstacle cells x,y (replaces the preset layout)");
  gen->add_option("--stations", stations, "Refuel station cells x,y");
  gen->add_option("--target", target, "Target cell x,y");
  gen->add_option("--energy-init", energy_init, "Refuel initial energy");
  gen->add_option("-o,--output", gen_output, "Output path (stdout if absent)");

  auto* fix = app.add_subcommand("fixture", "Write the looping belief MDP fixture model");
  std::string fix_output;
  fix->add_option("--continuation", continuation, "Success probability beyond b4")
      ->capture_default_str();
  fix->add_option("-o,--output", fix_output, "Output path (stdout if absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (solve->parsed()) return do_solve(src, flags, outputs);
    if (sim->parsed()) {
      if (episodes <= 0) throw Error("--episodes must be positive");
      return do_simulate(src, flags, policy_path, episodes, max_steps, sim_output);
    }
    if (gen->parsed()) {
      Pomdp model;
      if (!gen_preset.empty()) {
        model = preset(gen_preset);
      } else if (family == "grid_av") {
        GridAvSpec spec;
        if (gen_n == 4 || gen_n == 10 || gen_n == 20) {
          spec = grid_av_preset(gen_n);
        } else {
          spec.n = gen_n;
          spec.target = {gen_n - 1, gen_n - 1};
        }
        if (gen_slip) spec.slip = *gen_slip;
        if (!obstacles.empty()) spec.obstacles = parse_cells(obstacles);
        if (!target.empty()) spec.target = parse_cell(target);
        model = generate_grid_av(spec);
      } else if (family == "refuel") {
        RefuelSpec spec;
        if (gen_n == 6 || gen_n == 8 || gen_n == 20) {
          spec = refuel_preset(gen_n);
        } else {
          spec.n = gen_n;
          spec.target = {gen_n - 1, gen_n - 1};
        }
        if (gen_slip) spec.slip = *gen_slip;
        if (!obstacles.empty()) spec.obstacles = parse_cells(obstacles);
        if (!stations.empty()) spec.stations = parse_cells(stations);
        if (!target.empty()) spec.target = parse_cell(target);
        if (energy_init >= 0) spec.energy_init = energy_init;
        model = generate_refuel(spec);
      } else if (family == "fixture_fig1") {
        model = fixture_fig1(continuation);
      } else if (family == "chain") {
        model = generate_chain(gen_n > 0 ? gen_n : 3, gen_slip.value_or(0.0));
      } else {
        throw Error("generate needs --family or --preset");
      }
      const auto text = serialize_model(model);
      if (gen_output.empty()) {
        std::cout << text;
      } else {
        write_file(gen_output, text);
      }
      return kExitConverged;
    }
    if (fix->parsed()) {
      const auto text = serialize_model(fixture_fig1(continuation));
      if (fix_output.empty()) {
        std::cout << text;
      } else {
        write_file(fix_output, text);
      }
      return kExitConverged;
    }
  } catch (const SyntaxError& e) {
    std::cerr << "pomdp-reach: syntax error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "pomdp-reach: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  for (const auto& a : args) argv.push_back(a.c_str());
  argv.push_back(nullptr);
  return run(static_cast<int>(args.size()), argv.data());
}

}  // namespace reach::cli
