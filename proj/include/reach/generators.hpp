#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reach/pomdp.hpp"

namespace reach {

struct Cell {
  int x;
  int y;

  bool operator==(const Cell&) const = default;
};

// Inclusive rectangle of cells.
struct Region {
  Cell lo;
  Cell hi;
};

/// Grid with obstacles. States are the N*N cells (index y*N + x) plus a
/// crash state (index N*N). Actions: north (y-1), south (y+1), east (x+1),
/// west (x-1). A move succeeds with probability 1 - slip and otherwise
/// leaves the agent in place; moving off the grid also stays. Entering an obstacle cell goes to
/// the absorbing crash state. Observations of the post-move state: 0 neutral,
/// 1 next to an obstacle (4-neighbourhood), 2 target.
struct GridAvSpec {
  int n = 4;
  double slip = 0.1;
  std::vector<Cell> obstacles;
  Cell target{3, 3};
  std::optional<Region> init_region;  // default: whole grid
};

/// Grid navigation with limited fuel. States are (cell, energy) for every
/// non-obstacle, non-target cell and energy 1..E (E = N - 2), then `goal`
/// and `dead`. Each move costs one unit; with probability slip the agent
/// moves to one of the two perpendicular neighbours instead (split evenly);
/// moving off the grid stays in place but still costs energy. Arriving at a
/// station refills energy to E. Entering an obstacle, or reaching energy 0
/// off a station, leads to `dead`. Observations: the energy level after the
/// move (E of them), then goal, then dead.
struct RefuelSpec {
  int n = 6;
  std::optional<int> energy_init;  // default E
  double slip = 0.1;
  std::vector<Cell> stations;
  std::vector<Cell> obstacles;
  Cell start{0, 0};
  Cell target{5, 5};
  // Uniform start over the region's free cells; replaces `start` when set.
  std::optional<Region> start_region;
};

Pomdp generate_grid_av(const GridAvSpec& spec);
Pomdp generate_refuel(const RefuelSpec& spec);

/// Deterministic chain 0 -> 1 -> ... -> n with one action (move forward,
/// staying put with probability `slip`) and a single observation. Target n.
Pomdp generate_chain(int n, double slip = 0.0);

/// The looping belief MDP used to show where discounted heuristics stall:
///   b1 --a--> b1 (0.6) | b2 (0.4);  b2 --a--> b3, --b--> b1, --c--> b2;
///   b3 --a--> b3, --b--> b4 = {L: 0.5, R: 0.5}.
/// At b4 action a reaches the goal from L with probability `continuation`
/// (b mirrors it for R), so V(b4) = 0.5 * continuation. Unlisted actions
/// are self-loops. States: b1, b2, b3, L, R, goal, fail.
Pomdp fixture_fig1(double continuation = 1.0);

/// Explicit graph view of fixture_fig1: the states of b1..b3 and b4's
/// support.
struct Fig1States {
  static constexpr StateId b1 = 0, b2 = 1, b3 = 2, left = 3, right = 4, goal = 5, fail = 6;
  static constexpr ActionId a = 0, b = 1, c = 2;
};

/// Named presets: grid-av-4, grid-av-10, grid-av-20, refuel-6, refuel-8,
/// refuel-20, fixture-fig1, chain-3. Throws Error for unknown names.
Pomdp preset(std::string_view name);
std::vector<std::string> preset_names();

GridAvSpec grid_av_preset(int n);
RefuelSpec refuel_preset(int n);

}  // namespace reach
