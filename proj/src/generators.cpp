#include "reach/generators.hpp"

#include <algorithm>

#include "reach/errors.hpp"

namespace reach {
namespace {

constexpr int kDx[4] = {0, 0, 1, -1};
constexpr int kDy[4] = {-1, 1, 0, 0};
const char* const kMoveNames[4] = {"north", "south", "east", "west"};

bool inside(const Cell& c, int n) { return c.x >= 0 && c.y >= 0 && c.x < n && c.y < n; }

bool contains(const std::vector<Cell>& cells, const Cell& c) {
  return std::find(cells.begin(), cells.end(), c) != cells.end();
}

void check_cells(const std::vector<Cell>& cells, int n, const char* what) {
  for (const auto& c : cells) {
    if (!inside(c, n)) {
      throw GeometryError(std::string(what) + " (" + std::to_string(c.x) + "," +
                          std::to_string(c.y) + ") is outside the grid");
    }
  }
}

std::string cell_label(const Cell& c) {
  return "c" + std::to_string(c.x) + "_" + std::to_string(c.y);
}

// Destination of a move; leaving the grid keeps the agent in place.
Cell step(const Cell& c, int dir, int n) {
  Cell next{c.x + kDx[dir], c.y + kDy[dir]};
  return inside(next, n) ? next : c;
}

}  // namespace

Pomdp generate_grid_av(const GridAvSpec& spec) {
  const int n = spec.n;
  if (n < 2) throw GeometryError("grid size must be at least 2");
  if (!(spec.slip >= 0.0 && spec.slip <= 1.0)) throw GeometryError("slip must lie in [0, 1]");
  check_cells(spec.obstacles, n, "obstacle");
  check_cells({spec.target}, n, "target");
  if (contains(spec.obstacles, spec.target)) throw GeometryError("target is an obstacle");

  const int cells = n * n;
  const StateId crash = cells;
  auto index = [n](const Cell& c) { return c.y * n + c.x; };
  Pomdp p(cells + 1, 4, 3);

  auto near_obstacle = [&](const Cell& c) {
    for (int d = 0; d < 4; ++d) {
      const Cell nb{c.x + kDx[d], c.y + kDy[d]};
      if (inside(nb, n) && contains(spec.obstacles, nb)) return true;
    }
    return false;
  };
  auto observe = [&](StateId s) {
    if (s == crash) return 0;
    const Cell c{s % n, s / n};
    if (c == spec.target) return 2;
    return near_obstacle(c) ? 1 : 0;
  };

  for (ActionId a = 0; a < 4; ++a) {
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const Cell c{x, y};
        const StateId s = index(c);
        if (c == spec.target || contains(spec.obstacles, c)) {
          p.add_transition(s, a, s, 1.0);
          continue;
        }
        const Cell next = step(c, a, n);
        const StateId dest = contains(spec.obstacles, next) ? crash : index(next);
        p.add_transition(s, a, dest, 1.0 - spec.slip);
        p.add_transition(s, a, s, spec.slip);
      }
    }
    p.add_transition(crash, a, crash, 1.0);
    for (StateId s = 0; s <= crash; ++s) p.add_observation(s, a, observe(s), 1.0);
  }

  const Region region = spec.init_region.value_or(Region{{0, 0}, {n - 1, n - 1}});
  check_cells({region.lo, region.hi}, n, "initial region corner");
  std::vector<Belief::Entry> init;
  for (int y = region.lo.y; y <= region.hi.y; ++y) {
    for (int x = region.lo.x; x <= region.hi.x; ++x) {
      const Cell c{x, y};
      if (c == spec.target || contains(spec.obstacles, c)) continue;
      init.push_back({index(c), 1.0});
    }
  }
  if (init.empty()) throw GeometryError("initial region has no free cell");
  p.set_initial_belief(Belief::from_entries(std::move(init)));
  p.set_targets({index(spec.target)});

  for (int s = 0; s < cells; ++s) p.state_labels.push_back(cell_label({s % n, s / n}));
  p.state_labels.push_back("crash");
  p.action_labels.assign(kMoveNames, kMoveNames + 4);
  p.observation_labels = {"neutral", "near_obstacle", "target"};
  p.validate();
  return p;
}

Pomdp generate_refuel(const RefuelSpec& spec) {
  const int n = spec.n;
  if (n < 3) throw GeometryError("refuel grid size must be at least 3");
  if (!(spec.slip >= 0.0 && spec.slip <= 1.0)) throw GeometryError("slip must lie in [0, 1]");
  const int full = n - 2;
  const int energy0 = spec.energy_init.value_or(full);
  if (energy0 < 0 || energy0 > full) throw GeometryError("initial energy out of range");
  check_cells(spec.stations, n, "station");
  check_cells(spec.obstacles, n, "obstacle");
  check_cells({spec.start, spec.target}, n, "start/target");
  for (const auto& c : spec.stations) {
    if (contains(spec.obstacles, c)) throw GeometryError("station is an obstacle");
  }
  if (contains(spec.obstacles, spec.target)) throw GeometryError("target is an obstacle");
  if (contains(spec.obstacles, spec.start)) throw GeometryError("start is an obstacle");

  // Index free cells.
  std::vector<int> cell_slot(n * n, -1);
  std::vector<Cell> free_cells;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const Cell c{x, y};
      if (contains(spec.obstacles, c) || c == spec.target) continue;
      cell_slot[y * n + x] = static_cast<int>(free_cells.size());
      free_cells.push_back(c);
    }
  }
  const int grid_states = static_cast<int>(free_cells.size()) * full;
  const StateId goal = grid_states;
  const StateId dead = grid_states + 1;
  auto state = [&](const Cell& c, int energy) {
    return cell_slot[c.y * n + c.x] * full + (energy - 1);
  };
  const ObservationId obs_goal = full;
  const ObservationId obs_dead = full + 1;

  Pomdp p(grid_states + 2, 4, full + 2);
  auto observe = [&](StateId s) -> ObservationId {
    if (s == goal) return obs_goal;
    if (s == dead) return obs_dead;
    return s % full;  // energy - 1
  };
  auto land = [&](const Cell& c, int energy) -> StateId {
    if (contains(spec.obstacles, c)) return dead;
    if (c == spec.target) return goal;
    if (contains(spec.stations, c)) return state(c, full);
    if (energy - 1 <= 0) return dead;
    return state(c, energy - 1);
  };

  for (ActionId a = 0; a < 4; ++a) {
    for (const auto& c : free_cells) {
      for (int e = 1; e <= full; ++e) {
        const StateId s = state(c, e);
        // Perpendicular directions: north/south <-> east/west.
        const int side1 = a < 2 ? 2 : 0;
        const int side2 = a < 2 ? 3 : 1;
        p.add_transition(s, a, land(step(c, a, n), e), 1.0 - spec.slip);
        p.add_transition(s, a, land(step(c, side1, n), e), spec.slip / 2);
        p.add_transition(s, a, land(step(c, side2, n), e), spec.slip / 2);
      }
    }
    p.add_transition(goal, a, goal, 1.0);
    p.add_transition(dead, a, dead, 1.0);
    for (StateId s = 0; s < p.num_states(); ++s) p.add_observation(s, a, observe(s), 1.0);
  }

  auto start_state = [&](const Cell& c) -> StateId {
    if (c == spec.target) return goal;
    if (contains(spec.stations, c)) return state(c, full);
    if (energy0 == 0) return dead;
    return state(c, energy0);
  };
  if (spec.start_region) {
    const Region& region = *spec.start_region;
    check_cells({region.lo, region.hi}, n, "start region corner");
    std::vector<Belief::Entry> init;
    for (int y = region.lo.y; y <= region.hi.y; ++y) {
      for (int x = region.lo.x; x <= region.hi.x; ++x) {
        const Cell c{x, y};
        if (!contains(spec.obstacles, c)) init.push_back({start_state(c), 1.0});
      }
    }
    if (init.empty()) throw GeometryError("start region has no free cell");
    p.set_initial_belief(Belief::from_entries(std::move(init)));
  } else {
    p.set_initial_belief(Belief::point(start_state(spec.start)));
  }
  p.set_targets({goal});

  for (const auto& c : free_cells) {
    for (int e = 1; e <= full; ++e) p.state_labels.push_back(cell_label(c) + "_e" + std::to_string(e));
  }
  p.state_labels.push_back("goal");
  p.state_labels.push_back("dead");
  p.action_labels.assign(kMoveNames, kMoveNames + 4);
  for (int e = 1; e <= full; ++e) p.observation_labels.push_back("energy" + std::to_string(e));
  p.observation_labels.push_back("goal");
  p.observation_labels.push_back("dead");
  p.validate();
  return p;
}

Pomdp generate_chain(int n, double slip) {
  if (n < 1) throw GeometryError("chain length must be at least 1");
  if (!(slip >= 0.0 && slip < 1.0)) throw GeometryError("slip must lie in [0, 1)");
  Pomdp p(n + 1, 1, 1);
  for (StateId s = 0; s < n; ++s) {
    p.add_transition(s, 0, s + 1, 1.0 - slip);
    p.add_transition(s, 0, s, slip);
  }
  p.add_transition(n, 0, n, 1.0);
  for (StateId s = 0; s <= n; ++s) {
    p.add_observation(s, 0, 0, 1.0);
    p.state_labels.push_back("s" + std::to_string(s));
  }
  p.action_labels = {"forward"};
  p.observation_labels = {"none"};
  p.set_initial_belief(Belief::point(0));
  p.set_targets({n});
  p.validate();
  return p;
}

Pomdp fixture_fig1(double continuation) {
  if (!(continuation >= 0.0 && continuation <= 1.0)) {
    throw GeometryError("continuation must lie in [0, 1]");
  }
  using F = Fig1States;
  Pomdp p(7, 3, 5);
  auto set = [&](StateId s, ActionId a, SparseDistribution d) { p.set_transition(s, a, std::move(d)); };
  set(F::b1, F::a, {{F::b1, 0.6}, {F::b2, 0.4}});
  set(F::b1, F::b, {{F::b1, 1.0}});
  set(F::b1, F::c, {{F::b1, 1.0}});
  set(F::b2, F::a, {{F::b3, 1.0}});
  set(F::b2, F::b, {{F::b1, 1.0}});
  set(F::b2, F::c, {{F::b2, 1.0}});
  set(F::b3, F::a, {{F::b3, 1.0}});
  set(F::b3, F::b, {{F::left, 0.5}, {F::right, 0.5}});
  set(F::b3, F::c, {{F::b3, 1.0}});
  for (ActionId a = 0; a < 3; ++a) {
    set(F::goal, a, {{F::goal, 1.0}});
    set(F::fail, a, {{F::fail, 1.0}});
  }
  for (auto [side, good] : {std::pair{F::left, F::a}, std::pair{F::right, F::b}}) {
    const ActionId bad = good == F::a ? F::b : F::a;
    if (continuation >= 1.0) {
      set(side, good, {{F::goal, 1.0}});
    } else if (continuation <= 0.0) {
      set(side, good, {{F::fail, 1.0}});
    } else {
      set(side, good, {{F::goal, continuation}, {F::fail, 1.0 - continuation}});
    }
    set(side, bad, {{F::fail, 1.0}});
    set(side, F::c, {{side, 1.0}});
  }
  // o1 on b1 and b3, o2 on b2, o3 on b4's support, o4 goal, o5 fail.
  const ObservationId obs[7] = {0, 1, 0, 2, 2, 3, 4};
  for (ActionId a = 0; a < 3; ++a) {
    for (StateId s = 0; s < 7; ++s) p.set_observation(s, a, {{obs[s], 1.0}});
  }
  p.set_initial_belief(Belief::point(F::b1));
  p.set_targets({F::goal});
  p.state_labels = {"b1", "b2", "b3", "L", "R", "goal", "fail"};
  p.action_labels = {"a", "b", "c"};
  p.observation_labels = {"o1", "o2", "o3", "o4", "o5"};
  p.validate();
  return p;
}

GridAvSpec grid_av_preset(int n) {
  GridAvSpec s;
  switch (n) {
    case 4:
      s.n = 4;
      s.slip = 0.1;
      s.obstacles = {{1, 2}};
      s.target = {3, 3};
      break;
    case 10:
      s.n = 10;
      s.slip = 0.3;
      s.obstacles = {{3, 3}, {6, 2}, {2, 7}};
      s.target = {9, 9};
      s.init_region = Region{{0, 0}, {4, 4}};
      break;
    case 20:
      s.n = 20;
      s.slip = 0.5;
      s.obstacles = {{4, 4}, {12, 3}, {7, 11}, {15, 14}, {3, 16}};
      s.target = {19, 19};
      s.init_region = Region{{0, 0}, {4, 4}};
      break;
    default:
      throw Error("no grid-av preset for N=" + std::to_string(n));
  }
  return s;
}

RefuelSpec refuel_preset(int n) {
  RefuelSpec s;
  s.n = n;
  s.start = {0, 0};
  s.target = {n - 1, n - 1};
  switch (n) {
    case 6:
      s.slip = 0.1;
      s.stations = {{2, 1}, {2, 3}, {4, 4}};
      s.obstacles = {{3, 2}, {1, 5}};
      break;
    case 8:
      s.slip = 0.1;
      s.stations = {{3, 2}, {5, 5}, {2, 6}};
      s.obstacles = {{4, 1}, {1, 4}, {6, 3}};
      break;
    case 20:
      s.slip = 0.1;
      s.stations = {{6, 5}, {12, 11}, {5, 14}, {17, 17}, {14, 4}};
      s.obstacles = {{8, 2}, {3, 9}, {10, 15}, {16, 9}, {9, 9}};
      break;
    default:
      throw Error("no refuel preset for N=" + std::to_string(n));
  }
  s.start_region = Region{{0, 0}, {0, n / 2}};
  return s;
}

Pomdp preset(std::string_view name) {
  if (name == "grid-av-4") return generate_grid_av(grid_av_preset(4));
  if (name == "grid-av-10") return generate_grid_av(grid_av_preset(10));
  if (name == "grid-av-20") return generate_grid_av(grid_av_preset(20));
  if (name == "refuel-6") return generate_refuel(refuel_preset(6));
  if (name == "refuel-8") return generate_refuel(refuel_preset(8));
  if (name == "refuel-20") return generate_refuel(refuel_preset(20));
  if (name == "fixture-fig1") return fixture_fig1();
  if (name == "chain-3") return generate_chain(3);
  throw Error("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  return {"grid-av-4", "grid-av-10", "grid-av-20", "refuel-6",
          "refuel-8",  "refuel-20",  "fixture-fig1", "chain-3"};
}

}  // namespace reach
