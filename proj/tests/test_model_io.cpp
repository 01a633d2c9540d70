#include <doctest.h>

#include <string>

#include "reach/bounds.hpp"
#include "reach/errors.hpp"
#include "reach/generators.hpp"
#include "reach/model_io.hpp"

using namespace reach;

namespace {

const char* const kMinimal =
    "# two states, one action\n"
    "states 2\n"
    "actions 1\n"
    "observations 1\n"
    "start: 0:1\n"
    "target: 1\n"
    "T: 0 0 1 1.0\n"
    "T: 0 1 1 1.0\n"
    "Z: 0 0 0 1.0\n"
    "Z: 0 1 0 1.0\n";

int syntax_line(const std::string& text) {
  try {
    parse_model(text);
  } catch (const SyntaxError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("parse_model") {
  SUBCASE("minimal file") {
    const auto p = parse_model(kMinimal);
    CHECK(p.num_states() == 2);
    CHECK(p.num_actions() == 1);
    CHECK(p.num_observations() == 1);
    CHECK(p.initial_belief() == Belief::point(0));
    CHECK(p.is_target(1));
    CHECK_FALSE(p.is_target(0));
    REQUIRE(p.transition(0, 0).size() == 1);
    CHECK(p.transition(0, 0)[0].index == 1);
  }
  SUBCASE("repeated entries accumulate") {
    std::string text = kMinimal;
    text.replace(text.find("T: 0 0 1 1.0"), 12, "T: 0 0 1 0.5\nT: 0 0 1 0.5");
    const auto p = parse_model(text);
    REQUIRE(p.transition(0, 0).size() == 1);
    CHECK(p.transition(0, 0)[0].prob == doctest::Approx(1.0));
  }
  SUBCASE("a row summing to 0.9 fails validation") {
    std::string text = kMinimal;
    text.replace(text.find("T: 0 0 1 1.0"), 12, "T: 0 0 1 0.9");
    CHECK_THROWS_AS(parse_model(text), ValidationError);
  }
  SUBCASE("syntax errors carry line and column") {
    std::string text = kMinimal;
    text.replace(text.find("T: 0 1 1 1.0"), 12, "T: 0 1 x 1.0");
    try {
      parse_model(text);
      FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
      CHECK(e.line() == 8);
      CHECK(e.column() == 8);
    }
    CHECK(syntax_line("states 2\nactions 1\nobservations 1\nbogus 3\n") == 4);
    CHECK(syntax_line("states 2\nT: 0 0 0 1\n") == 2);
    CHECK(syntax_line("states 2\nactions 1\nobservations 1\nT: 0 0 5 1\n") == 4);
    CHECK(syntax_line("states 2\nactions 1\nobservations 1\nT: 0 0 1 1.5\n") == 4);
    CHECK(syntax_line("states 2\nactions 1\nobservations 1\ntarget: 1\n") > 0);
  }
  SUBCASE("round trip") {
    for (const auto& name : preset_names()) {
      if (name == "grid-av-20" || name == "refuel-20") continue;
      CAPTURE(name);
      const auto p = preset(name);
      const auto text = serialize_model(p);
      const auto q = parse_model(text);
      CHECK(q == p);
      CHECK(serialize_model(q) == text);
    }
  }
}

TEST_CASE("grid_av generator") {
  const auto p = generate_grid_av(grid_av_preset(4));
  CHECK(p.num_states() == 17);
  CHECK(p.num_actions() == 4);
  CHECK(p.num_observations() == 3);
  CHECK(p.is_target(15));
  CHECK_NOTHROW(p.validate());

  GridAvSpec s;
  s.n = 3;
  s.slip = 0.0;
  s.obstacles = {{1, 1}};
  s.target = {2, 2};
  const auto g = generate_grid_av(s);
  const ActionId south = 1, east = 2;
  REQUIRE(g.transition(0, east).size() == 1);
  CHECK(g.transition(0, east)[0].index == 1);
  // Into the obstacle goes to the crash state.
  CHECK(g.transition(1, south)[0].index == 9);
  // Off the grid stays.
  CHECK(g.transition(2, east)[0].index == 2);
  // Next to the obstacle after moving to (1, 0).
  CHECK(g.observation(1, east)[0].index == 1);

  s.obstacles = {{2, 2}};
  CHECK_THROWS_AS(generate_grid_av(s), GeometryError);
  s.obstacles = {{3, 0}};
  CHECK_THROWS_AS(generate_grid_av(s), GeometryError);
}

TEST_CASE("refuel generator") {
  SUBCASE("state count") {
    for (int n : {6, 8}) {
      const auto spec = refuel_preset(n);
      const auto p = generate_refuel(spec);
      const int free = n * n - static_cast<int>(spec.obstacles.size()) - 1;
      CHECK(p.num_states() == free * (n - 2) + 2);
      CHECK(p.num_observations() == n - 2 + 2);
      CHECK(p.num_actions() == 4);
      CHECK_NOTHROW(p.validate());
    }
  }
  SUBCASE("stations refill the tank") {
    RefuelSpec s;
    s.n = 4;
    s.slip = 0.0;
    s.stations = {{1, 0}};
    s.target = {3, 3};
    s.energy_init = 1;
    const auto p = generate_refuel(s);
    // Free cells in row-major order; (0,0) is slot 0 and (1,0) slot 1; E = 2.
    const ActionId east = 2;
    const StateId start = 0;  // (0,0) with energy 1
    CHECK(p.initial_belief() == Belief::point(start));
    REQUIRE(p.transition(start, east).size() == 1);
    CHECK(p.transition(start, east)[0].index == 1 * 2 + 1);
    // With energy 1 a move that lands off a station runs dry.
    const ActionId north = 0;
    const StateId dead = p.num_states() - 1;
    CHECK(p.transition(start, north)[0].index == dead);
  }
  SUBCASE("an empty tank cannot reach the goal") {
    RefuelSpec s = refuel_preset(6);
    s.energy_init = 0;
    s.start_region.reset();
    const auto p = augment(generate_refuel(s));
    CHECK(mdp_values(p, 1e-12)[p.initial_belief().entries()[0].state] == 0.0);
    CHECK(init_upper_vmdp(p, 1e-12).value(p.initial_belief()) == 0.0);
  }
  SUBCASE("geometry errors") {
    RefuelSpec s;
    s.n = 2;
    CHECK_THROWS_AS(generate_refuel(s), GeometryError);
    s = refuel_preset(6);
    s.stations.push_back(s.obstacles.front());
    CHECK_THROWS_AS(generate_refuel(s), GeometryError);
  }
}

TEST_CASE("fixture model") {
  const auto p = fixture_fig1(0.6);
  CHECK(p.num_states() == 7);
  CHECK_NOTHROW(p.validate());
  using F = Fig1States;
  const auto& loop = p.transition(F::b1, F::a);
  REQUIRE(loop.size() == 2);
  CHECK(loop[0].index == F::b1);
  CHECK(loop[0].prob == doctest::Approx(0.6));
  CHECK(loop[1].index == F::b2);
  const auto& exit = p.transition(F::left, F::a);
  CHECK(exit[0].index == F::goal);
  CHECK(exit[0].prob == doctest::Approx(0.6));
}

TEST_CASE("generators are deterministic") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    CHECK(serialize_model(preset(name)) == serialize_model(preset(name)));
  }
  CHECK_THROWS_AS(preset("no-such-model"), Error);
}
