#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "reach/cli.hpp"
#include "reach/errors.hpp"
#include "reach/generators.hpp"

using namespace reach;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "pomdp-reach");
  return cli::run(args);
}

}  // namespace

TEST_CASE("parse_duration") {
  CHECK(cli::parse_duration("900") == 900.0);
  CHECK(cli::parse_duration("5s") == 5.0);
  CHECK(cli::parse_duration("250ms") == doctest::Approx(0.25));
  CHECK(cli::parse_duration("2m") == 120.0);
  CHECK(cli::parse_duration("2h") == 7200.0);
  CHECK(cli::parse_duration("1.5s") == 1.5);
  CHECK_THROWS_AS(cli::parse_duration("fast"), Error);
  CHECK_THROWS_AS(cli::parse_duration("5 parsecs"), Error);
  CHECK_THROWS_AS(cli::parse_duration("-1s"), Error);
  CHECK_THROWS_AS(cli::parse_duration("0"), Error);
}

TEST_CASE("solve a preset to convergence") {
  CHECK(run({"solve", "--preset", "grid-av-4", "--epsilon", "0.001", "--result",
             "cli_grid.json"}) == cli::kExitConverged);
  const auto j = nlohmann::json::parse(slurp("cli_grid.json"));
  CHECK(j["converged"] == true);
  CHECK(j["upper"].get<double>() - j["lower"].get<double>() <= 1e-3);
}

TEST_CASE("the discounted baseline stalls on the fixture") {
  CHECK(run({"solve", "--preset", "fixture-fig1", "--heuristic", "hsvi2", "--gamma", "1",
             "--budget", "5s", "--graph-dump", "cli_fixture.txt"}) == cli::kExitAnytime);
  const auto dump = slurp("cli_fixture.txt");
  REQUIRE_FALSE(dump.empty());
  const auto b4 = Belief::from_entries({{Fig1States::left, 0.5}, {Fig1States::right, 0.5}});
  const auto line_at = dump.find("belief=" + b4.to_string() + "\n");
  if (line_at != std::string::npos) {
    const auto start = dump.rfind("node ", line_at);
    CHECK(dump.substr(start, line_at - start).find("frontier=1") != std::string::npos);
  }
}

TEST_CASE("generated files solve like the preset") {
  CHECK(run({"generate", "--family", "refuel", "--n", "6", "-o", "cli_refuel6.txt"}) ==
        cli::kExitConverged);
  CHECK(run({"generate", "--preset", "refuel-6", "-o", "cli_refuel6_preset.txt"}) ==
        cli::kExitConverged);
  CHECK(slurp("cli_refuel6.txt") == slurp("cli_refuel6_preset.txt"));

  for (const char* path : {"cli_refuel6.txt", "cli_refuel6_preset.txt"}) {
    CAPTURE(path);
    CHECK(run({"solve", path, "--max-trials", "40", "--seed", "3", "--trace-clock", "logical",
               "--trace", std::string(path) + ".csv"}) == cli::kExitAnytime);
  }
  CHECK(slurp("cli_refuel6.txt.csv") == slurp("cli_refuel6_preset.txt.csv"));
}

TEST_CASE("fixture subcommand writes a loadable model") {
  CHECK(run({"fixture", "--continuation", "0.6", "-o", "cli_fig1.txt"}) == cli::kExitConverged);
  CHECK(run({"solve", "cli_fig1.txt", "--result", "cli_fig1.json"}) == cli::kExitConverged);
  const auto j = nlohmann::json::parse(slurp("cli_fig1.json"));
  CHECK(j["lower"].get<double>() <= 0.3 + 1e-9);
  CHECK(j["upper"].get<double>() >= 0.3 - 1e-9);
}

TEST_CASE("simulate") {
  CHECK(run({"solve", "--preset", "chain-3", "--result", "cli_chain.json"}) ==
        cli::kExitConverged);
  CHECK(run({"simulate", "--preset", "chain-3", "--policy", "cli_chain.json", "--episodes",
             "1000", "-o", "cli_chain_sim.json"}) == cli::kExitConverged);
  const auto j = nlohmann::json::parse(slurp("cli_chain_sim.json"));
  CHECK(j["estimate"] == 1.0);
  CHECK(run({"simulate", "--preset", "fixture-fig1", "--episodes", "2000"}) ==
        cli::kExitConverged);
}

TEST_CASE("usage and input errors exit 1") {
  CHECK(run({"solve", "--preset", "grid-av-4", "--no-such-flag"}) == cli::kExitError);
  CHECK(run({}) == cli::kExitError);
  CHECK(run({"solve"}) == cli::kExitError);
  CHECK(run({"solve", "--preset", "nonexistent"}) == cli::kExitError);
  CHECK(run({"solve", "missing_model_file.txt"}) == cli::kExitError);
  CHECK(run({"solve", "--preset", "chain-3", "--budget", "soon"}) == cli::kExitError);
  CHECK(run({"solve", "--preset", "chain-3", "--xi", "2"}) == cli::kExitError);

  {
    std::ofstream bad("cli_bad.txt");
    bad << "states 2\nactions 1\nobservations 1\nT: 0 0 7 1\n";
  }
  CHECK(run({"solve", "cli_bad.txt"}) == cli::kExitError);
}
