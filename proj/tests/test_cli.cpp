#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "symred/app.hpp"
#include "symred/errors.hpp"

using namespace symred;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("symred_test_" + name);
  fs::remove_all(p);
  return p;
}

app::RunResult run_json(const std::string& text, const fs::path& dir) {
  std::ostringstream log;
  app::RunOptions opts;
  opts.output_dir = dir.string();
  return app::run(nlohmann::json::parse(text), opts, log);
}

}  // namespace

TEST_CASE("odd dimension is a configuration error") {
  auto dir = scratch("odd");
  auto r = run_json(R"({"space": {"dim": 3}, "group": {"type": "torus", "weights": [[1]]}})", dir);
  CHECK(r.exit_code == app::kConfigError);
}

TEST_CASE("schema errors") {
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"builtin": "nope"})")), ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"builtin": "z2_cone", "tasks": ["dance"]})")), ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"space": {"dim": 2}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(
                      R"({"space": {"dim": 4}, "group": {"type": "torus", "weights": [[1, -1, 2]]}})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"builtin": "z2_cone", "seed": -4})")), ConfigError);
  auto r = run_json(R"({"builtin": "z2_cone", "tasks": ["strata"]})", scratch("noseed"));
  CHECK(r.exit_code == app::kConfigError);
}

TEST_CASE("empty task list echoes the model") {
  auto dir = scratch("empty");
  auto r = run_json(R"({"builtin": "z2_cone", "tasks": []})", dir);
  CHECK(r.exit_code == app::kOk);
  CHECK(r.report["tasks"].empty());
  CHECK(r.report["model"]["builtin"] == "z2_cone");
  CHECK(fs::exists(dir / "report.json"));
}

TEST_CASE("z2 cone end to end") {
  auto dir = scratch("z2");
  auto r = run_json(R"({"builtin": "z2_cone", "seed": 1, "tasks": ["invariants", "strata", "verify"]})", dir);
  CHECK(r.exit_code == app::kOk);
  const auto& tasks = r.report["tasks"];
  REQUIRE(tasks.size() == 3);
  const auto& inv = tasks[0]["result"];
  CHECK(inv["generators"].size() == 3);
  CHECK(inv["poisson_structure"] == nlohmann::json::parse(
                                        R"([["0", "2*y1", "4*y2"], ["-2*y1", "0", "2*y3"], ["-4*y2", "-2*y3", "0"]])"));
  CHECK(tasks[1]["result"]["strata"].size() == 2);
  CHECK(tasks[2]["result"]["pass"] == true);
  CHECK(r.report["verification"]["pass"] == true);
}

TEST_CASE("custom model with simulation output") {
  auto dir = scratch("custom");
  auto r = run_json(R"({
    "space": {"dim": 4},
    "group": {"type": "torus", "weights": [[1, -1]]},
    "hamiltonian": "q1^2 + p1^2 + 2*q2^2 + 2*p2^2",
    "seed": 3,
    "tasks": [{"type": "simulate", "name": "run", "T": 1, "initial_state": [0.3, 0.5, "7/10", -0.2]},
              {"type": "slice", "point": [0.5, 0.5, 0, 0], "samples": 200}]
  })", dir);
  CHECK(r.exit_code == app::kOk);
  CHECK(fs::exists(dir / "trajectory_run.csv"));
  CHECK(fs::exists(dir / "trajectory_run_reduced.csv"));
  const auto& sim = r.report["tasks"][0]["result"];
  CHECK(sim["noether_drift"]["value"].get<double>() <= sim["noether_drift"]["tolerance"].get<double>());
  CHECK(r.report["tasks"][1]["result"]["local_model"]["match"] == true);
  CHECK(r.report["tasks"][1]["result"]["level_set"]["counterexamples"] == 0);
}

TEST_CASE("criteria run as named verify tasks") {
  auto dir = scratch("criteria");
  auto r = run_json(R"({"builtin": "circle_1_-1", "seed": 1,
                        "tasks": [{"type": "verify", "suite": false, "criteria": ["norm_squared", 3]}]})",
                    dir);
  CHECK(r.exit_code == app::kOk);
  CHECK(r.report["tasks"][0]["result"]["criteria"].size() == 2);
}

TEST_CASE("a failing verification exits with 1") {
  auto dir = scratch("strict");
  app::RunOptions opts;
  opts.output_dir = dir.string();
  opts.tolerance_scale = 1e-30;
  std::ostringstream log;
  auto r = app::run(nlohmann::json::parse(R"({"builtin": "klein_r4", "seed": 1, "tasks": ["verify"]})"), opts, log);
  CHECK(r.exit_code == app::kVerificationFailed);
  CHECK_FALSE(r.report["verification"]["failures"].empty());
}

TEST_CASE("report is deterministic apart from the timestamp") {
  auto a = run_json(R"({"builtin": "klein_r4", "seed": 2, "tasks": ["invariants", "strata", "simulate"]})", scratch("da"));
  auto b = run_json(R"({"builtin": "klein_r4", "seed": 2, "tasks": ["invariants", "strata", "simulate"]})", scratch("db"));
  auto strip = [](nlohmann::json j) {
    j.erase("timestamp");
    return j.dump();
  };
  CHECK(strip(a.report) == strip(b.report));
}
