#pragma once

// Named verification checks: the twelve acceptance criteria and the
// per-model suites run by `verify-all`.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "symred/builtins.hpp"

namespace symred::verify {

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string note;
};

nlohmann::json to_json(const Check& c);

struct CriterionResult {
  int id = 0;
  std::string key;
  std::string title;
  double runtime_limit = 0.0;  // seconds
  double seconds = 0.0;
  bool pass = false;
  std::vector<Check> checks;
  std::string error;  // set when the criterion threw
};

/// Deterministic part only (no timing).
nlohmann::json to_json(const CriterionResult& r);

struct CriterionInfo {
  int id;
  const char* key;
  const char* title;
  double runtime_limit;
};

const std::vector<CriterionInfo>& criteria();
/// By id (1..12) or key, e.g. "adapted_j"; throws ConfigError otherwise.
const CriterionInfo& find_criterion(const std::string& id_or_key);

/// Runs one criterion; pass requires every check and the runtime limit.
CriterionResult run_criterion(int id, std::uint64_t seed);
std::vector<CriterionResult> run_acceptance(std::uint64_t seed);

/// Per-model suite: generators, structure identities, strata, local models,
/// per-stratum reduction and flow diagnostics, as applicable.
std::vector<Check> verify_model(const Model& m, std::uint64_t seed, double tolerance_scale = 1.0);

/// Suites of every builtin: {"models": {name: {"checks": [...], "pass": b}}, "pass": b}.
nlohmann::json verify_all(std::uint64_t seed, double tolerance_scale = 1.0);

/// Copy of a report without its "timestamp" member, dumped with indent 2.
std::string canonical_report(const nlohmann::json& report);

}  // namespace symred::verify
