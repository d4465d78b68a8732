#pragma once

// JSON model configuration: space, group, Hamiltonian, task list, seed.
//
//   {"builtin": "klein_r4"}                          a bundled model, or
//   {"space": {"dim": 4, "omega": [[...]]},          omega optional (standard)
//    "group": {"type": "finite", "generators": [[["-1","0"],["0","-1"]]]}
//           | {"type": "torus", "weights": [[1, -1]]}
//           | {"type": "lie_algebra", "basis": [...], "structure_constants": [...]},
//    "hamiltonian": "q1^2 + p1^2" | "builtin:central_force"}
//   plus "tasks", "seed", "tolerances": {"scale": s}, "output_dir".
//
// Matrix entries are integers or rational strings such as "-1/2".

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "symred/builtins.hpp"

namespace symred {

struct TaskConfig {
  std::string type;  // invariants | strata | simulate | verify | slice
  std::string name;  // unique label, used in file names
  nlohmann::json params;
};

struct ModelConfig {
  Model model;
  std::vector<TaskConfig> tasks;
  std::optional<std::uint64_t> seed;
  double tolerance_scale = 1.0;
  std::string output_dir = "symred_out";
  nlohmann::json echo;  // model section as given
};

/// Throws ConfigError on schema or consistency violations.
ModelConfig parse_config(const nlohmann::json& j);
ModelConfig load_config(const std::string& path);

/// Config running a bundled model with the default task list.
nlohmann::json builtin_config(const std::string& name);

QMatrix matrix_from_json(const nlohmann::json& j, std::size_t rows, std::size_t cols);

}  // namespace symred
