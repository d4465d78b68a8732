#include "symred/config.hpp"

#include <fstream>
#include <set>

#include "symred/errors.hpp"

namespace symred {

namespace {

const std::set<std::string> kTaskTypes{"invariants", "strata", "simulate", "verify", "slice"};

Rational rational_entry(const nlohmann::json& e) {
  if (e.is_number_integer()) return Rational(e.get<long>());
  if (e.is_string()) return parse_rational(e.get<std::string>());
  if (e.is_number_float()) return rational_from_double(e.get<double>());
  throw ConfigError("matrix entries must be integers or rational strings");
}

mpz_class integer_entry(const nlohmann::json& e) {
  if (e.is_number_integer()) return mpz_class(std::to_string(e.get<long>()));
  if (e.is_string()) {
    try {
      return mpz_class(e.get<std::string>());
    } catch (const std::invalid_argument&) {
    }
  }
  throw ConfigError("torus weights must be integers");
}

symplin::SymplecticSpace parse_space(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim")) throw ConfigError("space needs a dim");
  if (!j["dim"].is_number_integer() || j["dim"].get<long>() <= 0) throw ConfigError("space dim must be a positive integer");
  const auto dim = static_cast<std::size_t>(j["dim"].get<long>());
  if (dim % 2 != 0) throw ConfigError("space dim must be even, got " + std::to_string(dim));
  if (!j.contains("omega")) return symplin::SymplecticSpace::standard(dim / 2);
  try {
    return symplin::SymplecticSpace::from_exact(matrix_from_json(j["omega"], dim, dim));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid omega: ") + e.what());
  }
}

groups::GroupSpec parse_group(const nlohmann::json& j, std::size_t dim) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) throw ConfigError("group needs a type");
  const auto type = j["type"].get<std::string>();
  if (type == "finite") {
    if (!j.contains("generators") || !j["generators"].is_array()) throw ConfigError("finite group needs generators");
    groups::FiniteMatrixGroup g;
    for (const auto& m : j["generators"]) g.generators.push_back(matrix_from_json(m, dim, dim));
    if (j.contains("order_bound")) g.order_bound = j["order_bound"].get<std::size_t>();
    return g;
  }
  if (type == "torus") {
    if (!j.contains("weights") || !j["weights"].is_array()) throw ConfigError("torus needs weights");
    groups::Torus t;
    for (const auto& row : j["weights"]) {
      if (!row.is_array() || row.size() != dim / 2)
        throw ConfigError("each torus weight row needs " + std::to_string(dim / 2) + " entries");
      IntVector r;
      for (const auto& e : row) r.push_back(integer_entry(e));
      t.weights.push_back(r);
    }
    return t;
  }
  if (type == "lie_algebra") {
    if (!j.contains("basis") || !j["basis"].is_array()) throw ConfigError("lie_algebra needs a basis");
    groups::MatrixLieAlgebra a;
    for (const auto& m : j["basis"]) a.basis.push_back(matrix_from_json(m, dim, dim));
    if (j.contains("structure_constants")) {
      const std::size_t k = a.basis.size();
      const auto& c = j["structure_constants"];
      if (!c.is_array() || c.size() != k * k * k)
        throw ConfigError("structure_constants needs k^3 = " + std::to_string(k * k * k) + " entries");
      for (const auto& e : c) a.structure.push_back(rational_entry(e));
    }
    return a;
  }
  throw ConfigError("unknown group type '" + type + "'");
}

}  // namespace

QMatrix matrix_from_json(const nlohmann::json& j, std::size_t rows, std::size_t cols) {
  if (!j.is_array() || j.size() != rows) throw ConfigError("expected a " + std::to_string(rows) + "-row matrix");
  QMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ConfigError("expected " + std::to_string(cols) + " entries in matrix row " + std::to_string(r + 1));
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rational_entry(j[r][c]);
  }
  return m;
}

ModelConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  ModelConfig cfg{builtin_model("z2_cone"), {}, std::nullopt, 1.0, "symred_out", nlohmann::json::object()};
  bool have_model = false;
  if (j.contains("builtin")) {
    if (!j["builtin"].is_string()) throw ConfigError("builtin must be a name");
    cfg.model = builtin_model(j["builtin"].get<std::string>());
    cfg.echo["builtin"] = j["builtin"];
    have_model = true;
  }
  if (j.contains("space") || j.contains("group")) {
    if (!j.contains("space") || !j.contains("group")) throw ConfigError("space and group must be given together");
    cfg.model.space = parse_space(j["space"]);
    cfg.model.group = parse_group(j["group"], cfg.model.space.dim());
    cfg.model.name = j.value("name", std::string("custom"));
    cfg.model.hamiltonian.reset();
    cfg.model.hamiltonian_builtin.clear();
    cfg.echo["space"] = j["space"];
    cfg.echo["group"] = j["group"];
    have_model = true;
  }
  if (!have_model) throw ConfigError("configuration needs a builtin or a space and group");
  if (j.contains("hamiltonian")) {
    if (!j["hamiltonian"].is_string()) throw ConfigError("hamiltonian must be polynomial text or builtin:<name>");
    const auto text = j["hamiltonian"].get<std::string>();
    cfg.echo["hamiltonian"] = text;
    if (text.rfind("builtin:", 0) == 0) {
      cfg.model.hamiltonian.reset();
      cfg.model.hamiltonian_builtin = text.substr(8);
      if (cfg.model.hamiltonian_builtin != "central_force")
        throw ConfigError("unknown builtin Hamiltonian '" + cfg.model.hamiltonian_builtin + "'");
    } else {
      cfg.model.hamiltonian = parse_poly(text, phase_space_names(cfg.model.space.dim() / 2));
      cfg.model.hamiltonian_builtin.clear();
    }
  } else if (cfg.model.hamiltonian) {
    cfg.echo["hamiltonian"] = to_string(*cfg.model.hamiltonian, phase_space_names(cfg.model.space.dim() / 2));
  }
  cfg.echo["name"] = cfg.model.name;
  cfg.echo["dim"] = cfg.model.space.dim();

  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0) throw ConfigError("seed must be a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (!t.is_object()) throw ConfigError("tolerances must be an object");
    if (t.contains("scale")) {
      if (!t["scale"].is_number() || t["scale"].get<double>() <= 0) throw ConfigError("tolerance scale must be positive");
      cfg.tolerance_scale = t["scale"].get<double>();
    }
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw ConfigError("output_dir must be a string");
    cfg.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("tasks")) {
    if (!j["tasks"].is_array()) throw ConfigError("tasks must be a list");
    std::set<std::string> names;
    for (std::size_t i = 0; i < j["tasks"].size(); ++i) {
      const auto& t = j["tasks"][i];
      TaskConfig task;
      if (t.is_string()) {
        task.type = t.get<std::string>();
        task.params = nlohmann::json::object();
      } else if (t.is_object() && t.contains("type") && t["type"].is_string()) {
        task.type = t["type"].get<std::string>();
        task.params = t;
      } else {
        throw ConfigError("task " + std::to_string(i + 1) + " needs a type");
      }
      if (!kTaskTypes.count(task.type)) throw ConfigError("unknown task type '" + task.type + "'");
      task.name = task.params.value("name", task.type);
      if (!names.insert(task.name).second) task.name += "_" + std::to_string(i + 1);
      names.insert(task.name);
      cfg.tasks.push_back(std::move(task));
    }
  }
  return cfg;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

nlohmann::json builtin_config(const std::string& name) {
  builtin_model(name);
  nlohmann::json tasks = nlohmann::json::array({"invariants"});
  if (name != "so3_central_force") tasks.push_back("strata");
  tasks.push_back("slice");
  tasks.push_back("simulate");
  tasks.push_back("verify");
  return {{"builtin", name}, {"tasks", tasks}, {"seed", 1}, {"output_dir", "symred_out/" + name}};
}

}  // namespace symred
