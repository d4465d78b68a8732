#include "symred/app.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <Eigen/Core>
#include <gmp.h>

#include "symred/dynamics.hpp"
#include "symred/errors.hpp"
#include "symred/groups.hpp"
#include "symred/invariants.hpp"
#include "symred/strata.hpp"
#include "symred/verify.hpp"

namespace symred::app {

namespace {

using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

struct Context {
  const ModelConfig& cfg;
  groups::Group group;
  groups::MomentumMap momentum;
  std::uint64_t seed;
  bool seeded;
  double scale;
  fs::path out_dir;
  std::optional<invariants::HilbertMap> hilbert;
  std::optional<invariants::PoissonStructure> lambda;
  std::optional<strata::Stratification> stratification;
  std::vector<std::string> failures;
};

std::uint64_t require_seed(const Context& c, const std::string& task) {
  if (!c.seeded) throw ConfigError("task '" + task + "' samples points and needs a seed");
  return c.seed;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j, std::size_t dim, const std::string& what) {
  if (!j.is_array() || j.size() != dim) throw ConfigError(what + " needs " + std::to_string(dim) + " entries");
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    if (j[i].is_number()) {
      v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    } else if (j[i].is_string()) {
      v(static_cast<Eigen::Index>(i)) = parse_rational(j[i].get<std::string>()).get_d();
    } else {
      throw ConfigError(what + " entries must be numbers");
    }
  }
  return v;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

nlohmann::json check_json(const std::vector<verify::Check>& checks, bool& pass) {
  nlohmann::json arr = nlohmann::json::array();
  pass = true;
  for (const auto& c : checks) {
    arr.push_back(verify::to_json(c));
    pass = pass && c.pass;
  }
  return arr;
}

const invariants::HilbertMap& hilbert(Context& c, std::optional<int> bound = std::nullopt) {
  if (!c.hilbert || bound) c.hilbert = invariants::invariant_generators(c.group, bound);
  if (!c.lambda || bound) c.lambda = invariants::reduced_structure_matrix(*c.hilbert, c.cfg.model.space);
  return *c.hilbert;
}

const strata::Stratification& stratification(Context& c) {
  if (c.group.is_algebra()) throw ConfigError("strata are enumerated for finite groups and tori only");
  if (!c.stratification) c.stratification = strata::enumerate_strata(c.group, c.cfg.model.space, c.momentum);
  return *c.stratification;
}

dynamics::HamiltonianSystem system(const Context& c) {
  const auto& m = c.cfg.model;
  if (m.hamiltonian) return {m.space, c.group, *m.hamiltonian};
  if (m.hamiltonian_builtin == "central_force") return {m.space, c.group, dynamics::central_force(m.space.dim() / 2), c.seed};
  throw ConfigError("task needs a Hamiltonian");
}

nlohmann::json task_invariants(Context& c, const TaskConfig& t) {
  std::optional<int> bound;
  if (t.params.contains("degree_bound")) bound = t.params["degree_bound"].get<int>();
  const auto& h = hilbert(c, bound);
  nlohmann::json r = invariants::to_json(h);
  r["poisson_structure"] = invariants::to_json(*c.lambda);
  auto sc = invariants::check_structure(h, *c.lambda, c.group, c.momentum, c.cfg.model.space);
  r["structure_checks"] = {{"antisymmetric", sc.antisymmetric},
                           {"substitution_exact", sc.substitution_exact},
                           {"jacobi_exact", sc.jacobi_exact},
                           {"closure_invariant", sc.closure_invariant},
                           {"noether_exact", sc.noether_exact}};
  auto ynames = generator_names(h.size());
  if (c.momentum.algebra_dim() > 0) {
    nlohmann::json eq = nlohmann::json::array();
    for (const auto& p : groups::check_equivariance(c.momentum, c.group.structure(), c.cfg.model.space))
      eq.push_back(p.is_zero());
    r["equivariance_exact"] = eq;
    try {
      r["momentum_norm_squared"] = to_string(invariants::express_in_generators(c.momentum.norm_squared(), h), ynames);
    } catch (const ExpressibilityError& e) {
      r["momentum_norm_squared"] = nullptr;
      r["momentum_norm_squared_note"] = e.what();
    }
  }
  if (c.cfg.model.hamiltonian) {
    try {
      r["reduced_hamiltonian"] = to_string(invariants::express_in_generators(*c.cfg.model.hamiltonian, h), ynames);
    } catch (const ExpressibilityError& e) {
      r["reduced_hamiltonian"] = nullptr;
      r["reduced_hamiltonian_note"] = e.what();
    }
  }
  return r;
}

nlohmann::json task_strata(Context& c, const TaskConfig& t) {
  const auto seed = require_seed(c, t.name);
  const auto& st = stratification(c);
  nlohmann::json r = strata::to_json(st);
  auto fr = strata::frontier_diagnostic(c.group, st, seed);
  r["frontier"] = {{"pairs_checked", fr.pairs_checked}, {"failures", fr.failures}, {"messages", fr.messages}};
  nlohmann::json lift = nlohmann::json::array();
  for (std::size_t i = 0; i < st.strata.size(); ++i) {
    auto m = strata::mwm_stratum(c.group, c.cfg.model.space, c.momentum, st, i, seed + i);
    lift.push_back({{"isotropy_class", m.isotropy_class},
                    {"normalizer_order", m.normalizer_order},
                    {"quotient_algebra_dim", m.quotient_dim},
                    {"fixed_space_dim", m.fixed_dim},
                    {"momentum_rank", m.momentum_rank},
                    {"orbit_dim", m.orbit_dim},
                    {"reduced_dim", m.reduced_dim},
                    {"free_action", m.free_action},
                    {"representatives_checked", m.representatives_checked},
                    {"representatives_agree", m.representatives_agree},
                    {"matches_stratum", m.matches_stratum}});
  }
  r["per_stratum_reduction"] = lift;
  if (c.hilbert || t.params.value("relations", true)) {
    const auto& h = hilbert(c);
    nlohmann::json rel = nlohmann::json::array();
    for (const auto& p : h.relations) rel.push_back(to_string(p, generator_names(h.size())));
    r["generator_relations"] = rel;
  }
  return r;
}

Eigen::VectorXd initial_state(Context& c, const TaskConfig& t) {
  const std::size_t dim = c.cfg.model.space.dim();
  if (t.params.contains("initial_state")) return vector_from_json(t.params["initial_state"], dim, "initial_state");
  if (t.params.contains("stratum")) {
    const auto& st = stratification(c);
    const auto id = t.params["stratum"].get<std::string>();
    Eigen::VectorXd x = strata::stratum_point(c.group, st.strata[st.index_of(id)], require_seed(c, t.name));
    const double radius = t.params.value("radius", 0.8);
    return x.norm() > 0 ? Eigen::VectorXd(radius * x / x.norm()) : x;
  }
  auto s = strata::zero_level_sampler(c.momentum, 1, t.params.value("radius", 0.8), require_seed(c, t.name));
  if (s.points.empty()) throw ConvergenceError("no zero-level start point found");
  return s.points.front();
}

nlohmann::json task_simulate(Context& c, const TaskConfig& t) {
  const double T = t.params.value("T", 10.0), dt = t.params.value("dt", 1e-3);
  auto sys = system(c);
  const Eigen::VectorXd v0 = initial_state(c, t);
  auto tr = dynamics::integrate_full(sys, v0, T, dt);
  const fs::path csv = c.out_dir / ("trajectory_" + t.name + ".csv");
  dynamics::write_csv(tr, csv.string());
  nlohmann::json r{{"T", T},
                   {"dt_requested", dt},
                   {"dt_used", tr.dt},
                   {"halvings", tr.halvings},
                   {"steps", tr.states.size() - 1},
                   {"initial_state", vector_json(v0)},
                   {"hamiltonian", sys.description()},
                   {"max_energy_drift", tr.max_energy_drift()},
                   {"noether_drift", {{"value", dynamics::check_noether(tr, c.momentum)}, {"tolerance", 1e-8 * c.scale}}},
                   {"fixed_space_escape", {{"value", tr.max_stratum_distance()}, {"tolerance", 1e-8 * c.scale}}},
                   {"trajectory_csv", csv.filename().string()}};
  if (sys.is_polynomial() && t.params.value("reduced", true)) {
    const auto& h = hilbert(c);
    auto tw = dynamics::compare_full_vs_reduced(sys, h, *c.lambda, v0, T, dt);
    const fs::path rcsv = c.out_dir / ("trajectory_" + t.name + "_reduced.csv");
    dynamics::write_csv(tw.reduced, rcsv.string(), true);
    r["reduced"] = {{"reduced_hamiltonian", to_string(tw.reduced_hamiltonian, generator_names(h.size()))},
                    {"max_deviation", {{"value", tw.max_deviation}, {"tolerance", 1e-6 * c.scale}}},
                    {"error_constant", tw.error_constant},
                    {"hamilton_residual",
                     {{"value", dynamics::hamilton_residual(tw.full, h, *c.lambda, tw.reduced_hamiltonian)},
                      {"tolerance", 1e-5 * c.scale}}},
                    {"trajectory_csv", rcsv.filename().string()}};
  }
  return r;
}

nlohmann::json task_verify(Context& c, const TaskConfig& t) {
  const auto seed = require_seed(c, t.name);
  nlohmann::json r = nlohmann::json::object();
  bool all = true;
  if (t.params.value("suite", true)) {
    bool pass = true;
    r["suite"] = {{"checks", check_json(verify::verify_model(c.cfg.model, seed, c.scale), pass)}};
    r["suite"]["pass"] = pass;
    if (!pass) c.failures.push_back(t.name + ": model suite");
    all = all && pass;
  }
  if (t.params.contains("criteria")) {
    nlohmann::json crit = nlohmann::json::array();
    for (const auto& id : t.params["criteria"]) {
      const auto key = id.is_string() ? id.get<std::string>() : std::to_string(id.get<int>());
      auto res = verify::run_criterion(verify::find_criterion(key).id, seed);
      crit.push_back(verify::to_json(res));
      if (!res.pass) c.failures.push_back(t.name + ": criterion " + res.key);
      all = all && res.pass;
    }
    r["criteria"] = crit;
  }
  r["pass"] = all;
  return r;
}

nlohmann::json task_slice(Context& c, const TaskConfig& t) {
  const std::size_t dim = c.cfg.model.space.dim();
  Eigen::VectorXd x;
  if (t.params.contains("point")) {
    x = vector_from_json(t.params["point"], dim, "point");
  } else {
    auto s = strata::zero_level_sampler(c.momentum, 1, t.params.value("radius", 1.0), require_seed(c, t.name));
    if (s.points.empty()) throw ConvergenceError("no zero-level base point found");
    x = s.points.front();
  }
  const strata::Stratification* st = c.group.is_algebra() ? nullptr : &stratification(c);
  auto sm = strata::slice_model(x, c.group, c.cfg.model.space, c.momentum);
  auto lm = strata::local_model_match(x, c.group, c.cfg.model.space, c.momentum, st);
  nlohmann::json side = nlohmann::json::array(), global = nlohmann::json::array();
  for (const auto& [id, d] : lm.slice_side) side.push_back({{"isotropy_class", id}, {"stratum_dim", d}});
  for (const auto& [id, d] : lm.global_side) global.push_back({{"isotropy_class", id}, {"stratum_dim", d}});
  nlohmann::json r{{"base_point", vector_json(x)},
                   {"isotropy_class", sm.isotropy_class},
                   {"orbit_dim", sm.orbit_dim},
                   {"nu_dim", sm.nu_dim},
                   {"slice_dim", sm.slice.dim()},
                   {"isotropy_algebra_dim", sm.isotropy_algebra_dim},
                   {"trivial_part_dim", sm.trivial_part_dim()},
                   {"local_model", {{"match", lm.match}, {"partial", lm.partial}, {"slice_side", side},
                                    {"global_side", global}, {"details", lm.details}}}};
  if (c.group.is_torus()) {
    auto ls = strata::abelian_model_level_set(c.group, sm, c.cfg.model.space, t.params.value("samples", 1000),
                                              require_seed(c, t.name));
    r["level_set"] = {{"samples", ls.samples},
                      {"solutions", ls.solutions},
                      {"counterexamples", ls.counterexamples},
                      {"shifted_target_hits", ls.shifted_zero_section_hits},
                      {"max_lambda", ls.max_lambda},
                      {"tolerance", 1e-10}};
  }
  return r;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_report(RunResult& res, const fs::path& dir) {
  fs::create_directories(dir);
  res.report_path = (dir / "report.json").string();
  std::ofstream out(res.report_path);
  if (!out) throw Error("cannot write " + res.report_path);
  out << res.report.dump(2) << '\n';
}

int code_for(const std::exception& e) {
  if (dynamic_cast<const AmbiguityError*>(&e)) return kAmbiguity;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
      dynamic_cast<const PreconditionError*>(&e) || dynamic_cast<const GroupError*>(&e) ||
      dynamic_cast<const nlohmann::json::exception*>(&e))
    return kConfigError;
  return kVerificationFailed;
}

}  // namespace

nlohmann::json versions() {
  return {{"symred", "0.1.0"},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"gmp", gmp_version}};
}

RunResult run(const nlohmann::json& config, const RunOptions& options, std::ostream& log) {
  RunResult res;
  const auto started = utc_now();
  std::optional<ModelConfig> cfg;
  try {
    cfg = parse_config(config);
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << '\n';
    res.exit_code = code_for(e) == kAmbiguity ? kAmbiguity : kConfigError;
    res.report = {{"error", e.what()}, {"exit_code", res.exit_code}};
    return res;
  }
  if (options.seed) cfg->seed = options.seed;
  if (options.tolerance_scale) cfg->tolerance_scale = *options.tolerance_scale;
  const fs::path dir = options.output_dir ? fs::path(*options.output_dir) : fs::path(cfg->output_dir);

  nlohmann::json tasks = nlohmann::json::array();
  nlohmann::json seconds = nlohmann::json::object();
  std::vector<std::string> failures;
  std::string error;
  try {
    fs::create_directories(dir);
    groups::Group g(cfg->model.group, cfg->model.space);
    auto f = groups::momentum_map(g, cfg->model.space);
    Context ctx{*cfg, std::move(g), std::move(f), cfg->seed.value_or(0), cfg->seed.has_value(),
                cfg->tolerance_scale, dir, {}, {}, {}, {}};
    for (const auto& t : cfg->tasks) {
      const auto t0 = Clock::now();
      nlohmann::json result;
      if (t.type == "invariants") result = task_invariants(ctx, t);
      else if (t.type == "strata") result = task_strata(ctx, t);
      else if (t.type == "simulate") result = task_simulate(ctx, t);
      else if (t.type == "verify") result = task_verify(ctx, t);
      else result = task_slice(ctx, t);
      seconds[t.name] = std::chrono::duration<double>(Clock::now() - t0).count();
      tasks.push_back({{"name", t.name}, {"type", t.type}, {"result", result}});
      log << "task " << t.name << " done";
      if (result.contains("pass")) log << (result["pass"].get<bool>() ? " (pass)" : " (FAIL)");
      log << '\n';
    }
    failures = ctx.failures;
    res.exit_code = failures.empty() ? kOk : kVerificationFailed;
  } catch (const std::exception& e) {
    error = e.what();
    res.exit_code = code_for(e);
    log << "error: " << error << '\n';
  }

  res.report = {{"model", cfg->echo},
                {"seed", cfg->seed ? nlohmann::json(*cfg->seed) : nlohmann::json(nullptr)},
                {"tolerance_scale", cfg->tolerance_scale},
                {"tasks", tasks},
                {"verification", {{"pass", failures.empty() && error.empty()}, {"failures", failures}}},
                {"versions", versions()},
                {"exit_code", res.exit_code},
                {"timestamp", {{"utc", started}, {"task_seconds", seconds}}}};
  if (!error.empty()) res.report["error"] = error;
  try {
    write_report(res, dir);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    if (res.exit_code == kOk) res.exit_code = kConfigError;
  }
  return res;
}

RunResult run_file(const std::string& path, const RunOptions& options, std::ostream& log) {
  std::ifstream in(path);
  if (!in) {
    log << "config error: cannot open " << path << '\n';
    return {kConfigError, {{"error", "cannot open " + path}}, ""};
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    log << "config error: " << e.what() << '\n';
    return {kConfigError, {{"error", e.what()}}, ""};
  }
  return run(j, options, log);
}

RunResult run_builtin(const std::string& name, const RunOptions& options, std::ostream& log) {
  nlohmann::json cfg;
  try {
    cfg = builtin_config(name);
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << '\n';
    return {kConfigError, {{"error", e.what()}}, ""};
  }
  return run(cfg, options, log);
}

RunResult run_verify_all(const RunOptions& options, std::ostream& log) {
  RunResult res;
  res.report = verify::verify_all(options.seed.value_or(1), options.tolerance_scale.value_or(1.0));
  res.report["versions"] = versions();
  for (const auto& [name, m] : res.report["models"].items()) {
    std::size_t passed = 0;
    for (const auto& c : m["checks"]) passed += c["pass"].get<bool>() ? 1 : 0;
    log << (m["pass"].get<bool>() ? "PASS " : "FAIL ") << name << " (" << passed << "/" << m["checks"].size()
        << " checks)\n";
    if (m.contains("error")) log << "  error: " << m["error"].get<std::string>() << '\n';
    for (const auto& c : m["checks"])
      if (!c["pass"].get<bool>())
        log << "  failed " << c["name"].get<std::string>() << ": value " << c["value"] << ", tolerance "
            << c["tolerance"] << '\n';
  }
  res.exit_code = res.report["pass"].get<bool>() ? kOk : kVerificationFailed;
  try {
    write_report(res, options.output_dir ? fs::path(*options.output_dir) : fs::path("symred_verify"));
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    if (res.exit_code == kOk) res.exit_code = kConfigError;
  }
  return res;
}

}  // namespace symred::app
