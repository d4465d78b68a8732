#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "symred/app.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"Symplectic reduction toolkit: invariants, strata, reduced dynamics"};
  cli.require_subcommand(1);

  symred::app::RunOptions opts;
  std::uint64_t seed = 0;
  double scale = 1.0;
  std::string out_dir;
  auto add_flags = [&](CLI::App* sub) {
    sub->add_option("--output", out_dir, "Output directory");
    sub->add_option("--seed", seed, "Random seed for sampled tasks");
    sub->add_option("--tolerance-scale", scale, "Multiplier applied to every tolerance")->check(CLI::PositiveNumber);
  };

  std::string config_path, builtin;
  auto* run = cli.add_subcommand("run", "Run the tasks of a JSON model configuration");
  run->add_option("config", config_path, "Configuration file")->required();
  add_flags(run);
  auto* bi = cli.add_subcommand("builtin", "Run a bundled model with its default tasks");
  bi->add_option("name", builtin, "z2_cone | circle_1_-1 | klein_r4 | so3_central_force")->required();
  add_flags(bi);
  auto* va = cli.add_subcommand("verify-all", "Run every bundled model's verification suite");
  add_flags(va);

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : symred::app::kConfigError;
  }

  for (auto* sub : {run, bi, va}) {
    if (!sub->parsed()) continue;
    if (sub->count("--output")) opts.output_dir = out_dir;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--tolerance-scale")) opts.tolerance_scale = scale;
  }

  symred::app::RunResult res;
  if (run->parsed()) res = symred::app::run_file(config_path, opts, std::cerr);
  else if (bi->parsed()) res = symred::app::run_builtin(builtin, opts, std::cerr);
  else res = symred::app::run_verify_all(opts, std::cerr);

  if (!res.report_path.empty()) std::cout << res.report_path << '\n';
  if (res.exit_code == symred::app::kVerificationFailed && res.report.contains("verification"))
    for (const auto& f : res.report["verification"]["failures"]) std::cerr << "failed: " << f.get<std::string>() << '\n';
  return res.exit_code;
}
