#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "extbandit/commands.hpp"
#include "extbandit/core.hpp"
#include "extbandit/runner.hpp"

namespace {

void add_common_options(CLI::App* cmd, extbandit::CommandOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Path to the JSON config file")->required();
  cmd->add_option("--out", opts.out_dir, "Output directory")->required();
  cmd->add_option("--seed", opts.seed,
                  "Base seed override (takes precedence over EXTBANDIT_SEED and the config)");
  cmd->add_option("--parallel", opts.parallelism, "Worker thread count")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"extbandit: extreme-bandit experiment runner"};
  app.set_version_flag("--version", extbandit::kToolVersion);
  app.require_subcommand(1);

  extbandit::CommandOptions run_opts, shape_opts, analyze_opts, bench_opts;

  CLI::App* run = app.add_subcommand("run", "Run the configured policy-task grid");
  add_common_options(run, run_opts);
  run->add_flag("--resume", run_opts.resume, "Skip tasks already complete in the output dir");

  CLI::App* shape = app.add_subcommand("shape", "Estimate distribution-shape constants");
  add_common_options(shape, shape_opts);

  CLI::App* analyze = app.add_subcommand("analyze", "Aggregate results into evaluation tables");
  add_common_options(analyze, analyze_opts);
  analyze->add_flag("--allow-partial", analyze_opts.allow_partial,
                    "Analyze incomplete results, dropping unusable tasks");

  CLI::App* bench = app.add_subcommand("bench", "Run a built-in benchmark experiment");
  add_common_options(bench, bench_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return extbandit::cmd_run(run_opts);
    if (shape->parsed()) return extbandit::cmd_shape(shape_opts);
    if (analyze->parsed()) return extbandit::cmd_analyze(analyze_opts);
    if (bench->parsed()) return extbandit::cmd_bench(bench_opts);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const extbandit::EnvironmentError& e) {
    std::cerr << "environment error: " << e.what() << "\n";
    return 3;
  } catch (const extbandit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
