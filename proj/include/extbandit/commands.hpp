#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "extbandit/config.hpp"
#include "extbandit/environments.hpp"
#include "extbandit/policies.hpp"

namespace extbandit {

// Evaluation rounds for a horizon: every round when T <= 200, otherwise 200
// evenly spaced rounds always including T itself.
std::vector<std::int64_t> checkpoint_rounds(std::int64_t horizon);

struct CommandOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;  // --seed; EXTBANDIT_SEED is read separately
  int parallelism = 1;
  bool resume = false;        // run only
  bool allow_partial = false;  // analyze only
};

// Subcommand entry points. They return the process exit code for "completed
// with/without failed cells" (0/1) and throw for configuration errors
// (ConfigError & friends, exit 2 at the CLI) and environment setup errors
// (EnvironmentError, exit 3 at the CLI).
int cmd_run(const CommandOptions& opts);
int cmd_shape(const CommandOptions& opts);
int cmd_analyze(const CommandOptions& opts);
int cmd_bench(const CommandOptions& opts);

// ---- Reduced-statistics benchmark driver --------------------------------------
//
// Streams episodes without retaining per-round records so full-scale
// benchmarks stay cheap in memory; only checkpoint snapshots survive.

struct BenchResult {
  std::string task_id;
  std::vector<std::string> policy_ids;
  std::vector<std::int64_t> checkpoints;
  std::vector<int> optimal_arm_at;                    // [checkpoint]
  std::vector<std::vector<double>> mean_max;          // [policy][checkpoint]
  std::vector<std::vector<double>> regret;            // [policy][checkpoint]
  std::vector<std::vector<double>> mean_optimal_pulls;  // [policy][checkpoint]
  std::vector<std::vector<double>> mean_final_pulls;    // [policy][arm]
};

BenchResult run_bench(const TaskSpec& task, const std::vector<PolicyConfig>& policies,
                      std::int64_t horizon, int repetitions, std::uint64_t base_seed,
                      const std::vector<std::int64_t>& checkpoints, int parallelism);

}  // namespace extbandit
