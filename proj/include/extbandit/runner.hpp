#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "extbandit/config.hpp"
#include "extbandit/core.hpp"
#include "extbandit/environments.hpp"
#include "extbandit/policies.hpp"

namespace extbandit {

// Run `fn(i)` for i in [0, count). With parallelism > 1, work is pulled from a
// shared counter by that many threads; results must be written to
// index-addressed slots so the merge order never depends on scheduling.
// The first exception thrown by `fn` is rethrown on the calling thread.
void parallel_for(std::size_t count, int parallelism, const std::function<void(std::size_t)>& fn);

// One (task, policy, repetition) episode. Reward streams are derived from
// (base_seed, task_id, repetition, arm) only, so every policy sees identical
// draws; the policy's private randomness comes from (base_seed, task_id,
// policy id, repetition).
RunTrace run_episode(const TaskSpec& task, const PolicyConfig& policy, std::int64_t horizon,
                     std::uint64_t base_seed, std::uint32_t repetition, const TraceStore& store);

// Pull a single fixed arm for the whole horizon against the same reward
// streams as run_episode. Used for the per-arm reference curves.
std::vector<double> run_single_arm_episode(const TaskSpec& task, int arm, std::int64_t horizon,
                                           std::uint64_t base_seed, std::uint32_t repetition,
                                           const TraceStore& store);

// ---- Run manifest ------------------------------------------------------------

struct ManifestCell {
  std::string task;
  std::string policy;
  int repetition = 0;
  std::string status;  // "complete" or "failed: <message>"
};

struct ManifestOracle {
  std::string task;
  std::string status;
};

struct Manifest {
  std::string tool_version;
  std::string config_digest;
  std::uint64_t base_seed = 0;
  std::int64_t horizon = 0;
  int repetitions = 0;
  std::vector<ManifestCell> cells;
  std::vector<ManifestOracle> oracle;

  bool all_complete() const;
};

std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const std::string& text);  // ConfigError on malformed input

// ---- Batch driver ------------------------------------------------------------

struct RunSummary {
  std::size_t total_cells = 0;  // policy cells + per-arm reference cells
  std::size_t completed = 0;
  std::size_t failed = 0;
  std::size_t skipped_tasks = 0;  // tasks carried over unchanged by --resume
  std::vector<std::string> failures;       // one line per failed cell, deterministic order
  std::vector<std::string> written_files;  // absolute paths written this invocation

  bool all_ok() const { return failed == 0; }
};

// Executes every (task, policy, repetition) episode plus the per-arm reference
// episodes, writing <task>.results.csv, <task>.oracle.csv and manifest.json
// into out_dir. Setup problems (unreadable traces, invalid arms) throw before
// any episode runs; failures inside an episode are recorded per cell and the
// remaining cells still run. With resume=true, tasks whose cells are all
// complete in the existing manifest (digest and seed must match) are skipped;
// a fully-complete directory is a no-op that writes nothing.
RunSummary run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                          int parallelism, bool resume, const std::string& digest);

extern const char* const kToolVersion;

}  // namespace extbandit
