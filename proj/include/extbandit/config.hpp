#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "extbandit/environments.hpp"
#include "extbandit/policies.hpp"

namespace extbandit {

struct ExperimentConfig {
  std::uint64_t base_seed = 0;
  std::int64_t horizon = 0;
  int repetitions = 0;
  std::int64_t shape_samples = 100000;  // used by the shape command only
  std::vector<TaskSpec> tasks;
  std::vector<PolicyConfig> policies;  // may be empty for shape-only configs
};

struct AnalyzeConfig {
  std::string results_dir;
  std::string reference;
  int bootstrap_iterations = 1000;
};

struct BenchConfig {
  int experiment = 0;  // 1..4
  std::int64_t horizon = 2000;
  int repetitions = 1000;
  std::uint64_t base_seed = 0;
};

// Strict parsers: unknown keys, missing keys, and wrong value types are all
// hard ConfigErrors with the offending location in the message.
ExperimentConfig parse_experiment_config(const std::string& json_text);
AnalyzeConfig parse_analyze_config(const std::string& json_text);
BenchConfig parse_bench_config(const std::string& json_text);

// Content hash of the raw config bytes, as recorded in run manifests.
std::string config_digest(const std::string& raw_bytes);

// Seed precedence: --seed flag > EXTBANDIT_SEED env var > config value.
// `env_value` is the raw env string (nullptr when unset); a malformed value
// is a ConfigError rather than a silent fallback.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag_seed, const char* env_value,
                           std::uint64_t config_seed);

}  // namespace extbandit
