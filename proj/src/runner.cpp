#include "extbandit/runner.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include "json.hpp"

#include "extbandit/csv.hpp"

namespace extbandit {

const char* const kToolVersion = "0.1.0";

void parallel_for(std::size_t count, int parallelism, const std::function<void(std::size_t)>& fn) {
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (count == 0) return;
  if (parallelism == 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(parallelism), count);
  std::vector<std::thread> threads;
  threads.reserve(n_threads);
  for (std::size_t i = 0; i < n_threads; ++i) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

RunTrace run_episode(const TaskSpec& task, const PolicyConfig& policy, std::int64_t horizon,
                     std::uint64_t base_seed, std::uint32_t repetition, const TraceStore& store) {
  BanditEnvironment env(task, store, base_seed, repetition);
  std::unique_ptr<Policy> pol = make_policy(policy, env.num_arms());
  RngStream policy_rng(policy_seed(base_seed, task.task_id, policy.effective_id(), repetition));
  return drive_episode(env, *pol, horizon, task.task_id, policy.effective_id(), repetition,
                       policy_rng);
}

std::vector<double> run_single_arm_episode(const TaskSpec& task, int arm, std::int64_t horizon,
                                           std::uint64_t base_seed, std::uint32_t repetition,
                                           const TraceStore& store) {
  if (arm < 0 || arm >= static_cast<int>(task.arms.size()))
    throw std::logic_error("single-arm episode: arm index out of range");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  BanditEnvironment env(task, store, base_seed, repetition);
  std::vector<double> rewards;
  rewards.reserve(static_cast<std::size_t>(horizon));
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const double r = env.pull(arm);
    if (!std::isfinite(r))
      throw EnvironmentError("environment emitted a non-finite reward for task '" + task.task_id +
                             "' arm " + std::to_string(arm) + " at round " + std::to_string(t));
    rewards.push_back(r);
  }
  return rewards;
}

// ---- Manifest ----------------------------------------------------------------

bool Manifest::all_complete() const {
  for (const ManifestCell& c : cells)
    if (c.status != "complete") return false;
  for (const ManifestOracle& o : oracle)
    if (o.status != "complete") return false;
  return true;
}

std::string manifest_to_json(const Manifest& manifest) {
  nlohmann::json root;
  root["tool_version"] = manifest.tool_version;
  root["config_digest"] = manifest.config_digest;
  root["base_seed"] = manifest.base_seed;
  root["horizon"] = manifest.horizon;
  root["repetitions"] = manifest.repetitions;
  nlohmann::json cells = nlohmann::json::array();
  for (const ManifestCell& c : manifest.cells) {
    cells.push_back({{"task", c.task},
                     {"policy", c.policy},
                     {"repetition", c.repetition},
                     {"status", c.status}});
  }
  root["cells"] = std::move(cells);
  nlohmann::json oracle = nlohmann::json::array();
  for (const ManifestOracle& o : manifest.oracle)
    oracle.push_back({{"task", o.task}, {"status", o.status}});
  root["oracle"] = std::move(oracle);
  return root.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
  }
  try {
    Manifest m;
    m.tool_version = root.at("tool_version").get<std::string>();
    m.config_digest = root.at("config_digest").get<std::string>();
    m.base_seed = root.at("base_seed").get<std::uint64_t>();
    m.horizon = root.at("horizon").get<std::int64_t>();
    m.repetitions = root.at("repetitions").get<int>();
    for (const nlohmann::json& node : root.at("cells")) {
      ManifestCell c;
      c.task = node.at("task").get<std::string>();
      c.policy = node.at("policy").get<std::string>();
      c.repetition = node.at("repetition").get<int>();
      c.status = node.at("status").get<std::string>();
      m.cells.push_back(std::move(c));
    }
    for (const nlohmann::json& node : root.at("oracle")) {
      ManifestOracle o;
      o.task = node.at("task").get<std::string>();
      o.status = node.at("status").get<std::string>();
      m.oracle.push_back(std::move(o));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest has an unexpected shape: ") + e.what());
  }
}

// ---- Batch driver ------------------------------------------------------------

namespace {

constexpr const char* kResultsHeader = "policy,repetition,t,arm,reward\n";
constexpr const char* kOracleHeader = "arm,repetition,t,reward\n";

struct TaskLayout {
  std::size_t policy_base = 0;  // first global item index of the policy cells
  std::size_t oracle_base = 0;  // first global item index of the per-arm cells
  int num_arms = 0;
  bool skipped = false;
};

std::string results_fragment(const RunTrace& trace) {
  std::string out;
  out.reserve(trace.records.size() * 24);
  const std::string prefix = trace.policy_id + "," + std::to_string(trace.repetition) + ",";
  for (const PullRecord& rec : trace.records) {
    out += prefix;
    out += std::to_string(rec.round);
    out += ',';
    out += std::to_string(rec.arm);
    out += ',';
    out += format_double(rec.reward);
    out += '\n';
  }
  return out;
}

std::string oracle_fragment(int arm, std::uint32_t repetition, const std::vector<double>& rewards) {
  std::string out;
  out.reserve(rewards.size() * 20);
  const std::string prefix = std::to_string(arm) + "," + std::to_string(repetition) + ",";
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    out += prefix;
    out += std::to_string(static_cast<std::int64_t>(i) + 1);
    out += ',';
    out += format_double(rewards[i]);
    out += '\n';
  }
  return out;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                          int parallelism, bool resume, const std::string& digest) {
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (config.tasks.empty()) throw ConfigError("config has no tasks");
  if (config.policies.empty()) throw ConfigError("config has no policies to run");

  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());

  // -- Setup validation: fail before any episode runs. --
  TraceStore store;
  for (const TaskSpec& task : config.tasks) store.preload(task);
  for (const TaskSpec& task : config.tasks) {
    BanditEnvironment probe(task, store, config.base_seed, 0);  // validates specs and trace shapes
    for (const PolicyConfig& policy : config.policies) {
      make_policy(policy, probe.num_arms());
      if (policy.name == "maxucb") {
        const std::int64_t c = policy.burn_in_c.value_or(0);
        const std::int64_t k = probe.num_arms();
        if ((c + 1) * k > config.horizon)
          throw ConfigError("policy '" + policy.effective_id() + "' needs at least " +
                            std::to_string((c + 1) * k) + " rounds on task '" + task.task_id +
                            "' (burn-in plus initialization), but horizon is " +
                            std::to_string(config.horizon));
      }
    }
    if (config.horizon < static_cast<std::int64_t>(task.arms.size()))
      throw ConfigError("horizon " + std::to_string(config.horizon) +
                        " is smaller than the arm count of task '" + task.task_id + "'");
  }

  // -- Resume bookkeeping. --
  std::set<std::string> carried_tasks;
  if (resume) {
    const std::filesystem::path manifest_path = dir / "manifest.json";
    if (!std::filesystem::exists(manifest_path))
      throw ConfigError("cannot resume: no manifest.json in '" + out_dir + "'");
    const Manifest previous = manifest_from_json(read_text_file(manifest_path));
    if (previous.config_digest != digest)
      throw ConfigError("cannot resume: config digest mismatch (manifest has " +
                        previous.config_digest + ", current config is " + digest + ")");
    if (previous.base_seed != config.base_seed)
      throw ConfigError("cannot resume: base_seed mismatch (manifest has " +
                        std::to_string(previous.base_seed) + ", current run uses " +
                        std::to_string(config.base_seed) + ")");
    std::map<std::string, bool> task_complete;  // task -> all cells + oracle complete so far
    for (const TaskSpec& task : config.tasks) task_complete[task.task_id] = false;
    std::map<std::string, std::size_t> complete_cells;
    for (const ManifestCell& c : previous.cells)
      if (c.status == "complete") ++complete_cells[c.task];
    std::map<std::string, bool> oracle_ok;
    for (const ManifestOracle& o : previous.oracle) oracle_ok[o.task] = (o.status == "complete");
    const std::size_t cells_per_task =
        config.policies.size() * static_cast<std::size_t>(config.repetitions);
    for (const TaskSpec& task : config.tasks) {
      const bool cells_done = complete_cells[task.task_id] == cells_per_task;
      const bool oracle_done = oracle_ok.count(task.task_id) != 0 && oracle_ok[task.task_id];
      const bool files_present = std::filesystem::exists(dir / (task.task_id + ".results.csv")) &&
                                 std::filesystem::exists(dir / (task.task_id + ".oracle.csv"));
      if (cells_done && oracle_done && files_present) carried_tasks.insert(task.task_id);
    }
  }

  // -- Lay out the work items: per task, policy cells then per-arm cells. --
  const std::size_t num_policies = config.policies.size();
  const std::size_t reps = static_cast<std::size_t>(config.repetitions);
  std::map<std::string, TaskLayout> layout;
  std::size_t total_items = 0;
  for (const TaskSpec& task : config.tasks) {
    TaskLayout tl;
    tl.num_arms = static_cast<int>(task.arms.size());
    tl.skipped = carried_tasks.count(task.task_id) != 0;
    tl.policy_base = total_items;
    if (!tl.skipped) {
      total_items += num_policies * reps;
      tl.oracle_base = total_items;
      total_items += static_cast<std::size_t>(tl.num_arms) * reps;
    } else {
      tl.oracle_base = total_items;
    }
    layout[task.task_id] = tl;
  }

  std::vector<std::string> fragments(total_items);
  std::vector<std::string> statuses(total_items, "complete");

  // Map a global item index back to its episode and run it.
  auto run_item = [&](std::size_t index) {
    for (const TaskSpec& task : config.tasks) {
      const TaskLayout& tl = layout.at(task.task_id);
      if (tl.skipped) continue;
      const std::size_t policy_items = num_policies * reps;
      const std::size_t oracle_items = static_cast<std::size_t>(tl.num_arms) * reps;
      if (index >= tl.policy_base && index < tl.policy_base + policy_items) {
        const std::size_t local = index - tl.policy_base;
        const PolicyConfig& policy = config.policies[local / reps];
        const std::uint32_t rep = static_cast<std::uint32_t>(local % reps);
        try {
          const RunTrace trace =
              run_episode(task, policy, config.horizon, config.base_seed, rep, store);
          fragments[index] = results_fragment(trace);
        } catch (const std::exception& e) {
          statuses[index] = std::string("failed: ") + e.what();
        }
        return;
      }
      if (index >= tl.oracle_base && index < tl.oracle_base + oracle_items) {
        const std::size_t local = index - tl.oracle_base;
        const int arm = static_cast<int>(local / reps);
        const std::uint32_t rep = static_cast<std::uint32_t>(local % reps);
        try {
          const std::vector<double> rewards =
              run_single_arm_episode(task, arm, config.horizon, config.base_seed, rep, store);
          fragments[index] = oracle_fragment(arm, rep, rewards);
        } catch (const std::exception& e) {
          statuses[index] = std::string("failed: ") + e.what();
        }
        return;
      }
    }
    throw std::logic_error("work item index out of range");
  };

  parallel_for(total_items, parallelism, run_item);

  // -- Merge fragments and assemble the manifest in canonical order. --
  RunSummary summary;
  summary.skipped_tasks = carried_tasks.size();
  Manifest manifest;
  manifest.tool_version = kToolVersion;
  manifest.config_digest = digest;
  manifest.base_seed = config.base_seed;
  manifest.horizon = config.horizon;
  manifest.repetitions = config.repetitions;

  for (const TaskSpec& task : config.tasks) {
    const TaskLayout& tl = layout.at(task.task_id);
    if (tl.skipped) {
      for (std::size_t p = 0; p < num_policies; ++p)
        for (std::size_t r = 0; r < reps; ++r)
          manifest.cells.push_back(ManifestCell{task.task_id,
                                                config.policies[p].effective_id(),
                                                static_cast<int>(r), "complete"});
      manifest.oracle.push_back(ManifestOracle{task.task_id, "complete"});
      continue;
    }

    std::string results_csv = kResultsHeader;
    for (std::size_t p = 0; p < num_policies; ++p) {
      for (std::size_t r = 0; r < reps; ++r) {
        const std::size_t index = tl.policy_base + p * reps + r;
        results_csv += fragments[index];
        manifest.cells.push_back(ManifestCell{task.task_id, config.policies[p].effective_id(),
                                              static_cast<int>(r), statuses[index]});
        ++summary.total_cells;
        if (statuses[index] == "complete") {
          ++summary.completed;
        } else {
          ++summary.failed;
          summary.failures.push_back("task '" + task.task_id + "' policy '" +
                                     config.policies[p].effective_id() + "' repetition " +
                                     std::to_string(r) + ": " +
                                     statuses[index].substr(std::string("failed: ").size()));
        }
      }
    }

    std::string oracle_csv = kOracleHeader;
    std::string oracle_status = "complete";
    for (int arm = 0; arm < tl.num_arms; ++arm) {
      for (std::size_t r = 0; r < reps; ++r) {
        const std::size_t index = tl.oracle_base + static_cast<std::size_t>(arm) * reps + r;
        oracle_csv += fragments[index];
        ++summary.total_cells;
        if (statuses[index] == "complete") {
          ++summary.completed;
        } else {
          ++summary.failed;
          const std::string message = statuses[index].substr(std::string("failed: ").size());
          summary.failures.push_back("task '" + task.task_id + "' reference arm " +
                                     std::to_string(arm) + " repetition " + std::to_string(r) +
                                     ": " + message);
          if (oracle_status == "complete") oracle_status = statuses[index];
        }
      }
    }
    manifest.oracle.push_back(ManifestOracle{task.task_id, oracle_status});

    const std::filesystem::path results_path = dir / (task.task_id + ".results.csv");
    const std::filesystem::path oracle_path = dir / (task.task_id + ".oracle.csv");
    write_text_file_atomic(results_path, results_csv);
    write_text_file_atomic(oracle_path, oracle_csv);
    summary.written_files.push_back(results_path.string());
    summary.written_files.push_back(oracle_path.string());
  }

  if (carried_tasks.size() != config.tasks.size()) {
    const std::filesystem::path manifest_path = dir / "manifest.json";
    write_text_file_atomic(manifest_path, manifest_to_json(manifest));
    summary.written_files.push_back(manifest_path.string());
  }
  return summary;
}

}  // namespace extbandit
