#include "extbandit/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "extbandit/analysis.hpp"
#include "extbandit/csv.hpp"
#include "extbandit/experiments.hpp"
#include "extbandit/metrics.hpp"
#include "extbandit/runner.hpp"

namespace extbandit {

std::vector<std::int64_t> checkpoint_rounds(std::int64_t horizon) {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  std::vector<std::int64_t> rounds;
  if (horizon <= 200) {
    rounds.resize(static_cast<std::size_t>(horizon));
    std::iota(rounds.begin(), rounds.end(), std::int64_t{1});
    return rounds;
  }
  rounds.reserve(200);
  for (int j = 1; j <= 200; ++j) {
    const double exact = static_cast<double>(j) * static_cast<double>(horizon) / 200.0;
    const std::int64_t t = std::clamp<std::int64_t>(std::llround(exact), 1, horizon);
    rounds.push_back(t);
  }
  rounds.erase(std::unique(rounds.begin(), rounds.end()), rounds.end());
  if (rounds.back() != horizon) rounds.push_back(horizon);
  return rounds;
}

namespace {

std::uint64_t effective_seed(const CommandOptions& opts, std::uint64_t config_seed) {
  return resolve_seed(opts.seed, std::getenv("EXTBANDIT_SEED"), config_seed);
}

std::filesystem::path ensure_out_dir(const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());
  return dir;
}

}  // namespace

// ---- run -----------------------------------------------------------------------

int cmd_run(const CommandOptions& opts) {
  const std::string raw = read_text_file(opts.config_path);
  ExperimentConfig cfg = parse_experiment_config(raw);
  cfg.base_seed = effective_seed(opts, cfg.base_seed);
  const std::string digest = config_digest(raw);
  const RunSummary summary =
      run_experiment(cfg, opts.out_dir, opts.parallelism, opts.resume, digest);
  for (const std::string& line : summary.failures) std::cerr << "failed: " << line << "\n";
  std::cout << "run: " << summary.completed << "/" << summary.total_cells << " cells complete";
  if (summary.skipped_tasks > 0)
    std::cout << " (" << summary.skipped_tasks << " tasks carried over unchanged)";
  std::cout << "\n";
  return summary.all_ok() ? 0 : 1;
}

// ---- shape ---------------------------------------------------------------------

int cmd_shape(const CommandOptions& opts) {
  const std::string raw = read_text_file(opts.config_path);
  ExperimentConfig cfg = parse_experiment_config(raw);
  cfg.base_seed = effective_seed(opts, cfg.base_seed);

  TraceStore store;
  for (const TaskSpec& task : cfg.tasks) store.preload(task);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::string csv = "task,arm,n_samples,b_hat,L,U,delta_i,alpha_corollary\n";

  for (const TaskSpec& task : cfg.tasks) {
    const int num_arms = static_cast<int>(task.arms.size());

    // Sample pools for the distribution-shape probe: fresh draws for synthetic
    // arms (so policy/runner streams are untouched), recorded losses for
    // replayed arms, both capped at shape_samples.
    std::vector<std::vector<double>> pools(static_cast<std::size_t>(num_arms));
    for (int i = 0; i < num_arms; ++i) {
      const ArmSpec& spec = task.arms[static_cast<std::size_t>(i)];
      spec.validate();
      auto& pool = pools[static_cast<std::size_t>(i)];
      if (spec.kind == ArmKind::trace) {
        const TraceTable& table = store.get(spec.trace_file);
        if (spec.trace_arm >= table.num_arms)
          throw EnvironmentError("task '" + task.task_id + "': trace arm " +
                                 std::to_string(spec.trace_arm) + " not present in '" +
                                 spec.trace_file + "' (file declares " +
                                 std::to_string(table.num_arms) + " arms)");
        for (const auto& seq : table.sequences[static_cast<std::size_t>(spec.trace_arm)]) {
          for (double loss : seq) {
            if (static_cast<std::int64_t>(pool.size()) >= cfg.shape_samples) break;
            pool.push_back(apply_reward_transform(spec.transform, loss));
          }
          if (static_cast<std::int64_t>(pool.size()) >= cfg.shape_samples) break;
        }
      } else {
        pool.reserve(static_cast<std::size_t>(cfg.shape_samples));
        RngStream stream(
            mix_seed(env_arm_seed(cfg.base_seed, task.task_id, 0, i), fnv1a64("shape")));
        for (std::int64_t s = 0; s < cfg.shape_samples; ++s)
          pool.push_back(sample_arm(spec, stream));
      }
    }

    // Gap estimates from the single-arm reference episodes.
    std::vector<std::vector<std::vector<double>>> rewards(static_cast<std::size_t>(num_arms));
    for (int i = 0; i < num_arms; ++i) {
      rewards[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(cfg.repetitions));
      for (int r = 0; r < cfg.repetitions; ++r)
        rewards[static_cast<std::size_t>(i)].push_back(run_single_arm_episode(
            task, i, cfg.horizon, cfg.base_seed, static_cast<std::uint32_t>(r), store));
    }
    const GapEstimate gaps = estimate_gaps(rewards, cfg.horizon);

    std::vector<double> l_values(static_cast<std::size_t>(num_arms), nan);
    std::vector<double> u_values(static_cast<std::size_t>(num_arms), nan);
    std::vector<double> b_hats(static_cast<std::size_t>(num_arms), nan);
    for (int i = 0; i < num_arms; ++i) {
      const auto& pool = pools[static_cast<std::size_t>(i)];
      if (!pool.empty()) b_hats[static_cast<std::size_t>(i)] = *std::max_element(pool.begin(), pool.end());
      try {
        const ShapeConstants sc = estimate_shape_constants(pool);
        l_values[static_cast<std::size_t>(i)] = sc.L;
        u_values[static_cast<std::size_t>(i)] = sc.U;
        b_hats[static_cast<std::size_t>(i)] = sc.b_hat;
      } catch (const std::invalid_argument& e) {
        // Insufficient or degenerate samples: keep the row, leave L/U empty.
        std::cerr << "shape: task '" << task.task_id << "' arm " << i << ": " << e.what() << "\n";
      }
    }

    double alpha_corollary = nan;
    const double l_star = l_values[static_cast<std::size_t>(gaps.best_arm)];
    double delta_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < num_arms; ++i)
      if (i != gaps.best_arm) delta_min = std::min(delta_min, gaps.delta[static_cast<std::size_t>(i)]);
    if (std::isfinite(l_star) && std::isfinite(delta_min)) {
      try {
        alpha_corollary = corollary1_alpha(l_star, delta_min, cfg.horizon);
      } catch (const std::invalid_argument&) {
        alpha_corollary = nan;
      }
    }

    for (int i = 0; i < num_arms; ++i) {
      const std::size_t idx = static_cast<std::size_t>(i);
      csv += task.task_id;
      csv += ',';
      csv += std::to_string(i);
      csv += ',';
      csv += std::to_string(pools[idx].size());
      csv += ',';
      csv += format_double(b_hats[idx]);
      csv += ',';
      csv += format_double(l_values[idx]);
      csv += ',';
      csv += format_double(u_values[idx]);
      csv += ',';
      csv += format_double(gaps.delta[idx]);
      csv += ',';
      csv += format_double(alpha_corollary);
      csv += '\n';
    }
  }

  const auto dir = ensure_out_dir(opts.out_dir);
  const auto path = dir / "shape.csv";
  write_text_file_atomic(path, csv);
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

// ---- analyze -------------------------------------------------------------------

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::int64_t parse_int_field(const std::string& field, const std::filesystem::path& file,
                             std::size_t lineno, const char* what) {
  std::int64_t value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last || field.empty())
    throw ConfigError("file '" + file.string() + "' line " + std::to_string(lineno) +
                      ": malformed " + what + " '" + field + "'");
  return value;
}

double parse_double_field(const std::string& field, const std::filesystem::path& file,
                          std::size_t lineno, const char* what) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last || field.empty())
    throw ConfigError("file '" + file.string() + "' line " + std::to_string(lineno) +
                      ": malformed " + what + " '" + field + "'");
  return value;
}

struct ResultsData {
  // policy -> repetition -> per-round values, in written row order
  std::map<std::string, std::map<int, std::vector<double>>> rewards;
  std::map<std::string, std::map<int, std::vector<int>>> arms;
};

ResultsData parse_results_csv(const std::filesystem::path& path, std::int64_t horizon) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "policy,repetition,t,arm,reward")
    throw ConfigError("file '" + path.string() + "': missing or unexpected results header");
  ResultsData data;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 5)
      throw ConfigError("file '" + path.string() + "' line " + std::to_string(lineno) +
                        ": expected 5 fields, got " + std::to_string(fields.size()));
    const std::string& policy = fields[0];
    const int rep = static_cast<int>(parse_int_field(fields[1], path, lineno, "repetition"));
    const std::int64_t t = parse_int_field(fields[2], path, lineno, "round");
    const int arm = static_cast<int>(parse_int_field(fields[3], path, lineno, "arm"));
    const double reward = parse_double_field(fields[4], path, lineno, "reward");
    auto& seq = data.rewards[policy][rep];
    if (t != static_cast<std::int64_t>(seq.size()) + 1)
      throw ConfigError("file '" + path.string() + "' line " + std::to_string(lineno) +
                        ": rounds out of order for policy '" + policy + "' repetition " +
                        std::to_string(rep));
    seq.push_back(reward);
    data.arms[policy][rep].push_back(arm);
  }
  for (const auto& [policy, reps] : data.rewards)
    for (const auto& [rep, seq] : reps)
      if (static_cast<std::int64_t>(seq.size()) != horizon)
        throw ConfigError("file '" + path.string() + "': policy '" + policy + "' repetition " +
                          std::to_string(rep) + " has " + std::to_string(seq.size()) +
                          " rounds, expected " + std::to_string(horizon));
  return data;
}

// arm -> repetition -> per-round rewards
using OracleData = std::map<int, std::map<int, std::vector<double>>>;

OracleData parse_oracle_csv(const std::filesystem::path& path, std::int64_t horizon) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "arm,repetition,t,reward")
    throw ConfigError("file '" + path.string() + "': missing or unexpected header");
  OracleData data;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 4)
      throw ConfigError("file '" + path.string() + "' line " + std::to_string(lineno) +
                        ": expected 4 fields, got " + std::to_string(fields.size()));
    const int arm = static_cast<int>(parse_int_field(fields[0], path, lineno, "arm"));
    const int rep = static_cast<int>(parse_int_field(fields[1], path, lineno, "repetition"));
    const std::int64_t t = parse_int_field(fields[2], path, lineno, "round");
    const double reward = parse_double_field(fields[3], path, lineno, "reward");
    auto& seq = data[arm][rep];
    if (t != static_cast<std::int64_t>(seq.size()) + 1)
      throw ConfigError("file '" + path.string() + "' line " + std::to_string(lineno) +
                        ": rounds out of order for arm " + std::to_string(arm) + " repetition " +
                        std::to_string(rep));
    seq.push_back(reward);
  }
  for (const auto& [arm, reps] : data)
    for (const auto& [rep, seq] : reps)
      if (static_cast<std::int64_t>(seq.size()) != horizon)
        throw ConfigError("file '" + path.string() + "': arm " + std::to_string(arm) +
                          " repetition " + std::to_string(rep) + " has " +
                          std::to_string(seq.size()) + " rounds, expected " +
                          std::to_string(horizon));
  return data;
}

double value_at(const std::vector<double>& curve, std::int64_t t) {
  return curve[static_cast<std::size_t>(t - 1)];
}

}  // namespace

int cmd_analyze(const CommandOptions& opts) {
  const std::string raw = read_text_file(opts.config_path);
  const AnalyzeConfig cfg = parse_analyze_config(raw);
  const std::filesystem::path rdir(cfg.results_dir);
  const std::filesystem::path manifest_path = rdir / "manifest.json";
  if (!std::filesystem::exists(manifest_path))
    throw ConfigError("no manifest.json in results_dir '" + cfg.results_dir +
                      "'; run the experiments first");
  const Manifest manifest = manifest_from_json(read_text_file(manifest_path));
  if (manifest.cells.empty()) throw ConfigError("manifest lists no cells; nothing to analyze");

  std::vector<std::string> task_order;
  std::vector<std::string> policy_order;
  for (const ManifestCell& c : manifest.cells) {
    if (std::find(task_order.begin(), task_order.end(), c.task) == task_order.end())
      task_order.push_back(c.task);
    if (std::find(policy_order.begin(), policy_order.end(), c.policy) == policy_order.end())
      policy_order.push_back(c.policy);
  }
  if (std::find(policy_order.begin(), policy_order.end(), cfg.reference) == policy_order.end()) {
    std::string available;
    for (const std::string& p : policy_order) {
      if (!available.empty()) available += ", ";
      available += p;
    }
    throw ConfigError("reference policy '" + cfg.reference + "' is not in the results (have: " +
                      available + ")");
  }

  if (!manifest.all_complete() && !opts.allow_partial) {
    std::cerr << "analyze: results in '" << cfg.results_dir
              << "' are incomplete; finish the run or pass --allow-partial\n";
    return 1;
  }

  std::map<std::string, std::map<std::string, std::set<int>>> complete_reps;
  std::map<std::string, bool> oracle_ok;
  for (const ManifestCell& c : manifest.cells)
    if (c.status == "complete") complete_reps[c.task][c.policy].insert(c.repetition);
  for (const ManifestOracle& o : manifest.oracle) oracle_ok[o.task] = (o.status == "complete");

  std::vector<std::string> tasks;
  for (const std::string& task : task_order) {
    bool usable = oracle_ok.count(task) != 0 && oracle_ok.at(task);
    for (const std::string& policy : policy_order)
      usable = usable && !complete_reps[task][policy].empty();
    if (usable)
      tasks.push_back(task);
    else
      std::cerr << "analyze: dropping task '" << task << "' (incomplete cells)\n";
  }
  if (tasks.empty())
    throw ConfigError("no complete results to analyze in '" + cfg.results_dir + "'");

  const std::int64_t horizon = manifest.horizon;
  const std::vector<std::int64_t> cps = checkpoint_rounds(horizon);
  const std::size_t num_cps = cps.size();
  const std::size_t num_policies = policy_order.size();

  std::vector<std::vector<std::vector<std::vector<double>>>> perf;  // [task][policy][rep][cp]
  std::vector<std::vector<std::vector<double>>> regret_rows;        // [task][policy][cp]
  std::vector<std::vector<std::vector<double>>> pull_rows;          // [task][policy][arm]
  std::vector<std::vector<std::map<int, double>>> final_best;       // [task][policy]{rep: value}

  for (const std::string& task : tasks) {
    const ResultsData results = parse_results_csv(rdir / (task + ".results.csv"), horizon);
    const OracleData oracle = parse_oracle_csv(rdir / (task + ".oracle.csv"), horizon);
    if (oracle.empty())
      throw ConfigError("oracle file for task '" + task + "' has no data rows");
    const int num_arms = oracle.rbegin()->first + 1;

    // Mean best-so-far per arm at the checkpoints.
    std::vector<std::vector<double>> oracle_mean(
        static_cast<std::size_t>(num_arms), std::vector<double>(num_cps, 0.0));
    for (int arm = 0; arm < num_arms; ++arm) {
      const auto it = oracle.find(arm);
      if (it == oracle.end() || it->second.empty())
        throw ConfigError("oracle file for task '" + task + "' is missing arm " +
                          std::to_string(arm));
      for (const auto& [rep, seq] : it->second) {
        const std::vector<double> curve = max_so_far(seq);
        for (std::size_t cp = 0; cp < num_cps; ++cp)
          oracle_mean[static_cast<std::size_t>(arm)][cp] += value_at(curve, cps[cp]);
      }
      for (std::size_t cp = 0; cp < num_cps; ++cp)
        oracle_mean[static_cast<std::size_t>(arm)][cp] /=
            static_cast<double>(it->second.size());
    }
    std::vector<double> best_reference(num_cps, -std::numeric_limits<double>::infinity());
    for (int arm = 0; arm < num_arms; ++arm)
      for (std::size_t cp = 0; cp < num_cps; ++cp)
        best_reference[cp] =
            std::max(best_reference[cp], oracle_mean[static_cast<std::size_t>(arm)][cp]);

    perf.emplace_back();
    regret_rows.emplace_back();
    pull_rows.emplace_back();
    final_best.emplace_back(num_policies);
    auto& task_perf = perf.back();
    auto& task_regret = regret_rows.back();
    auto& task_pulls = pull_rows.back();

    for (std::size_t p = 0; p < num_policies; ++p) {
      const std::string& policy = policy_order[p];
      const auto pit = results.rewards.find(policy);
      if (pit == results.rewards.end() || pit->second.empty())
        throw ConfigError("results file for task '" + task + "' has no rows for policy '" +
                          policy + "' although the manifest marks cells complete");
      task_perf.emplace_back();
      auto& policy_perf = task_perf.back();
      std::vector<double> mean_at(num_cps, 0.0);
      std::vector<double> mean_pulls(static_cast<std::size_t>(num_arms), 0.0);
      for (const auto& [rep, seq] : pit->second) {
        const std::vector<double> curve = max_so_far(seq);
        std::vector<double> row(num_cps);
        for (std::size_t cp = 0; cp < num_cps; ++cp) {
          row[cp] = value_at(curve, cps[cp]);
          mean_at[cp] += row[cp];
        }
        final_best.back()[p][rep] = value_at(curve, horizon);
        policy_perf.push_back(std::move(row));
        for (int arm : results.arms.at(policy).at(rep)) {
          if (arm < 0 || arm >= num_arms)
            throw ConfigError("results file for task '" + task + "' references arm " +
                              std::to_string(arm) + " outside the oracle's arm range");
          mean_pulls[static_cast<std::size_t>(arm)] += 1.0;
        }
      }
      const double rep_count = static_cast<double>(pit->second.size());
      std::vector<double> regret(num_cps);
      for (std::size_t cp = 0; cp < num_cps; ++cp)
        regret[cp] = best_reference[cp] - mean_at[cp] / rep_count;
      for (double& v : mean_pulls) v /= rep_count;
      task_regret.push_back(std::move(regret));
      task_pulls.push_back(std::move(mean_pulls));
    }
  }

  const auto dir = ensure_out_dir(opts.out_dir);

  const std::vector<RankSummaryRow> rank_rows =
      bootstrap_average_rank(perf, policy_order, cps, cfg.bootstrap_iterations,
                             label_seed(manifest.base_seed, "bootstrap-ranks", 0));
  std::string ranks_csv = "policy,t,mean_rank,ci_lo,ci_hi\n";
  for (const RankSummaryRow& row : rank_rows) {
    ranks_csv += row.policy;
    ranks_csv += ',';
    ranks_csv += std::to_string(row.t);
    ranks_csv += ',';
    ranks_csv += format_double(row.mean_rank);
    ranks_csv += ',';
    ranks_csv += format_double(row.ci_lo);
    ranks_csv += ',';
    ranks_csv += format_double(row.ci_hi);
    ranks_csv += '\n';
  }
  write_text_file_atomic(dir / "ranks.csv", ranks_csv);

  const std::size_t ref_index = static_cast<std::size_t>(
      std::find(policy_order.begin(), policy_order.end(), cfg.reference) - policy_order.begin());
  std::string wtl_csv = "policy,reference,wins,ties,losses,p_value\n";
  for (std::size_t p = 0; p < num_policies; ++p) {
    std::vector<double> candidate;
    std::vector<double> reference;
    for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
      const auto& cand_map = final_best[ti][p];
      const auto& ref_map = final_best[ti][ref_index];
      for (const auto& [rep, value] : cand_map) {
        const auto rit = ref_map.find(rep);
        if (rit == ref_map.end()) continue;  // unpaired repetition under --allow-partial
        candidate.push_back(value);
        reference.push_back(rit->second);
      }
    }
    const WtlRecord rec = wins_ties_losses(candidate, reference);
    wtl_csv += policy_order[p];
    wtl_csv += ',';
    wtl_csv += cfg.reference;
    wtl_csv += ',';
    wtl_csv += std::to_string(rec.wins);
    wtl_csv += ',';
    wtl_csv += std::to_string(rec.ties);
    wtl_csv += ',';
    wtl_csv += std::to_string(rec.losses);
    wtl_csv += ',';
    wtl_csv += format_double(sign_test(rec.wins, rec.losses));
    wtl_csv += '\n';
  }
  write_text_file_atomic(dir / "wtl.csv", wtl_csv);

  std::string regret_csv = "task,policy,t,proxy_regret\n";
  for (std::size_t ti = 0; ti < tasks.size(); ++ti)
    for (std::size_t p = 0; p < num_policies; ++p)
      for (std::size_t cp = 0; cp < num_cps; ++cp) {
        regret_csv += tasks[ti];
        regret_csv += ',';
        regret_csv += policy_order[p];
        regret_csv += ',';
        regret_csv += std::to_string(cps[cp]);
        regret_csv += ',';
        regret_csv += format_double(regret_rows[ti][p][cp]);
        regret_csv += '\n';
      }
  write_text_file_atomic(dir / "regret.csv", regret_csv);

  std::string pulls_csv = "task,policy,arm,mean_pulls\n";
  for (std::size_t ti = 0; ti < tasks.size(); ++ti)
    for (std::size_t p = 0; p < num_policies; ++p)
      for (std::size_t arm = 0; arm < pull_rows[ti][p].size(); ++arm) {
        pulls_csv += tasks[ti];
        pulls_csv += ',';
        pulls_csv += policy_order[p];
        pulls_csv += ',';
        pulls_csv += std::to_string(arm);
        pulls_csv += ',';
        pulls_csv += format_double(pull_rows[ti][p][arm]);
        pulls_csv += '\n';
      }
  write_text_file_atomic(dir / "pulls.csv", pulls_csv);

  std::cout << "wrote " << (dir / "ranks.csv").string() << ", " << (dir / "wtl.csv").string()
            << ", " << (dir / "regret.csv").string() << ", " << (dir / "pulls.csv").string()
            << "\n";
  return 0;
}

// ---- bench ---------------------------------------------------------------------

BenchResult run_bench(const TaskSpec& task, const std::vector<PolicyConfig>& policies,
                      std::int64_t horizon, int repetitions, std::uint64_t base_seed,
                      const std::vector<std::int64_t>& checkpoints, int parallelism) {
  const int num_arms = static_cast<int>(task.arms.size());
  if (num_arms < 1) throw ConfigError("bench task has no arms");
  if (policies.empty()) throw ConfigError("bench needs at least one policy");
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (horizon < num_arms)
    throw ConfigError("horizon " + std::to_string(horizon) +
                      " is smaller than the arm count of task '" + task.task_id + "'");
  if (checkpoints.empty()) throw ConfigError("no checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > horizon)
      throw ConfigError("checkpoint out of range");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw ConfigError("checkpoints must be strictly increasing");
  }

  TraceStore store;
  store.preload(task);
  for (const PolicyConfig& policy : policies) {
    make_policy(policy, num_arms);
    if (policy.name == "maxucb") {
      const std::int64_t c = policy.burn_in_c.value_or(0);
      if ((c + 1) * num_arms > horizon)
        throw ConfigError("policy '" + policy.effective_id() + "' needs at least " +
                          std::to_string((c + 1) * num_arms) + " rounds on task '" + task.task_id +
                          "' (burn-in plus initialization), but horizon is " +
                          std::to_string(horizon));
    }
  }

  const std::size_t num_cps = checkpoints.size();
  const std::size_t num_policies = policies.size();
  const std::size_t reps = static_cast<std::size_t>(repetitions);

  BenchResult out;
  out.task_id = task.task_id;
  out.checkpoints = checkpoints;
  for (const PolicyConfig& policy : policies) out.policy_ids.push_back(policy.effective_id());

  // Phase 1: single-arm reference episodes, reduced to best-so-far snapshots.
  std::vector<std::vector<std::vector<double>>> oracle_max(
      static_cast<std::size_t>(num_arms),
      std::vector<std::vector<double>>(reps, std::vector<double>(num_cps, 0.0)));
  parallel_for(static_cast<std::size_t>(num_arms) * reps, parallelism, [&](std::size_t idx) {
    const int arm = static_cast<int>(idx / reps);
    const std::uint32_t rep = static_cast<std::uint32_t>(idx % reps);
    BanditEnvironment env(task, store, base_seed, rep);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t cp = 0;
    for (std::int64_t t = 1; t <= horizon; ++t) {
      const double r = env.pull(arm);
      if (!std::isfinite(r))
        throw EnvironmentError("environment emitted a non-finite reward for task '" +
                               task.task_id + "' arm " + std::to_string(arm) + " at round " +
                               std::to_string(t));
      best = std::max(best, r);
      while (cp < num_cps && checkpoints[cp] == t) {
        oracle_max[static_cast<std::size_t>(arm)][rep][cp] = best;
        ++cp;
      }
    }
  });

  std::vector<std::vector<double>> oracle_mean(static_cast<std::size_t>(num_arms),
                                               std::vector<double>(num_cps, 0.0));
  for (int arm = 0; arm < num_arms; ++arm)
    for (std::size_t r = 0; r < reps; ++r)
      for (std::size_t cp = 0; cp < num_cps; ++cp)
        oracle_mean[static_cast<std::size_t>(arm)][cp] +=
            oracle_max[static_cast<std::size_t>(arm)][r][cp] / static_cast<double>(reps);
  out.optimal_arm_at.resize(num_cps);
  std::vector<double> best_reference(num_cps);
  std::vector<double> column(static_cast<std::size_t>(num_arms));
  for (std::size_t cp = 0; cp < num_cps; ++cp) {
    for (int arm = 0; arm < num_arms; ++arm)
      column[static_cast<std::size_t>(arm)] = oracle_mean[static_cast<std::size_t>(arm)][cp];
    out.optimal_arm_at[cp] = argmax_lowest_index(column);
    best_reference[cp] = column[static_cast<std::size_t>(out.optimal_arm_at[cp])];
  }

  // Phase 2: policy episodes, reduced per cell to checkpoint snapshots.
  std::vector<std::vector<double>> cell_max(num_policies * reps,
                                            std::vector<double>(num_cps, 0.0));
  std::vector<std::vector<std::int64_t>> cell_opt_pulls(
      num_policies * reps, std::vector<std::int64_t>(num_cps, 0));
  std::vector<std::vector<std::int64_t>> cell_final_pulls(
      num_policies * reps, std::vector<std::int64_t>(static_cast<std::size_t>(num_arms), 0));
  parallel_for(num_policies * reps, parallelism, [&](std::size_t idx) {
    const std::size_t p = idx / reps;
    const std::uint32_t rep = static_cast<std::uint32_t>(idx % reps);
    BanditEnvironment env(task, store, base_seed, rep);
    const std::unique_ptr<Policy> policy = make_policy(policies[p], num_arms);
    RngStream policy_rng(
        policy_seed(base_seed, task.task_id, policies[p].effective_id(), rep));
    std::vector<std::int64_t> counts(static_cast<std::size_t>(num_arms), 0);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t cp = 0;
    for (std::int64_t t = 1; t <= horizon; ++t) {
      const int arm = policy->select(t, policy_rng);
      if (arm < 0 || arm >= num_arms)
        throw std::logic_error("policy selected an out-of-range arm");
      const double r = env.pull(arm);
      if (!std::isfinite(r))
        throw EnvironmentError("environment emitted a non-finite reward for task '" +
                               task.task_id + "' arm " + std::to_string(arm) + " at round " +
                               std::to_string(t));
      policy->observe(arm, r);
      ++counts[static_cast<std::size_t>(arm)];
      best = std::max(best, r);
      while (cp < num_cps && checkpoints[cp] == t) {
        cell_max[idx][cp] = best;
        cell_opt_pulls[idx][cp] =
            counts[static_cast<std::size_t>(out.optimal_arm_at[cp])];
        ++cp;
      }
    }
    cell_final_pulls[idx] = std::move(counts);
  });

  out.mean_max.assign(num_policies, std::vector<double>(num_cps, 0.0));
  out.regret.assign(num_policies, std::vector<double>(num_cps, 0.0));
  out.mean_optimal_pulls.assign(num_policies, std::vector<double>(num_cps, 0.0));
  out.mean_final_pulls.assign(num_policies,
                              std::vector<double>(static_cast<std::size_t>(num_arms), 0.0));
  for (std::size_t p = 0; p < num_policies; ++p) {
    for (std::size_t r = 0; r < reps; ++r) {
      const std::size_t idx = p * reps + r;
      for (std::size_t cp = 0; cp < num_cps; ++cp) {
        out.mean_max[p][cp] += cell_max[idx][cp] / static_cast<double>(reps);
        out.mean_optimal_pulls[p][cp] +=
            static_cast<double>(cell_opt_pulls[idx][cp]) / static_cast<double>(reps);
      }
      for (int arm = 0; arm < num_arms; ++arm)
        out.mean_final_pulls[p][static_cast<std::size_t>(arm)] +=
            static_cast<double>(cell_final_pulls[idx][static_cast<std::size_t>(arm)]) /
            static_cast<double>(reps);
    }
    for (std::size_t cp = 0; cp < num_cps; ++cp)
      out.regret[p][cp] = best_reference[cp] - out.mean_max[p][cp];
  }
  return out;
}

int cmd_bench(const CommandOptions& opts) {
  const std::string raw = read_text_file(opts.config_path);
  BenchConfig cfg = parse_bench_config(raw);
  cfg.base_seed = effective_seed(opts, cfg.base_seed);

  const TaskSpec task = builtin_experiment(cfg.experiment);
  std::vector<PolicyConfig> policies(3);
  policies[0].name = "maxucb";
  policies[0].alpha = 0.5;
  policies[1].name = "ucb";
  policies[1].alpha = 0.5;
  policies[2].name = "random";

  const std::vector<std::int64_t> cps = checkpoint_rounds(cfg.horizon);
  const BenchResult res = run_bench(task, policies, cfg.horizon, cfg.repetitions, cfg.base_seed,
                                    cps, opts.parallelism);

  const auto dir = ensure_out_dir(opts.out_dir);

  std::string regret_csv = "task,policy,t,proxy_regret\n";
  std::string opt_pulls_csv = "task,policy,t,mean_optimal_pulls\n";
  for (std::size_t p = 0; p < res.policy_ids.size(); ++p)
    for (std::size_t cp = 0; cp < cps.size(); ++cp) {
      const std::string prefix =
          res.task_id + "," + res.policy_ids[p] + "," + std::to_string(cps[cp]) + ",";
      regret_csv += prefix + format_double(res.regret[p][cp]) + "\n";
      opt_pulls_csv += prefix + format_double(res.mean_optimal_pulls[p][cp]) + "\n";
    }
  std::string pulls_csv = "task,policy,arm,mean_pulls\n";
  for (std::size_t p = 0; p < res.policy_ids.size(); ++p)
    for (std::size_t arm = 0; arm < res.mean_final_pulls[p].size(); ++arm)
      pulls_csv += res.task_id + "," + res.policy_ids[p] + "," + std::to_string(arm) + "," +
                   format_double(res.mean_final_pulls[p][arm]) + "\n";

  write_text_file_atomic(dir / "regret.csv", regret_csv);
  write_text_file_atomic(dir / "optimal_pulls.csv", opt_pulls_csv);
  write_text_file_atomic(dir / "pulls.csv", pulls_csv);
  std::cout << "wrote " << (dir / "regret.csv").string() << ", "
            << (dir / "optimal_pulls.csv").string() << ", " << (dir / "pulls.csv").string()
            << "\n";
  return 0;
}

}  // namespace extbandit
