#include "extbandit/config.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "json.hpp"

#include "extbandit/csv.hpp"

namespace extbandit {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

void check_keys(const json& obj, const std::string& where,
                const std::vector<std::string>& allowed,
                const std::vector<std::string>& required) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
  for (const std::string& key : required) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
  }
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("'" + key + "' in " + where + " must be a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw ConfigError("'" + key + "' in " + where + " must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t get_seed(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const std::int64_t s = v.get<std::int64_t>();
    if (s < 0) throw ConfigError("'" + key + "' in " + where + " must be non-negative");
    return static_cast<std::uint64_t>(s);
  }
  throw ConfigError("'" + key + "' in " + where + " must be an unsigned integer");
}

std::string get_string(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError("'" + key + "' in " + where + " must be a string");
  return v.get<std::string>();
}

ArmSpec parse_arm_spec(const json& node, const std::string& where) {
  if (!node.is_object()) throw ConfigError(where + " must be an object");
  if (!node.contains("kind")) throw ConfigError("missing key 'kind' in " + where);
  const ArmKind kind = arm_kind_from_string(get_string(node, "kind", where));

  ArmSpec spec;
  switch (kind) {
    case ArmKind::pareto:
      check_keys(node, where, {"kind", "lambda"}, {"kind", "lambda"});
      spec = ArmSpec::pareto(get_number(node, "lambda", where));
      break;
    case ArmKind::exponential:
      check_keys(node, where, {"kind", "lambda"}, {"kind", "lambda"});
      spec = ArmSpec::exponential(get_number(node, "lambda", where));
      break;
    case ArmKind::gaussian:
      check_keys(node, where, {"kind", "mu", "sigma"}, {"kind", "mu", "sigma"});
      spec = ArmSpec::gaussian(get_number(node, "mu", where), get_number(node, "sigma", where));
      break;
    case ArmKind::truncated_gaussian:
      check_keys(node, where, {"kind", "mu", "sigma"}, {"kind", "mu", "sigma"});
      spec = ArmSpec::truncated_gaussian(get_number(node, "mu", where),
                                         get_number(node, "sigma", where));
      break;
    case ArmKind::truncated_uniform:
      check_keys(node, where, {"kind", "a", "b"}, {"kind", "a", "b"});
      spec = ArmSpec::truncated_uniform(get_number(node, "a", where), get_number(node, "b", where));
      break;
    case ArmKind::power:
      check_keys(node, where, {"kind", "shape", "scale"}, {"kind", "shape", "scale"});
      spec = ArmSpec::power(get_number(node, "shape", where), get_number(node, "scale", where));
      break;
    case ArmKind::inverse_cdf_poly:
      check_keys(node, where, {"kind", "p"}, {"kind", "p"});
      spec = ArmSpec::inverse_cdf_poly(get_number(node, "p", where));
      break;
    case ArmKind::constant:
      check_keys(node, where, {"kind", "value"}, {"kind", "value"});
      spec = ArmSpec::constant(get_number(node, "value", where));
      break;
    case ArmKind::trace: {
      check_keys(node, where, {"kind", "file", "arm", "reward_transform"}, {"kind", "file", "arm"});
      RewardTransform transform = RewardTransform::negate;
      if (node.contains("reward_transform"))
        transform = transform_from_string(get_string(node, "reward_transform", where));
      const std::int64_t arm = get_integer(node, "arm", where);
      if (arm < 0) throw ConfigError("'arm' in " + where + " must be >= 0");
      spec = ArmSpec::trace(get_string(node, "file", where), static_cast<int>(arm), transform);
      break;
    }
  }
  spec.validate();
  return spec;
}

PolicyConfig parse_policy_config(const json& node, const std::string& where) {
  check_keys(node, where, {"name", "id", "alpha", "exponent_m", "burn_in_c", "params"}, {"name"});
  PolicyConfig cfg;
  cfg.name = get_string(node, "name", where);
  if (cfg.name.empty()) throw ConfigError("'name' in " + where + " must be non-empty");
  if (node.contains("id")) {
    cfg.id = get_string(node, "id", where);
    if (cfg.id.empty()) throw ConfigError("'id' in " + where + " must be non-empty when given");
  }
  if (node.contains("alpha")) cfg.alpha = get_number(node, "alpha", where);
  if (node.contains("exponent_m")) cfg.exponent_m = get_number(node, "exponent_m", where);
  if (node.contains("burn_in_c")) cfg.burn_in_c = get_integer(node, "burn_in_c", where);
  if (node.contains("params")) {
    const json& params = node.at("params");
    if (!params.is_object()) throw ConfigError("'params' in " + where + " must be an object");
    for (const auto& item : params.items()) {
      const json& v = item.value();
      if (v.is_string())
        cfg.params[item.key()] = v.get<std::string>();
      else if (v.is_number_integer() || v.is_number_unsigned())
        cfg.params[item.key()] = std::to_string(v.get<std::int64_t>());
      else if (v.is_number())
        cfg.params[item.key()] = format_double(v.get<double>());
      else
        throw ConfigError("param '" + item.key() + "' in " + where +
                          " must be a string or a number");
    }
  }
  return cfg;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  const json root = parse_json(json_text);
  check_keys(root, "config",
             {"base_seed", "horizon", "repetitions", "shape_samples", "tasks", "policies"},
             {"base_seed", "horizon", "repetitions", "tasks"});

  ExperimentConfig cfg;
  cfg.base_seed = get_seed(root, "base_seed", "config");
  cfg.horizon = get_integer(root, "horizon", "config");
  if (cfg.horizon < 1) throw ConfigError("'horizon' must be >= 1");
  const std::int64_t reps = get_integer(root, "repetitions", "config");
  if (reps < 1) throw ConfigError("'repetitions' must be >= 1");
  if (reps > 1000000) throw ConfigError("'repetitions' is implausibly large");
  cfg.repetitions = static_cast<int>(reps);
  if (root.contains("shape_samples")) {
    cfg.shape_samples = get_integer(root, "shape_samples", "config");
    if (cfg.shape_samples < 1) throw ConfigError("'shape_samples' must be >= 1");
  }

  const json& tasks = root.at("tasks");
  if (!tasks.is_array() || tasks.empty())
    throw ConfigError("'tasks' must be a non-empty array");
  std::set<std::string> task_ids;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::string where = "tasks[" + std::to_string(i) + "]";
    const json& node = tasks[i];
    check_keys(node, where, {"task_id", "arms"}, {"task_id", "arms"});
    TaskSpec task;
    task.task_id = get_string(node, "task_id", where);
    if (task.task_id.empty()) throw ConfigError("'task_id' in " + where + " must be non-empty");
    if (!task_ids.insert(task.task_id).second)
      throw ConfigError("duplicate task_id '" + task.task_id + "'");
    const json& arms = node.at("arms");
    if (!arms.is_array() || arms.size() < 2)
      throw ConfigError("'arms' in " + where + " must be an array with at least 2 arms");
    for (std::size_t a = 0; a < arms.size(); ++a)
      task.arms.push_back(parse_arm_spec(arms[a], where + ".arms[" + std::to_string(a) + "]"));
    if (cfg.horizon < static_cast<std::int64_t>(task.arms.size()))
      throw ConfigError("horizon " + std::to_string(cfg.horizon) + " is smaller than the arm count of task '" +
                        task.task_id + "' (initialization needs one pull per arm)");
    cfg.tasks.push_back(std::move(task));
  }

  if (root.contains("policies")) {
    const json& policies = root.at("policies");
    if (!policies.is_array()) throw ConfigError("'policies' must be an array");
    std::set<std::string> policy_ids;
    for (std::size_t i = 0; i < policies.size(); ++i) {
      const std::string where = "policies[" + std::to_string(i) + "]";
      PolicyConfig pcfg = parse_policy_config(policies[i], where);
      if (!policy_ids.insert(pcfg.effective_id()).second)
        throw ConfigError("duplicate policy id '" + pcfg.effective_id() + "'");
      // Dry-instantiate to fail fast on unknown names / out-of-domain values.
      make_policy(pcfg, 2);
      // Burn-in must fit the horizon on every task.
      if (pcfg.name == "maxucb") {
        const std::int64_t c = pcfg.burn_in_c.value_or(0);
        for (const TaskSpec& task : cfg.tasks) {
          const std::int64_t k = static_cast<std::int64_t>(task.arms.size());
          if ((c + 1) * k > cfg.horizon)
            throw ConfigError("policy '" + pcfg.effective_id() + "' needs at least " +
                              std::to_string((c + 1) * k) + " rounds on task '" + task.task_id +
                              "' (burn-in plus initialization), but horizon is " +
                              std::to_string(cfg.horizon));
        }
      }
      cfg.policies.push_back(std::move(pcfg));
    }
  }
  return cfg;
}

AnalyzeConfig parse_analyze_config(const std::string& json_text) {
  const json root = parse_json(json_text);
  check_keys(root, "config", {"results_dir", "reference", "bootstrap_iterations"},
             {"results_dir", "reference"});
  AnalyzeConfig cfg;
  cfg.results_dir = get_string(root, "results_dir", "config");
  cfg.reference = get_string(root, "reference", "config");
  if (root.contains("bootstrap_iterations")) {
    const std::int64_t it = get_integer(root, "bootstrap_iterations", "config");
    if (it < 1 || it > 1000000) throw ConfigError("'bootstrap_iterations' must be in [1, 1e6]");
    cfg.bootstrap_iterations = static_cast<int>(it);
  }
  return cfg;
}

BenchConfig parse_bench_config(const std::string& json_text) {
  const json root = parse_json(json_text);
  check_keys(root, "config", {"experiment", "horizon", "repetitions", "base_seed"},
             {"experiment"});
  BenchConfig cfg;
  const std::int64_t exp = get_integer(root, "experiment", "config");
  if (exp < 1 || exp > 4)
    throw ConfigError("unknown experiment id " + std::to_string(exp) + " (expected 1..4)");
  cfg.experiment = static_cast<int>(exp);
  if (root.contains("horizon")) {
    cfg.horizon = get_integer(root, "horizon", "config");
    if (cfg.horizon < 1) throw ConfigError("'horizon' must be >= 1");
  }
  if (root.contains("repetitions")) {
    const std::int64_t reps = get_integer(root, "repetitions", "config");
    if (reps < 1 || reps > 1000000) throw ConfigError("'repetitions' must be in [1, 1e6]");
    cfg.repetitions = static_cast<int>(reps);
  }
  if (root.contains("base_seed")) cfg.base_seed = get_seed(root, "base_seed", "config");
  return cfg;
}

std::string config_digest(const std::string& raw_bytes) {
  const std::uint64_t h = fnv1a64(raw_bytes);
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), h, 16);
  return "fnv1a64:" + std::string(buf, res.ptr);
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag_seed, const char* env_value,
                           std::uint64_t config_seed) {
  if (flag_seed.has_value()) return *flag_seed;
  if (env_value != nullptr) {
    const std::string s(env_value);
    std::uint64_t parsed = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, parsed);
    if (res.ec != std::errc{} || res.ptr != last || s.empty())
      throw ConfigError("EXTBANDIT_SEED is set but not a valid unsigned integer: '" + s + "'");
    return parsed;
  }
  return config_seed;
}

}  // namespace extbandit
