#include "extbandit/environments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

namespace extbandit {

std::string to_string(ArmKind kind) {
  switch (kind) {
    case ArmKind::pareto: return "pareto";
    case ArmKind::exponential: return "exponential";
    case ArmKind::gaussian: return "gaussian";
    case ArmKind::truncated_gaussian: return "truncated_gaussian";
    case ArmKind::truncated_uniform: return "truncated_uniform";
    case ArmKind::power: return "power";
    case ArmKind::inverse_cdf_poly: return "inverse_cdf_poly";
    case ArmKind::constant: return "constant";
    case ArmKind::trace: return "trace";
  }
  return "?";
}

std::string to_string(RewardTransform t) {
  switch (t) {
    case RewardTransform::negate: return "negate";
    case RewardTransform::one_minus: return "one_minus";
    case RewardTransform::identity: return "identity";
  }
  return "?";
}

ArmKind arm_kind_from_string(const std::string& s) {
  if (s == "pareto") return ArmKind::pareto;
  if (s == "exponential") return ArmKind::exponential;
  if (s == "gaussian") return ArmKind::gaussian;
  if (s == "truncated_gaussian") return ArmKind::truncated_gaussian;
  if (s == "truncated_uniform") return ArmKind::truncated_uniform;
  if (s == "power") return ArmKind::power;
  if (s == "inverse_cdf_poly") return ArmKind::inverse_cdf_poly;
  if (s == "constant") return ArmKind::constant;
  if (s == "trace") return ArmKind::trace;
  throw ConfigError("unknown arm kind '" + s + "'");
}

RewardTransform transform_from_string(const std::string& s) {
  if (s == "negate") return RewardTransform::negate;
  if (s == "one_minus") return RewardTransform::one_minus;
  if (s == "identity") return RewardTransform::identity;
  throw ConfigError("unknown reward_transform '" + s + "' (expected negate, one_minus or identity)");
}

ArmSpec ArmSpec::pareto(double lambda) { return ArmSpec{ArmKind::pareto, lambda, 0.0, "", -1, RewardTransform::negate}; }
ArmSpec ArmSpec::exponential(double lambda) { return ArmSpec{ArmKind::exponential, lambda, 0.0, "", -1, RewardTransform::negate}; }
ArmSpec ArmSpec::gaussian(double mu, double sigma) { return ArmSpec{ArmKind::gaussian, mu, sigma, "", -1, RewardTransform::negate}; }
ArmSpec ArmSpec::truncated_gaussian(double mu, double sigma) { return ArmSpec{ArmKind::truncated_gaussian, mu, sigma, "", -1, RewardTransform::negate}; }
ArmSpec ArmSpec::truncated_uniform(double a, double b) { return ArmSpec{ArmKind::truncated_uniform, a, b, "", -1, RewardTransform::negate}; }
ArmSpec ArmSpec::power(double shape, double scale) { return ArmSpec{ArmKind::power, shape, scale, "", -1, RewardTransform::negate}; }
ArmSpec ArmSpec::inverse_cdf_poly(double p) { return ArmSpec{ArmKind::inverse_cdf_poly, p, 0.0, "", -1, RewardTransform::negate}; }
ArmSpec ArmSpec::constant(double value) { return ArmSpec{ArmKind::constant, value, 0.0, "", -1, RewardTransform::negate}; }
ArmSpec ArmSpec::trace(std::string file, int arm, RewardTransform transform) {
  ArmSpec s;
  s.kind = ArmKind::trace;
  s.trace_file = std::move(file);
  s.trace_arm = arm;
  s.transform = transform;
  return s;
}

void ArmSpec::validate() const {
  const auto fail = [this](const std::string& what) {
    throw ConfigError("invalid " + extbandit::to_string(kind) + " arm: " + what);
  };
  const auto finite = [&](double v, const char* name) {
    if (!std::isfinite(v)) fail(std::string(name) + " must be finite");
  };
  switch (kind) {
    case ArmKind::pareto:
      finite(p1, "lambda");
      if (!(p1 > 1.0)) fail("tail parameter lambda must be > 1");
      break;
    case ArmKind::exponential:
      finite(p1, "lambda");
      if (!(p1 > 0.0)) fail("rate lambda must be > 0");
      break;
    case ArmKind::gaussian:
      finite(p1, "mu");
      finite(p2, "sigma");
      if (!(p2 > 0.0)) fail("sigma must be > 0");
      break;
    case ArmKind::truncated_gaussian:
      finite(p1, "mu");
      finite(p2, "sigma");
      if (!(p2 > 0.0)) fail("sigma must be > 0");
      break;
    case ArmKind::truncated_uniform:
      finite(p1, "a");
      finite(p2, "b");
      if (!(p1 < p2)) fail("bounds must satisfy a < b");
      break;
    case ArmKind::power:
      finite(p1, "shape");
      finite(p2, "scale");
      if (!(p1 >= 1.0)) fail("shape a must be >= 1");
      if (!(p2 > 0.0)) fail("scale c must be > 0");
      break;
    case ArmKind::inverse_cdf_poly:
      finite(p1, "p");
      if (!(p1 > 0.0)) fail("exponent p must be > 0");
      break;
    case ArmKind::constant:
      finite(p1, "value");
      break;
    case ArmKind::trace:
      if (trace_file.empty()) fail("trace file path must be non-empty");
      if (trace_arm < 0) fail("trace arm id must be >= 0");
      break;
  }
}

// ---- transforms -------------------------------------------------------------

double pareto_transform(double lambda, double u) { return std::pow(u, -1.0 / lambda); }

double exponential_transform(double lambda, double u) {
  return (0.0 - std::log(u)) / lambda;  // "+0.0" keeps the u=1 endpoint at plain zero
}

double power_transform(double shape, double scale, double u) {
  return scale * std::pow(u, 1.0 / shape);
}

double inverse_cdf_poly_transform(double p, double u) { return std::pow(u, 1.0 / p); }

double truncated_uniform_transform(double a, double b, double u) { return a + (b - a) * u; }

// ---- samplers ---------------------------------------------------------------

double sample_pareto(double lambda, RngStream& rng) {
  return pareto_transform(lambda, rng.uniform_oc());
}

double sample_exponential(double lambda, RngStream& rng) {
  return exponential_transform(lambda, rng.uniform_oc());
}

double sample_gaussian(double mu, double sigma, RngStream& rng) {
  return mu + sigma * rng.normal();
}

double sample_truncated_gaussian(double mu, double sigma, RngStream& rng) {
  // Exact rejection; acceptance probability is Phi((1-mu)/sigma) - Phi(-mu/sigma),
  // comfortably large for every parameterization the toolkit ships.
  constexpr int kMaxAttempts = 1000000;
  for (int i = 0; i < kMaxAttempts; ++i) {
    const double x = mu + sigma * rng.normal();
    if (x >= 0.0 && x <= 1.0) return x;
  }
  std::ostringstream msg;
  msg << "truncated-gaussian rejection sampling exceeded the attempt limit (mu=" << mu
      << ", sigma=" << sigma << ")";
  throw EnvironmentError(msg.str());
}

double sample_truncated_uniform(double a, double b, RngStream& rng) {
  return truncated_uniform_transform(a, b, rng.uniform_oc());
}

double sample_power(double shape, double scale, RngStream& rng) {
  return power_transform(shape, scale, rng.uniform_oc());
}

double sample_inverse_cdf_poly(double p, RngStream& rng) {
  return inverse_cdf_poly_transform(p, rng.uniform_oc());
}

double sample_arm(const ArmSpec& spec, RngStream& rng) {
  switch (spec.kind) {
    case ArmKind::pareto: return sample_pareto(spec.p1, rng);
    case ArmKind::exponential: return sample_exponential(spec.p1, rng);
    case ArmKind::gaussian: return sample_gaussian(spec.p1, spec.p2, rng);
    case ArmKind::truncated_gaussian: return sample_truncated_gaussian(spec.p1, spec.p2, rng);
    case ArmKind::truncated_uniform: return sample_truncated_uniform(spec.p1, spec.p2, rng);
    case ArmKind::power: return sample_power(spec.p1, spec.p2, rng);
    case ArmKind::inverse_cdf_poly: return sample_inverse_cdf_poly(spec.p1, rng);
    case ArmKind::constant: return spec.p1;
    case ArmKind::trace: break;
  }
  throw std::logic_error("sample_arm: trace arms are replayed, not sampled");
}

// ---- trace loading ------------------------------------------------------------

namespace {

bool parse_int_strict(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

bool parse_double_strict(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

struct TraceRow {
  std::int64_t arm, rep, iter;
  double loss;
  std::int64_t line;
};

[[noreturn]] void trace_error(const std::filesystem::path& path, const std::string& what) {
  throw EnvironmentError("trace file '" + path.string() + "': " + what);
}

}  // namespace

TraceTable load_trace_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) trace_error(path, "cannot open file");

  std::string line;
  std::int64_t line_no = 0;

  if (!std::getline(in, line)) trace_error(path, "empty file (missing header)");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "arm_id,repetition,iteration,loss")
    trace_error(path, "missing or misnamed columns at line 1: expected header "
                      "'arm_id,repetition,iteration,loss', got '" + line + "'");

  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 4)
      trace_error(path, "malformed row at line " + std::to_string(line_no) + ": expected 4 fields, got " +
                        std::to_string(fields.size()));
    TraceRow row{};
    row.line = line_no;
    if (!parse_int_strict(fields[0], row.arm) || row.arm < 0)
      trace_error(path, "malformed row at line " + std::to_string(line_no) +
                        ": arm_id must be a non-negative integer, got '" + fields[0] + "'");
    if (!parse_int_strict(fields[1], row.rep) || row.rep < 0)
      trace_error(path, "malformed row at line " + std::to_string(line_no) +
                        ": repetition must be a non-negative integer, got '" + fields[1] + "'");
    if (!parse_int_strict(fields[2], row.iter))
      trace_error(path, "malformed row at line " + std::to_string(line_no) +
                        ": iteration must be an integer, got '" + fields[2] + "'");
    if (!parse_double_strict(fields[3], row.loss))
      trace_error(path, "malformed row at line " + std::to_string(line_no) +
                        ": loss must be a decimal literal, got '" + fields[3] + "'");
    if (!std::isfinite(row.loss))
      trace_error(path, "non-finite loss at line " + std::to_string(line_no));
    rows.push_back(row);
  }
  if (rows.empty()) trace_error(path, "no data rows");

  std::int64_t max_arm = 0, max_rep = 0;
  for (const TraceRow& r : rows) {
    max_arm = std::max(max_arm, r.arm);
    max_rep = std::max(max_rep, r.rep);
  }
  const int num_arms = static_cast<int>(max_arm + 1);
  const int num_reps = static_cast<int>(max_rep + 1);

  std::vector<std::vector<std::vector<TraceRow>>> buckets(
      static_cast<std::size_t>(num_arms),
      std::vector<std::vector<TraceRow>>(static_cast<std::size_t>(num_reps)));
  for (const TraceRow& r : rows)
    buckets[static_cast<std::size_t>(r.arm)][static_cast<std::size_t>(r.rep)].push_back(r);

  TraceTable table;
  table.task_id = path.stem().string();
  table.num_arms = num_arms;
  table.num_repetitions = num_reps;
  table.sequences.assign(static_cast<std::size_t>(num_arms),
                         std::vector<std::vector<double>>(static_cast<std::size_t>(num_reps)));

  for (int a = 0; a < num_arms; ++a) {
    for (int r = 0; r < num_reps; ++r) {
      auto& bucket = buckets[static_cast<std::size_t>(a)][static_cast<std::size_t>(r)];
      if (bucket.empty())
        trace_error(path, "missing sequence: no rows for arm " + std::to_string(a) +
                          " repetition " + std::to_string(r));
      std::stable_sort(bucket.begin(), bucket.end(),
                       [](const TraceRow& x, const TraceRow& y) { return x.iter < y.iter; });
      for (std::size_t j = 0; j < bucket.size(); ++j) {
        if (j > 0 && bucket[j].iter == bucket[j - 1].iter)
          trace_error(path, "duplicate (arm, repetition, iteration) key (" + std::to_string(a) +
                            ", " + std::to_string(r) + ", " + std::to_string(bucket[j].iter) +
                            ") at line " + std::to_string(bucket[j].line));
        const std::int64_t expected = static_cast<std::int64_t>(j) + 1;
        if (bucket[j].iter != expected)
          trace_error(path, "gap in iteration numbering for arm " + std::to_string(a) +
                            " repetition " + std::to_string(r) + ": expected iteration " +
                            std::to_string(expected) + ", found " + std::to_string(bucket[j].iter) +
                            " at line " + std::to_string(bucket[j].line));
      }
      auto& seq = table.sequences[static_cast<std::size_t>(a)][static_cast<std::size_t>(r)];
      seq.reserve(bucket.size());
      for (const TraceRow& row : bucket) seq.push_back(row.loss);
      table.max_length = std::max(table.max_length, static_cast<std::int64_t>(seq.size()));
    }
  }
  return table;
}

void TraceStore::preload(const TaskSpec& task) {
  for (const ArmSpec& arm : task.arms) {
    if (arm.kind != ArmKind::trace) continue;
    if (tables_.count(arm.trace_file)) continue;
    tables_.emplace(arm.trace_file, load_trace_table(arm.trace_file));
  }
}

bool TraceStore::contains(const std::string& file) const { return tables_.count(file) > 0; }

const TraceTable& TraceStore::get(const std::string& file) const {
  auto it = tables_.find(file);
  if (it == tables_.end())
    throw EnvironmentError("trace file '" + file + "' was not preloaded");
  return it->second;
}

// ---- environment ---------------------------------------------------------------

double apply_reward_transform(RewardTransform t, double loss) {
  switch (t) {
    case RewardTransform::negate: return -loss;
    case RewardTransform::one_minus: return 1.0 - loss;
    case RewardTransform::identity: return loss;
  }
  return loss;
}

BanditEnvironment::BanditEnvironment(const TaskSpec& task, const TraceStore& store,
                                     std::uint64_t base_seed, std::uint32_t repetition)
    : task_id_(task.task_id) {
  arms_.reserve(task.arms.size());
  for (std::size_t i = 0; i < task.arms.size(); ++i) {
    const ArmSpec& spec = task.arms[i];
    spec.validate();
    ArmRuntime rt;
    rt.spec = spec;
    if (spec.kind == ArmKind::trace) {
      const TraceTable& table = store.get(spec.trace_file);
      if (spec.trace_arm >= table.num_arms)
        throw EnvironmentError("task '" + task_id_ + "': trace arm " +
                               std::to_string(spec.trace_arm) + " not present in '" +
                               spec.trace_file + "' (file declares " +
                               std::to_string(table.num_arms) + " arms)");
      // Episode repetitions beyond the recorded count wrap around deterministically.
      const int rep = static_cast<int>(repetition % static_cast<std::uint32_t>(table.num_repetitions));
      rt.sequence = &table.sequences[static_cast<std::size_t>(spec.trace_arm)]
                                    [static_cast<std::size_t>(rep)];
    } else {
      rt.rng.emplace(env_arm_seed(base_seed, task_id_, repetition, static_cast<int>(i)));
    }
    arms_.push_back(std::move(rt));
  }
}

double BanditEnvironment::pull(int arm) {
  if (arm < 0 || arm >= num_arms())
    throw std::logic_error("pull: arm " + std::to_string(arm) + " out of range");
  ArmRuntime& rt = arms_[static_cast<std::size_t>(arm)];
  if (rt.spec.kind == ArmKind::trace) {
    if (rt.cursor >= static_cast<std::int64_t>(rt.sequence->size()))
      throw TraceExhaustedError(task_id_, arm, rt.cursor + 1);
    const double loss = (*rt.sequence)[static_cast<std::size_t>(rt.cursor++)];
    return apply_reward_transform(rt.spec.transform, loss);
  }
  return sample_arm(rt.spec, *rt.rng);
}

}  // namespace extbandit
