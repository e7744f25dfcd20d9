#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "extbandit/core.hpp"

namespace extbandit {

enum class ArmKind {
  pareto,
  exponential,
  gaussian,
  truncated_gaussian,
  truncated_uniform,
  power,
  inverse_cdf_poly,
  constant,
  trace,
};

// How replayed trace values (stored as losses) are turned into rewards.
enum class RewardTransform { negate, one_minus, identity };

std::string to_string(ArmKind kind);
std::string to_string(RewardTransform t);
ArmKind arm_kind_from_string(const std::string& s);           // throws ConfigError
RewardTransform transform_from_string(const std::string& s);  // throws ConfigError

double apply_reward_transform(RewardTransform t, double loss);

struct ArmSpec {
  ArmKind kind = ArmKind::constant;
  // Kind-specific parameters (see the named constructors below):
  //   pareto/exponential: p1 = lambda
  //   gaussian/truncated_gaussian: p1 = mu, p2 = sigma
  //   truncated_uniform: p1 = a, p2 = b
  //   power: p1 = shape a, p2 = scale c
  //   inverse_cdf_poly: p1 = p
  //   constant: p1 = value
  double p1 = 0.0;
  double p2 = 0.0;
  std::string trace_file;  // kind == trace
  int trace_arm = -1;      // kind == trace
  RewardTransform transform = RewardTransform::negate;  // kind == trace only

  static ArmSpec pareto(double lambda);
  static ArmSpec exponential(double lambda);
  static ArmSpec gaussian(double mu, double sigma);
  static ArmSpec truncated_gaussian(double mu, double sigma);
  static ArmSpec truncated_uniform(double a, double b);
  static ArmSpec power(double shape, double scale);
  static ArmSpec inverse_cdf_poly(double p);
  static ArmSpec constant(double value);
  static ArmSpec trace(std::string file, int arm,
                       RewardTransform transform = RewardTransform::negate);

  void validate() const;  // throws ConfigError on parameter-domain violations
};

struct TaskSpec {
  std::string task_id;
  std::vector<ArmSpec> arms;
};

// ---- Pure inverse-CDF transforms (u in (0, 1]) ------------------------------

double pareto_transform(double lambda, double u);             // U^(-1/lambda), support [1, inf)
double exponential_transform(double lambda, double u);        // -ln(U)/lambda
double power_transform(double shape, double scale, double u); // c * U^(1/a), CDF (x/c)^a on [0,c]
double inverse_cdf_poly_transform(double p, double u);        // U^(1/p), CDF x^p on [0,1]
double truncated_uniform_transform(double a, double b, double u);

// ---- Stream-consuming samplers ----------------------------------------------

double sample_pareto(double lambda, RngStream& rng);
double sample_exponential(double lambda, RngStream& rng);
double sample_gaussian(double mu, double sigma, RngStream& rng);
// Rejection sampling of Normal(mu, sigma) until the draw lands in [0, 1].
double sample_truncated_gaussian(double mu, double sigma, RngStream& rng);
double sample_truncated_uniform(double a, double b, RngStream& rng);
double sample_power(double shape, double scale, RngStream& rng);
double sample_inverse_cdf_poly(double p, RngStream& rng);

// Dispatch over synthetic kinds (throws on kind == trace).
double sample_arm(const ArmSpec& spec, RngStream& rng);

// ---- Trace replay ------------------------------------------------------------

struct TraceTable {
  std::string task_id;  // filename stem
  int num_arms = 0;
  int num_repetitions = 0;
  std::int64_t max_length = 0;
  // sequences[arm][repetition] -> losses in file (iteration) order
  std::vector<std::vector<std::vector<double>>> sequences;
};

// Parses and validates the trace CSV format: header `arm_id,repetition,iteration,loss`,
// 0-based arm/repetition, 1-based contiguous iteration per (arm, repetition).
// Every malformed/missing/duplicate/non-finite condition raises EnvironmentError
// naming the offending line.
TraceTable load_trace_table(const std::filesystem::path& path);

// Immutable post-load registry shared across parallel episodes.
class TraceStore {
 public:
  void preload(const TaskSpec& task);          // loads every trace file the task references
  bool contains(const std::string& file) const;
  const TraceTable& get(const std::string& file) const;  // throws EnvironmentError if absent

 private:
  std::map<std::string, TraceTable> tables_;
};

// ---- Environment over one task ------------------------------------------------

class BanditEnvironment final : public Environment {
 public:
  BanditEnvironment(const TaskSpec& task, const TraceStore& store, std::uint64_t base_seed,
                    std::uint32_t repetition);

  int num_arms() const override { return static_cast<int>(arms_.size()); }
  double pull(int arm) override;

 private:
  struct ArmRuntime {
    ArmSpec spec;
    std::optional<RngStream> rng;              // synthetic arms
    const std::vector<double>* sequence = nullptr;  // trace arms
    std::int64_t cursor = 0;
  };
  std::string task_id_;
  std::vector<ArmRuntime> arms_;
};

}  // namespace extbandit
