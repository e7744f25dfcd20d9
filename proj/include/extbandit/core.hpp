#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace extbandit {

// Configuration / schema problems (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reward-source problems: missing/malformed trace data, non-finite rewards,
// impossible sampler setups (CLI exit code 3 when raised during setup).
struct EnvironmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TraceExhaustedError : EnvironmentError {
  TraceExhaustedError(const std::string& task_id, int arm, std::int64_t position)
      : EnvironmentError("trace-exhausted: task '" + task_id + "' arm " + std::to_string(arm) +
                         " has no reward at position " + std::to_string(position)),
        task_id(task_id),
        arm(arm),
        position(position) {}
  std::string task_id;
  int arm;
  std::int64_t position;
};

// ---- Seed derivation -------------------------------------------------------
//
// Streams are derived by hashing, never by consuming a shared generator, so
// any (task, policy, repetition, arm) cell can be reproduced in isolation.
// Environment streams deliberately do NOT depend on the policy: paired runs
// of different policies see identical arm draws wherever their pull sequences
// coincide, and a policy that always pulls the oracle-best arm reproduces the
// oracle's reward sequence exactly.

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);
std::uint64_t mix_seed(std::uint64_t h, std::uint64_t v);

// Stream feeding arm `arm` of `task_id` during repetition `repetition`.
std::uint64_t env_arm_seed(std::uint64_t base_seed, std::string_view task_id,
                           std::uint32_t repetition, int arm);
// Stream feeding the policy's own randomness (e.g. the random policy).
std::uint64_t policy_seed(std::uint64_t base_seed, std::string_view task_id,
                          std::string_view policy_id, std::uint32_t repetition);
// Generic labelled derivation for auxiliary consumers (bootstrap iterations,
// shape sampling, test fixtures).
std::uint64_t label_seed(std::uint64_t base_seed, std::string_view label, std::uint64_t index);

// ---- Random stream ---------------------------------------------------------
//
// mt19937_64 with hand-rolled uniform/normal transforms. std::*_distribution
// is implementation-defined, which would silently break within-build
// determinism guarantees the output contract relies on.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on (0, 1]: never zero, so it is safe under log() and x^(-1/a).
  double uniform_oc() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on [0, 1).
  double uniform_co() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (no cached second value, so the draw count
  // per call is fixed and streams stay alignment-independent).
  double normal() {
    const double u1 = uniform_oc();
    const double u2 = uniform_co();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Unbiased integer in [0, k) via rejection.
  int uniform_int(int k);

 private:
  std::mt19937_64 engine_;
};

// ---- Episode data ----------------------------------------------------------

struct PullRecord {
  std::int64_t round = 0;  // 1-based
  int arm = 0;             // 0-based
  double reward = 0.0;
};

struct RunTrace {
  std::string task_id;
  std::string policy_id;
  std::uint32_t repetition = 0;
  std::int64_t horizon = 0;
  std::vector<PullRecord> records;

  std::vector<std::int64_t> pull_counts(int num_arms) const;
};

// ---- Interfaces ------------------------------------------------------------

class Environment {
 public:
  virtual ~Environment() = default;
  virtual int num_arms() const = 0;
  // Draw/replay one reward for `arm`; advances only that arm's state.
  virtual double pull(int arm) = 0;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual int num_arms() const = 0;
  // Round t is 1-based. Must not mutate reward statistics.
  virtual int select(std::int64_t t, RngStream& rng) = 0;
  // Feed back the reward for the arm chosen this round.
  virtual void observe(int arm, double reward) = 0;
};

// Core interaction loop: rounds 1..horizon of select/pull/observe.
// Throws EnvironmentError when the environment emits a non-finite reward and
// propagates trace exhaustion.
RunTrace drive_episode(Environment& env, Policy& policy, std::int64_t horizon,
                       std::string task_id, std::string policy_id, std::uint32_t repetition,
                       RngStream& policy_rng);

// Argmax with ties broken by the lowest index.
int argmax_lowest_index(const std::vector<double>& values);

}  // namespace extbandit
