#include "extbandit/core.hpp"

#include <cmath>
#include <limits>

namespace extbandit {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix_seed(std::uint64_t h, std::uint64_t v) {
  // hash-combine flavored chaining followed by a full avalanche
  return splitmix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

std::uint64_t env_arm_seed(std::uint64_t base_seed, std::string_view task_id,
                           std::uint32_t repetition, int arm) {
  std::uint64_t h = splitmix64(base_seed);
  h = mix_seed(h, fnv1a64("env"));
  h = mix_seed(h, fnv1a64(task_id));
  h = mix_seed(h, repetition);
  h = mix_seed(h, static_cast<std::uint64_t>(arm));
  return h;
}

std::uint64_t policy_seed(std::uint64_t base_seed, std::string_view task_id,
                          std::string_view policy_id, std::uint32_t repetition) {
  std::uint64_t h = splitmix64(base_seed);
  h = mix_seed(h, fnv1a64("policy"));
  h = mix_seed(h, fnv1a64(task_id));
  h = mix_seed(h, fnv1a64(policy_id));
  h = mix_seed(h, repetition);
  return h;
}

std::uint64_t label_seed(std::uint64_t base_seed, std::string_view label, std::uint64_t index) {
  std::uint64_t h = splitmix64(base_seed);
  h = mix_seed(h, fnv1a64(label));
  h = mix_seed(h, index);
  return h;
}

int RngStream::uniform_int(int k) {
  if (k < 1) throw std::invalid_argument("uniform_int: k must be >= 1");
  if (k == 1) return 0;
  const std::uint64_t kk = static_cast<std::uint64_t>(k);
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % kk + 1) % kk;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x > limit);
  return static_cast<int>(x % kk);
}

std::vector<std::int64_t> RunTrace::pull_counts(int num_arms) const {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(num_arms), 0);
  for (const PullRecord& rec : records) {
    if (rec.arm < 0 || rec.arm >= num_arms)
      throw std::invalid_argument("pull_counts: record arm out of range");
    ++counts[static_cast<std::size_t>(rec.arm)];
  }
  return counts;
}

int argmax_lowest_index(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("argmax over empty range");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return static_cast<int>(best);
}

RunTrace drive_episode(Environment& env, Policy& policy, std::int64_t horizon,
                       std::string task_id, std::string policy_id, std::uint32_t repetition,
                       RngStream& policy_rng) {
  const int k = env.num_arms();
  if (policy.num_arms() != k)
    throw std::logic_error("drive_episode: policy and environment disagree on arm count");
  if (horizon < k)
    throw ConfigError("horizon must be at least the arm count (" + std::to_string(k) +
                      "), got " + std::to_string(horizon));

  RunTrace trace;
  trace.task_id = std::move(task_id);
  trace.policy_id = std::move(policy_id);
  trace.repetition = repetition;
  trace.horizon = horizon;
  trace.records.reserve(static_cast<std::size_t>(horizon));

  for (std::int64_t t = 1; t <= horizon; ++t) {
    const int arm = policy.select(t, policy_rng);
    if (arm < 0 || arm >= k)
      throw std::logic_error("policy selected arm " + std::to_string(arm) + " out of range");
    const double reward = env.pull(arm);
    if (!std::isfinite(reward))
      throw EnvironmentError("environment emitted a non-finite reward for task '" +
                             trace.task_id + "' arm " + std::to_string(arm) + " at round " +
                             std::to_string(t));
    policy.observe(arm, reward);
    trace.records.push_back(PullRecord{t, arm, reward});
  }
  return trace;
}

}  // namespace extbandit
