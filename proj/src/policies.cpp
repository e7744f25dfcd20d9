#include "extbandit/policies.hpp"

#include <algorithm>
#include <cmath>

namespace extbandit {

double maxucb_index(double max_reward, std::int64_t n, std::int64_t t, double alpha,
                    double exponent_m) {
  if (n < 1) throw std::invalid_argument("maxucb_index: n must be >= 1");
  if (t < 2) throw std::invalid_argument("maxucb_index: t must be >= 2");
  if (alpha < 0.0) throw std::invalid_argument("maxucb_index: alpha must be >= 0");
  if (exponent_m < 1.0) throw std::invalid_argument("maxucb_index: exponent m must be >= 1");
  const double base = alpha * std::log(static_cast<double>(t)) / static_cast<double>(n);
  return max_reward + std::pow(base, exponent_m);
}

double ucb_index(double mean_reward, std::int64_t n, std::int64_t t, double alpha) {
  if (n < 1) throw std::invalid_argument("ucb_index: n must be >= 1");
  if (t < 2) throw std::invalid_argument("ucb_index: t must be >= 2");
  if (alpha < 0.0) throw std::invalid_argument("ucb_index: alpha must be >= 0");
  return mean_reward + std::sqrt(alpha * std::log(static_cast<double>(t)) / static_cast<double>(n));
}

int maxucb_select(const std::vector<double>& maxima, const std::vector<std::int64_t>& counts,
                  std::int64_t t, double alpha, double exponent_m) {
  if (maxima.size() != counts.size() || maxima.empty())
    throw std::invalid_argument("maxucb_select: mismatched or empty state");
  std::vector<double> idx(maxima.size());
  for (std::size_t i = 0; i < maxima.size(); ++i)
    idx[i] = maxucb_index(maxima[i], counts[i], t, alpha, exponent_m);
  return argmax_lowest_index(idx);
}

int ucb_select(const std::vector<double>& means, const std::vector<std::int64_t>& counts,
               std::int64_t t, double alpha) {
  if (means.size() != counts.size() || means.empty())
    throw std::invalid_argument("ucb_select: mismatched or empty state");
  std::vector<double> idx(means.size());
  for (std::size_t i = 0; i < means.size(); ++i)
    idx[i] = ucb_index(means[i], counts[i], t, alpha);
  return argmax_lowest_index(idx);
}

int random_select(RngStream& rng, int num_arms) {
  if (num_arms < 1) throw std::invalid_argument("random_select: need at least one arm");
  return rng.uniform_int(num_arms);
}

MaxUcbPolicy::MaxUcbPolicy(int num_arms, double alpha, double exponent_m, std::int64_t burn_in_c)
    : k_(num_arms),
      alpha_(alpha),
      m_(exponent_m),
      burn_c_(burn_in_c),
      max_(static_cast<std::size_t>(num_arms), 0.0),
      n_(static_cast<std::size_t>(num_arms), 0) {
  if (num_arms < 1) throw ConfigError("maxucb: need at least one arm");
  if (alpha < 0.0) throw ConfigError("maxucb: alpha must be >= 0");
  if (exponent_m < 1.0) throw ConfigError("maxucb: exponent_m must be >= 1");
  if (burn_in_c < 0) throw ConfigError("maxucb: burn_in_c must be >= 0");
}

int MaxUcbPolicy::select(std::int64_t t, RngStream&) {
  const std::int64_t burn_rounds = burn_c_ * k_;
  if (t <= burn_rounds) return static_cast<int>((t - 1) % k_);      // discarded round-robin
  if (t <= burn_rounds + k_) return static_cast<int>(t - burn_rounds - 1);  // observed init
  return maxucb_select(max_, n_, t, alpha_, m_);
}

void MaxUcbPolicy::observe(int arm, double reward) {
  if (arm < 0 || arm >= k_) throw std::logic_error("maxucb observe: arm out of range");
  ++observed_rounds_;
  if (observed_rounds_ <= burn_c_ * k_) return;  // burn-in rewards are discarded
  auto& n = n_[static_cast<std::size_t>(arm)];
  auto& m = max_[static_cast<std::size_t>(arm)];
  m = (n == 0) ? reward : std::max(m, reward);
  ++n;
}

UcbPolicy::UcbPolicy(int num_arms, double alpha)
    : k_(num_arms),
      alpha_(alpha),
      mean_(static_cast<std::size_t>(num_arms), 0.0),
      n_(static_cast<std::size_t>(num_arms), 0) {
  if (num_arms < 1) throw ConfigError("ucb: need at least one arm");
  if (alpha < 0.0) throw ConfigError("ucb: alpha must be >= 0");
}

int UcbPolicy::select(std::int64_t t, RngStream&) {
  if (t <= k_) return static_cast<int>(t - 1);
  return ucb_select(mean_, n_, t, alpha_);
}

void UcbPolicy::observe(int arm, double reward) {
  if (arm < 0 || arm >= k_) throw std::logic_error("ucb observe: arm out of range");
  auto& n = n_[static_cast<std::size_t>(arm)];
  auto& mean = mean_[static_cast<std::size_t>(arm)];
  ++n;
  mean += (reward - mean) / static_cast<double>(n);
}

const std::map<std::string, std::map<std::string, std::string>>& baseline_defaults() {
  static const std::map<std::string, std::map<std::string, std::string>> defaults = {
      {"quantile_bayes_ucb", {{"alpha", "1.0"}, {"beta", "0.2"}, {"tau", "0.95"}}},
      {"quantile_ucb", {{"alpha", "0.5"}, {"tau", "0.95"}}},
      {"er_ucb_s", {{"beta", "0.6"}, {"theta", "0.01"}, {"gamma", "20.0"}}},
      {"er_ucb_n", {{"alpha", "1.0"}, {"theta", "0.01"}, {"gamma", "20.0"}}},
      {"rising_bandits", {{"C", "7"}, {"T", "time horizon"}}},
      {"max_median", {{"epsilon", "1/t"}}},
      {"qomax_sda", {{"q", "0.5"}, {"gamma", "2/3"}}},
      {"qomax_etc", {{"q", "0.5"}, {"b_T", "4"}, {"n_T", "3"}, {"T", "time horizon"}}},
      {"threshold_ascent", {{"delta", "0.1"}, {"s", "20"}, {"T", "time horizon"}}},
      {"successive_halving", {{"eta", "2.0"}, {"T", "time horizon"}}},
      {"r_sr", {{"epsilon", "0.25"}, {"T", "time horizon"}}},
      {"r_ucbe",
       {{"alpha", "57.12"}, {"epsilon", "0.25"}, {"sigma", "0.05"}, {"T", "time horizon"}}},
      {"maxsearch_gaussian", {{"c", "1.0"}}},
      {"maxsearch_subgaussian", {{"c", "0.27"}}},
  };
  return defaults;
}

std::unique_ptr<Policy> make_policy(const PolicyConfig& config, int num_arms) {
  const std::string& name = config.name;
  const auto reject_param = [&](bool present, const char* key) {
    if (present)
      throw ConfigError("policy '" + name + "' does not accept hyperparameter '" + key + "'");
  };

  if (name == "maxucb") {
    if (!config.params.empty())
      throw ConfigError("policy 'maxucb' does not accept pass-through params");
    const double alpha = config.alpha.value_or(0.5);
    const double m = config.exponent_m.value_or(2.0);
    const std::int64_t c = config.burn_in_c.value_or(0);
    if (alpha < 0.0) throw ConfigError("maxucb: alpha must be >= 0, got " + std::to_string(alpha));
    if (m < 1.0) throw ConfigError("maxucb: exponent_m must be >= 1, got " + std::to_string(m));
    if (c < 0) throw ConfigError("maxucb: burn_in_c must be >= 0, got " + std::to_string(c));
    return std::make_unique<MaxUcbPolicy>(num_arms, alpha, m, c);
  }
  if (name == "ucb") {
    reject_param(config.exponent_m.has_value(), "exponent_m");
    reject_param(config.burn_in_c.has_value(), "burn_in_c");
    if (!config.params.empty())
      throw ConfigError("policy 'ucb' does not accept pass-through params");
    const double alpha = config.alpha.value_or(0.5);
    if (alpha < 0.0) throw ConfigError("ucb: alpha must be >= 0, got " + std::to_string(alpha));
    return std::make_unique<UcbPolicy>(num_arms, alpha);
  }
  if (name == "random") {
    reject_param(config.alpha.has_value(), "alpha");
    reject_param(config.exponent_m.has_value(), "exponent_m");
    reject_param(config.burn_in_c.has_value(), "burn_in_c");
    if (!config.params.empty())
      throw ConfigError("policy 'random' does not accept pass-through params");
    return std::make_unique<RandomPolicy>(num_arms);
  }
  if (baseline_defaults().count(name))
    throw ConfigError("policy '" + name +
                      "': not implemented: external baseline; defaults available in BaselineDefaults");
  throw ConfigError("unknown policy '" + name + "'");
}

}  // namespace extbandit
