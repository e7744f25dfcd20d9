#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "extbandit/core.hpp"

namespace extbandit {

// Index value U_i = m_i + (alpha * ln t / n_i)^m. Natural logarithm; with the
// default exponent m = 2 this is the plain MaxUCB bonus.
double maxucb_index(double max_reward, std::int64_t n, std::int64_t t, double alpha,
                    double exponent_m = 2.0);

// Classical UCB index r_bar + sqrt(alpha * ln t / n).
double ucb_index(double mean_reward, std::int64_t n, std::int64_t t, double alpha);

// Stateless selection helpers (also used by the policy classes).
int maxucb_select(const std::vector<double>& maxima, const std::vector<std::int64_t>& counts,
                  std::int64_t t, double alpha, double exponent_m = 2.0);
int ucb_select(const std::vector<double>& means, const std::vector<std::int64_t>& counts,
               std::int64_t t, double alpha);
int random_select(RngStream& rng, int num_arms);

// MaxUCB with optional burn-in: rounds 1..C*K pull round-robin with rewards
// discarded (environment advances, policy state does not), rounds
// C*K+1..C*K+K are the observed initialization, and from then on selection is
// the plain MaxUCB argmax. C = 0 reduces exactly to MaxUCB.
class MaxUcbPolicy final : public Policy {
 public:
  MaxUcbPolicy(int num_arms, double alpha, double exponent_m = 2.0, std::int64_t burn_in_c = 0);

  int num_arms() const override { return k_; }
  int select(std::int64_t t, RngStream& rng) override;
  void observe(int arm, double reward) override;

  double alpha() const { return alpha_; }
  double exponent_m() const { return m_; }
  std::int64_t burn_in_c() const { return burn_c_; }
  const std::vector<double>& maxima() const { return max_; }
  const std::vector<std::int64_t>& counts() const { return n_; }

 private:
  int k_;
  double alpha_, m_;
  std::int64_t burn_c_;
  std::int64_t observed_rounds_ = 0;
  std::vector<double> max_;
  std::vector<std::int64_t> n_;
};

class UcbPolicy final : public Policy {
 public:
  UcbPolicy(int num_arms, double alpha);

  int num_arms() const override { return k_; }
  int select(std::int64_t t, RngStream& rng) override;
  void observe(int arm, double reward) override;

  const std::vector<double>& means() const { return mean_; }
  const std::vector<std::int64_t>& counts() const { return n_; }

 private:
  int k_;
  double alpha_;
  std::vector<double> mean_;
  std::vector<std::int64_t> n_;
};

// Uniform arm choice after the shared round-robin initialization (the
// initialization keeps the every-arm-pulled-once invariant for all policies).
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(int num_arms) : k_(num_arms) {}

  int num_arms() const override { return k_; }
  int select(std::int64_t t, RngStream& rng) override {
    if (t <= k_) return static_cast<int>(t - 1);
    return random_select(rng, k_);
  }
  void observe(int, double) override {}

 private:
  int k_;
};

struct PolicyConfig {
  std::string name;        // maxucb | ucb | random | <external baseline name>
  std::string id;          // unique label in outputs; defaults to name when empty
  std::optional<double> alpha;
  std::optional<double> exponent_m;
  std::optional<std::int64_t> burn_in_c;
  std::map<std::string, std::string> params;  // pass-through for future baselines

  const std::string& effective_id() const { return id.empty() ? name : id; }
};

// Factory. Unknown names, out-of-domain hyperparameters, and hyperparameters
// that do not apply to the named policy are hard ConfigErrors. External
// baseline names are registered but not instantiable.
std::unique_ptr<Policy> make_policy(const PolicyConfig& config, int num_arms);

// Published default hyperparameters of the external baselines, keyed by
// policy name then hyperparameter name. Values are strings because several
// defaults are symbolic (e.g. epsilon = 1/t, T = time horizon).
const std::map<std::string, std::map<std::string, std::string>>& baseline_defaults();

}  // namespace extbandit
