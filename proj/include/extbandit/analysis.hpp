#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "extbandit/core.hpp"

namespace extbandit {

struct InsufficientDataError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DegenerateSupportError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Empirical survival function G_hat(x) = #(samples strictly greater than x) / n,
// so G_hat(max) = 0 and G_hat(anything below min) = 1.
class SurvivalEstimate {
 public:
  explicit SurvivalEstimate(std::vector<double> samples);  // needs >= 2 finite samples

  double operator()(double x) const;
  // Smallest sample x with G_hat(x) <= q, for q in (0, 1).
  double inverse(double q) const;

  std::int64_t size() const { return static_cast<std::int64_t>(sorted_.size()); }
  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }
  const std::vector<double>& sorted_samples() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

SurvivalEstimate empirical_survival(std::span<const double> samples);

struct ShapeConstants {
  double L = 0.0;
  double U = 0.0;
  double b_hat = 0.0;
  std::int64_t n_samples = 0;
  std::vector<double> eps_grid;
  std::vector<double> ratios;  // G_hat(b_hat - eps) / eps, per grid point
};

// Probes G_hat(b_hat - eps)/eps on a linear eps grid spanning
// [b_hat - Q(0.01), b_hat - Q(0.99)] (Q = survival inverse), keeping only
// eps > 0; L/U are the min/max ratio. Throws InsufficientDataError below 100
// samples and DegenerateSupportError when the sample standard deviation is
// below 0.001 (or the probe range collapses).
ShapeConstants estimate_shape_constants(std::span<const double> samples, int grid_size = 100);

// Same probe arithmetic against a closed-form survival function and explicit
// probe offsets; used for analytic ground-truth checks.
ShapeConstants shape_constants_from_survival(const std::function<double(double)>& survival,
                                             double b, std::span<const double> eps_grid);

struct GapEstimate {
  std::vector<double> v;      // per-arm mean over repetitions of max_{t<=T} reward
  std::vector<double> delta;  // v[best] - v[i]
  int best_arm = 0;           // ties broken by lowest index
  std::int64_t horizon = 0;
};

// rewards[arm][repetition][t]; uses the first T entries of each repetition.
GapEstimate estimate_gaps(const std::vector<std::vector<std::vector<double>>>& rewards,
                          std::int64_t T);

// Suboptimal-pull bound: T^e/e + 2*alpha*sqrt(U_i*T)*ln T with
// e = 1 - 2*L_star*alpha*sqrt(delta_i) when e > 0; for e <= 0 the closed form
// is replaced by the exact partial sum it upper-bounds.
double theorem1_bound(double L_star, double U_i, double delta_i, double alpha, std::int64_t T);

// (max_i b_i / T) * sum of suboptimal pull counts.
double proposition1_regret_bound(std::span<const std::int64_t> pull_counts,
                                 std::span<const double> supports, std::int64_t T, int best_arm);

// (1 / (4*L_star*sqrt(delta_min))) * (1 - 2*ln(ln T)/ln T); requires
// L_star > 0, delta_min > 0, T >= 16.
double corollary1_alpha(double L_star, double delta_min, std::int64_t T);

struct LemmaA1Diagnostics {
  double p_below = 0.0;      // MC estimate of P(max <= x)
  double p_above = 0.0;      // MC estimate of P(max > x)
  double bound_below = 0.0;  // e^(-n G(x))
  double bound_above = 0.0;  // n G(x)
  double se_below = 0.0;
  double se_above = 0.0;
  bool pass = false;
};

// Checks both tail bounds against Monte-Carlo estimates from `max_samples`
// (each entry one observed max of n draws), allowing 3 standard errors.
LemmaA1Diagnostics lemma_a1_check(std::span<const double> max_samples, double survival_at_x,
                                  std::int64_t n, double x);

}  // namespace extbandit
