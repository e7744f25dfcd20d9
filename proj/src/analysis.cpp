#include "extbandit/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace extbandit {

SurvivalEstimate::SurvivalEstimate(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.size() < 2)
    throw std::invalid_argument("empirical survival needs at least 2 samples, got " +
                                std::to_string(sorted_.size()));
  for (double v : sorted_)
    if (!std::isfinite(v)) throw std::invalid_argument("empirical survival: non-finite sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double SurvivalEstimate::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  const auto greater = static_cast<double>(sorted_.end() - it);
  return greater / static_cast<double>(sorted_.size());
}

double SurvivalEstimate::inverse(double q) const {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("survival inverse: q must lie in (0, 1)");
  // G_hat evaluated along the sorted samples is non-increasing, so binary
  // search for the first sample where it drops to <= q. G_hat(max) = 0
  // guarantees a solution exists.
  std::size_t lo = 0, hi = sorted_.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if ((*this)(sorted_[mid]) <= q)
      hi = mid;
    else
      lo = mid + 1;
  }
  return sorted_[lo];
}

SurvivalEstimate empirical_survival(std::span<const double> samples) {
  return SurvivalEstimate(std::vector<double>(samples.begin(), samples.end()));
}

namespace {

double sample_std(std::span<const double> samples) {
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

ShapeConstants finish_shape(std::vector<double> eps, std::vector<double> ratios, double b,
                            std::int64_t n_samples) {
  ShapeConstants out;
  out.b_hat = b;
  out.n_samples = n_samples;
  out.L = ratios.front();
  out.U = ratios.front();
  for (double r : ratios) {
    out.L = std::min(out.L, r);
    out.U = std::max(out.U, r);
  }
  out.eps_grid = std::move(eps);
  out.ratios = std::move(ratios);
  return out;
}

}  // namespace

ShapeConstants estimate_shape_constants(std::span<const double> samples, int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("estimate_shape_constants: grid_size must be >= 2");
  if (samples.size() < 100)
    throw InsufficientDataError("insufficient data: need at least 100 samples, got " +
                                std::to_string(samples.size()));
  if (sample_std(samples) < 0.001)
    throw DegenerateSupportError(
        "degenerate support: sample standard deviation below 0.001");

  const SurvivalEstimate survival = empirical_survival(samples);
  const double b_hat = survival.max();
  const double eps_lo = b_hat - survival.inverse(0.01);
  const double eps_hi = b_hat - survival.inverse(0.99);

  std::vector<double> eps, ratios;
  eps.reserve(static_cast<std::size_t>(grid_size));
  const double step = (eps_hi - eps_lo) / static_cast<double>(grid_size - 1);
  for (int j = 0; j < grid_size; ++j) {
    const double e = eps_lo + step * static_cast<double>(j);
    if (!(e > 0.0)) continue;
    eps.push_back(e);
    ratios.push_back(survival(b_hat - e) / e);
  }
  if (eps.empty())
    throw DegenerateSupportError("degenerate support: empty probe range");
  return finish_shape(std::move(eps), std::move(ratios), b_hat, survival.size());
}

ShapeConstants shape_constants_from_survival(const std::function<double(double)>& survival,
                                             double b, std::span<const double> eps_grid) {
  std::vector<double> eps, ratios;
  for (double e : eps_grid) {
    if (!(e > 0.0)) continue;
    const double g = survival(b - e);
    if (!std::isfinite(g) || g < 0.0)
      throw std::invalid_argument("shape_constants_from_survival: survival value out of range");
    eps.push_back(e);
    ratios.push_back(g / e);
  }
  if (eps.empty())
    throw DegenerateSupportError("degenerate support: empty probe range");
  return finish_shape(std::move(eps), std::move(ratios), b, 0);
}

GapEstimate estimate_gaps(const std::vector<std::vector<std::vector<double>>>& rewards,
                          std::int64_t T) {
  if (rewards.empty()) throw std::invalid_argument("estimate_gaps: no arms");
  if (T < 1) throw std::invalid_argument("estimate_gaps: T must be >= 1");

  GapEstimate out;
  out.horizon = T;
  out.v.reserve(rewards.size());
  for (std::size_t arm = 0; arm < rewards.size(); ++arm) {
    const auto& reps = rewards[arm];
    if (reps.empty())
      throw std::invalid_argument("estimate_gaps: arm " + std::to_string(arm) +
                                  " has no repetitions");
    double acc = 0.0;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const auto& seq = reps[r];
      if (static_cast<std::int64_t>(seq.size()) < T)
        throw std::invalid_argument("estimate_gaps: ragged input (arm " + std::to_string(arm) +
                                    " repetition " + std::to_string(r) + " shorter than T)");
      double best = seq[0];
      for (std::int64_t t = 1; t < T; ++t) best = std::max(best, seq[static_cast<std::size_t>(t)]);
      acc += best;
    }
    out.v.push_back(acc / static_cast<double>(reps.size()));
  }
  out.best_arm = argmax_lowest_index(out.v);
  out.delta.reserve(out.v.size());
  for (double vi : out.v) out.delta.push_back(out.v[static_cast<std::size_t>(out.best_arm)] - vi);
  return out;
}

double theorem1_bound(double L_star, double U_i, double delta_i, double alpha, std::int64_t T) {
  if (L_star < 0.0 || U_i < 0.0 || delta_i < 0.0 || alpha < 0.0)
    throw std::invalid_argument("theorem1_bound: all inputs must be >= 0");
  if (T < 1) throw std::invalid_argument("theorem1_bound: T must be >= 1");

  const double Td = static_cast<double>(T);
  const double rate = 2.0 * L_star * alpha * std::sqrt(delta_i);
  const double exponent = 1.0 - rate;
  const double second = 2.0 * alpha * std::sqrt(U_i * Td) * std::log(Td);
  if (exponent > 0.0) return std::pow(Td, exponent) / exponent + second;
  // Non-positive exponent: the closed form no longer upper-bounds the partial
  // sum it stands for, so evaluate that sum exactly.
  double sum = 0.0;
  for (std::int64_t t = 1; t <= T; ++t) sum += std::pow(static_cast<double>(t), -rate);
  return sum + second;
}

double proposition1_regret_bound(std::span<const std::int64_t> pull_counts,
                                 std::span<const double> supports, std::int64_t T, int best_arm) {
  if (pull_counts.size() != supports.size() || pull_counts.empty())
    throw std::invalid_argument("proposition1_regret_bound: mismatched or empty inputs");
  if (best_arm < 0 || static_cast<std::size_t>(best_arm) >= pull_counts.size())
    throw std::invalid_argument("proposition1_regret_bound: best_arm out of range");
  std::int64_t total = 0;
  std::int64_t suboptimal = 0;
  for (std::size_t i = 0; i < pull_counts.size(); ++i) {
    if (pull_counts[i] < 0)
      throw std::invalid_argument("proposition1_regret_bound: negative pull count");
    total += pull_counts[i];
    if (static_cast<int>(i) != best_arm) suboptimal += pull_counts[i];
  }
  if (total != T)
    throw std::invalid_argument("proposition1_regret_bound: pull counts must sum to T");
  double b_max = supports[0];
  for (double b : supports) b_max = std::max(b_max, b);
  return b_max / static_cast<double>(T) * static_cast<double>(suboptimal);
}

double corollary1_alpha(double L_star, double delta_min, std::int64_t T) {
  if (!(L_star > 0.0)) throw std::invalid_argument("corollary1_alpha: L_star must be > 0");
  if (!(delta_min > 0.0)) throw std::invalid_argument("corollary1_alpha: delta_min must be > 0");
  if (T < 16) throw std::invalid_argument("corollary1_alpha: T must be >= 16");
  const double ln_t = std::log(static_cast<double>(T));
  return (1.0 / (4.0 * L_star * std::sqrt(delta_min))) * (1.0 - 2.0 * std::log(ln_t) / ln_t);
}

LemmaA1Diagnostics lemma_a1_check(std::span<const double> max_samples, double survival_at_x,
                                  std::int64_t n, double x) {
  if (max_samples.empty()) throw std::invalid_argument("lemma_a1_check: no max samples");
  if (n < 1) throw std::invalid_argument("lemma_a1_check: n must be >= 1");
  if (!(survival_at_x >= 0.0 && survival_at_x <= 1.0))
    throw std::invalid_argument("lemma_a1_check: survival value must lie in [0, 1]");

  const double m = static_cast<double>(max_samples.size());
  double below = 0.0;
  for (double v : max_samples)
    if (v <= x) below += 1.0;

  LemmaA1Diagnostics d;
  d.p_below = below / m;
  d.p_above = 1.0 - d.p_below;
  d.bound_below = std::exp(-static_cast<double>(n) * survival_at_x);
  d.bound_above = static_cast<double>(n) * survival_at_x;
  d.se_below = std::sqrt(d.p_below * (1.0 - d.p_below) / m);
  d.se_above = std::sqrt(d.p_above * (1.0 - d.p_above) / m);
  d.pass = d.p_below <= d.bound_below + 3.0 * d.se_below &&
           d.p_above <= d.bound_above + 3.0 * d.se_above;
  return d;
}

}  // namespace extbandit
