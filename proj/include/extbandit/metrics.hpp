#pragma once

#include <span>
#include <string>
#include <vector>

#include "extbandit/core.hpp"

namespace extbandit {

// Running best-observed-reward curve (non-decreasing).
std::vector<double> max_so_far(std::span<const double> rewards);
std::vector<double> max_so_far(const RunTrace& trace);

// Max over arms of mean-over-repetitions best-reward-in-T from the dedicated
// single-arm oracle runs, minus the policy's mean best-reward-in-T.
// Inputs may be raw reward sequences or max-so-far curves; only the first T
// entries of each repetition are used.
double proxy_regret(const std::vector<std::vector<double>>& policy_rewards,
                    const std::vector<std::vector<std::vector<double>>>& oracle_rewards,
                    std::int64_t T);

std::int64_t optimal_pull_count(const RunTrace& trace, int best_arm);

// Per-task min-max normalization of best-so-far loss curves over everything
// (policies, repetitions, rounds); a degenerate task (min == max) maps to all
// zeros. Input/output layout: curves[policy][repetition][t].
std::vector<std::vector<std::vector<double>>> normalized_loss(
    const std::vector<std::vector<std::vector<double>>>& loss_curves);

// Fractional ranking, rank 1 = largest value, exact ties share the average rank.
std::vector<double> fractional_ranks(std::span<const double> values);

struct RankSummaryRow {
  std::string policy;
  std::int64_t t = 0;
  double mean_rank = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// Bootstrap task-averaged ranks: per iteration, resample each (task, policy)
// repetition set with replacement, average the performance, rank policies
// within each task at each checkpoint, average ranks across tasks. Reports
// the mean and the 2.5/97.5 percentile CI over iterations. Deterministic
// given `seed` (per-iteration derived streams).
// perf[task][policy][repetition][checkpoint]; higher = better.
std::vector<RankSummaryRow> bootstrap_average_rank(
    const std::vector<std::vector<std::vector<std::vector<double>>>>& perf,
    const std::vector<std::string>& policy_ids, const std::vector<std::int64_t>& checkpoints,
    int iterations, std::uint64_t seed);

struct WtlRecord {
  std::int64_t wins = 0;
  std::int64_t ties = 0;
  std::int64_t losses = 0;
  double tolerance = 1e-8;
};

// Element-wise candidate-vs-reference comparison; tie iff
// |a - b| <= tolerance * (1 + |b|).
WtlRecord wins_ties_losses(std::span<const double> candidate, std::span<const double> reference,
                           double tolerance = 1e-8);

// One-sided exact binomial tail p = sum_{k=wins}^{n} C(n,k) / 2^n with
// n = wins + losses; n = 0 returns 1.0. Stable up to n = 10^4.
double sign_test(std::int64_t wins, std::int64_t losses);

}  // namespace extbandit
