#include "extbandit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace extbandit {

std::vector<double> max_so_far(std::span<const double> rewards) {
  std::vector<double> out;
  out.reserve(rewards.size());
  double best = -std::numeric_limits<double>::infinity();
  for (double r : rewards) {
    best = std::max(best, r);
    out.push_back(best);
  }
  return out;
}

std::vector<double> max_so_far(const RunTrace& trace) {
  std::vector<double> rewards;
  rewards.reserve(trace.records.size());
  for (const PullRecord& rec : trace.records) rewards.push_back(rec.reward);
  return max_so_far(rewards);
}

namespace {

double best_in_prefix(const std::vector<double>& seq, std::int64_t T) {
  if (static_cast<std::int64_t>(seq.size()) < T)
    throw std::invalid_argument("proxy_regret: repetition shorter than T (mismatched T)");
  double best = seq[0];
  for (std::int64_t t = 1; t < T; ++t) best = std::max(best, seq[static_cast<std::size_t>(t)]);
  return best;
}

double mean_best_in_prefix(const std::vector<std::vector<double>>& reps, std::int64_t T) {
  if (reps.empty()) throw std::invalid_argument("proxy_regret: no repetitions");
  double acc = 0.0;
  for (const auto& seq : reps) acc += best_in_prefix(seq, T);
  return acc / static_cast<double>(reps.size());
}

}  // namespace

double proxy_regret(const std::vector<std::vector<double>>& policy_rewards,
                    const std::vector<std::vector<std::vector<double>>>& oracle_rewards,
                    std::int64_t T) {
  if (T < 1) throw std::invalid_argument("proxy_regret: T must be >= 1");
  if (oracle_rewards.empty()) throw std::invalid_argument("proxy_regret: no oracle arms");
  double best_oracle = -std::numeric_limits<double>::infinity();
  for (const auto& arm : oracle_rewards)
    best_oracle = std::max(best_oracle, mean_best_in_prefix(arm, T));
  return best_oracle - mean_best_in_prefix(policy_rewards, T);
}

std::int64_t optimal_pull_count(const RunTrace& trace, int best_arm) {
  std::int64_t count = 0;
  for (const PullRecord& rec : trace.records)
    if (rec.arm == best_arm) ++count;
  return count;
}

std::vector<std::vector<std::vector<double>>> normalized_loss(
    const std::vector<std::vector<std::vector<double>>>& loss_curves) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& policy : loss_curves)
    for (const auto& rep : policy)
      for (double v : rep) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }

  auto out = loss_curves;
  const double range = hi - lo;
  for (auto& policy : out)
    for (auto& rep : policy)
      for (double& v : rep) v = (range > 0.0) ? (v - lo) / range : 0.0;
  return out;
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] > values[b];  // descending: rank 1 = largest
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share the average of ranks i+1..j+1
    const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

namespace {

double percentile_linear(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

}  // namespace

std::vector<RankSummaryRow> bootstrap_average_rank(
    const std::vector<std::vector<std::vector<std::vector<double>>>>& perf,
    const std::vector<std::string>& policy_ids, const std::vector<std::int64_t>& checkpoints,
    int iterations, std::uint64_t seed) {
  const std::size_t num_tasks = perf.size();
  const std::size_t num_policies = policy_ids.size();
  const std::size_t num_cps = checkpoints.size();
  if (num_tasks == 0) throw std::invalid_argument("bootstrap_average_rank: no tasks");
  if (num_policies == 0) throw std::invalid_argument("bootstrap_average_rank: no policies");
  if (num_cps == 0) throw std::invalid_argument("bootstrap_average_rank: no checkpoints");
  if (iterations < 1) throw std::invalid_argument("bootstrap_average_rank: iterations must be >= 1");
  for (const auto& task : perf) {
    if (task.size() != num_policies)
      throw std::invalid_argument("bootstrap_average_rank: policy count mismatch across tasks");
    for (const auto& reps : task) {
      if (reps.empty())
        throw std::invalid_argument("bootstrap_average_rank: a (task, policy) cell has no repetitions");
      for (const auto& rep : reps)
        if (rep.size() != num_cps)
          throw std::invalid_argument("bootstrap_average_rank: checkpoint count mismatch");
    }
  }

  // samples[it][policy][cp] = task-averaged rank
  std::vector<std::vector<std::vector<double>>> samples(
      static_cast<std::size_t>(iterations),
      std::vector<std::vector<double>>(num_policies, std::vector<double>(num_cps, 0.0)));

  std::vector<double> avg(num_policies);
  for (int it = 0; it < iterations; ++it) {
    RngStream rng(label_seed(seed, "bootstrap", static_cast<std::uint64_t>(it)));
    auto& sample = samples[static_cast<std::size_t>(it)];
    for (std::size_t task = 0; task < num_tasks; ++task) {
      // One resample index set per (task, policy), reused across checkpoints
      // so a bootstrap draw is internally consistent over time.
      std::vector<std::vector<int>> draw(num_policies);
      for (std::size_t p = 0; p < num_policies; ++p) {
        const int reps = static_cast<int>(perf[task][p].size());
        draw[p].resize(static_cast<std::size_t>(reps));
        for (int& idx : draw[p]) idx = rng.uniform_int(reps);
      }
      for (std::size_t cp = 0; cp < num_cps; ++cp) {
        for (std::size_t p = 0; p < num_policies; ++p) {
          double acc = 0.0;
          for (int idx : draw[p])
            acc += perf[task][p][static_cast<std::size_t>(idx)][cp];
          avg[p] = acc / static_cast<double>(draw[p].size());
        }
        const std::vector<double> ranks = fractional_ranks(avg);
        for (std::size_t p = 0; p < num_policies; ++p) sample[p][cp] += ranks[p];
      }
    }
    for (std::size_t p = 0; p < num_policies; ++p)
      for (std::size_t cp = 0; cp < num_cps; ++cp)
        sample[p][cp] /= static_cast<double>(num_tasks);
  }

  std::vector<RankSummaryRow> rows;
  rows.reserve(num_policies * num_cps);
  std::vector<double> column(static_cast<std::size_t>(iterations));
  for (std::size_t p = 0; p < num_policies; ++p) {
    for (std::size_t cp = 0; cp < num_cps; ++cp) {
      double mean = 0.0;
      for (int it = 0; it < iterations; ++it) {
        column[static_cast<std::size_t>(it)] = samples[static_cast<std::size_t>(it)][p][cp];
        mean += column[static_cast<std::size_t>(it)];
      }
      mean /= static_cast<double>(iterations);
      RankSummaryRow row;
      row.policy = policy_ids[p];
      row.t = checkpoints[cp];
      row.mean_rank = mean;
      row.ci_lo = percentile_linear(column, 0.025);
      row.ci_hi = percentile_linear(column, 0.975);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

WtlRecord wins_ties_losses(std::span<const double> candidate, std::span<const double> reference,
                           double tolerance) {
  if (candidate.size() != reference.size())
    throw std::invalid_argument("wins_ties_losses: mismatched lengths");
  WtlRecord rec;
  rec.tolerance = tolerance;
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    const double a = candidate[i];
    const double b = reference[i];
    if (std::abs(a - b) <= tolerance * (1.0 + std::abs(b)))
      ++rec.ties;
    else if (a > b)
      ++rec.wins;
    else
      ++rec.losses;
  }
  return rec;
}

double sign_test(std::int64_t wins, std::int64_t losses) {
  if (wins < 0 || losses < 0)
    throw std::invalid_argument("sign_test: wins and losses must be >= 0");
  const std::int64_t n = wins + losses;
  if (n == 0) return 1.0;
  if (wins == 0) return 1.0;  // the full binomial tail
  // Accumulate from the smallest terms (k = n downward) in log space.
  const long double ln2n = static_cast<long double>(n) * std::log(2.0L);
  const long double lgn = std::lgamma(static_cast<long double>(n) + 1.0L);
  long double acc = 0.0L;
  for (std::int64_t k = n; k >= wins; --k) {
    const long double ln_c = lgn - std::lgamma(static_cast<long double>(k) + 1.0L) -
                             std::lgamma(static_cast<long double>(n - k) + 1.0L);
    acc += std::exp(ln_c - ln2n);
  }
  return std::min(1.0, static_cast<double>(acc));
}

}  // namespace extbandit
