#include "orl/selection/reward_selection.hpp"

#include <set>

#include "orl/error.hpp"
#include "orl/ope/estimators.hpp"
#include "orl/random.hpp"
#include "orl/selection/state_selection.hpp"

namespace orl {

namespace {

std::vector<double> initial_value_samples(const Dataset& dataset, const PolicyArtifact& policy,
                                          const RewardSpec& reward, const StateSpaceSpec& context,
                                          const FqeConfig& fqe, std::uint64_t seed) {
  const QFunction q = fit_fqe(dataset, policy, reward, context, fqe, seed);
  return estimate_dm_fqe(q, dataset, policy).per_episode;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

ReturnDistribution build_return_distribution(const Dataset& dataset, const PolicyArtifact& policy,
                                             const RewardSpec& reward, const FqeConfig& fqe, std::uint64_t seed,
                                             const HistogramBinning& binning) {
  if (dataset.episodes.size() < 2) throw UsageError("a return distribution needs at least two initial states");
  auto samples = initial_value_samples(dataset, policy, reward, policy.state_spec, fqe, seed);
  return make_return_distribution(std::move(samples), binning);
}

std::string reward_argmax(const std::vector<RewardSelectionRow>& rows, double RewardSelectionRow::*key) {
  const RewardSelectionRow* best = nullptr;
  for (const auto& r : rows) {
    if (best == nullptr || r.*key > best->*key || (r.*key == best->*key && r.reward_spec < best->reward_spec)) {
      best = &r;
    }
  }
  return best == nullptr ? std::string() : best->reward_spec;
}

void finalize_reward_report(RewardSelectionReport& report) {
  report.winner = reward_argmax(report.rows, &RewardSelectionRow::mean_difference);
  report.winner_kl = reward_argmax(report.rows, &RewardSelectionRow::kl);
  report.winner_js = reward_argmax(report.rows, &RewardSelectionRow::js);
  report.js_disagrees = report.winner != report.winner_js;
}

RewardSelectionReport select_reward(const std::vector<RewardSpec>& candidates, const PolicyArtifact& best,
                                    const PolicyArtifact& worst, const Dataset& dataset, const FqeConfig& fqe,
                                    std::uint64_t seed, const HistogramBinning& binning, int jobs) {
  if (candidates.empty()) throw UsageError("reward selection needs at least one candidate");
  if (dataset.episodes.size() < 2) throw UsageError("reward selection needs at least two episodes");
  binning.validate();
  std::set<std::string> names;
  for (const auto& c : candidates) {
    c.validate();
    if (!names.insert(c.name).second) throw UsageError("duplicate reward candidate '" + c.name + "'");
  }
  const StateSpaceSpec context = union_space({best.state_spec, worst.state_spec});

  RewardSelectionReport report;
  report.best_policy = best.id;
  report.worst_policy = worst.id;
  report.seed = seed;
  report.rows.resize(candidates.size());
  run_jobs(candidates.size(), jobs, [&](std::size_t i) {
    const RewardSpec& reward = candidates[i];
    const std::uint64_t s = derive_seed(seed, "reward:" + reward.name);
    std::vector<double> b = initial_value_samples(dataset, best, reward, context, fqe, s);
    std::vector<double> w = initial_value_samples(dataset, worst, reward, context, fqe, s);

    std::vector<double> pooled(b);
    pooled.insert(pooled.end(), w.begin(), w.end());
    const auto [mu, sd] = mean_stddev(pooled);

    RewardSelectionRow row;
    row.reward_spec = reward.name;
    row.raw_mean_best = mean_of(b);
    row.raw_mean_worst = mean_of(w);
    row.pooled_mean = mu;
    row.pooled_stddev = sd;
    const ReturnDistribution db = make_return_distribution(std::move(b), mu, sd, binning);
    const ReturnDistribution dw = make_return_distribution(std::move(w), mu, sd, binning);
    row.degenerate = db.degenerate;
    row.mean_best = mean_of(db.standardized);
    row.mean_worst = mean_of(dw.standardized);
    row.mean_difference = row.mean_best - row.mean_worst;
    row.kl = kl_divergence(db, dw);
    row.js = js_divergence(db, dw);
    report.rows[i] = std::move(row);
  });
  finalize_reward_report(report);
  return report;
}

}  // namespace orl
