#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orl/datastore/dataset.hpp"
#include "orl/env/spaces.hpp"
#include "orl/ope/fqe.hpp"
#include "orl/policy.hpp"
#include "orl/selection/divergence.hpp"

namespace orl {

/// Fits FQE for `policy` under `reward` and returns the self-standardized
/// distribution of sum_a pi(a|s0) Q(s0, a) over episode-initial states.
/// Throws UsageError with fewer than two initial states.
ReturnDistribution build_return_distribution(const Dataset& dataset, const PolicyArtifact& policy,
                                             const RewardSpec& reward, const FqeConfig& fqe, std::uint64_t seed,
                                             const HistogramBinning& binning = {});

struct RewardSelectionRow {
  std::string reward_spec;
  double mean_worst = 0.0;  // standardized units
  double mean_best = 0.0;
  double mean_difference = 0.0;  // mean_best - mean_worst
  double kl = 0.0;  // KL(best || worst)
  double js = 0.0;
  double raw_mean_worst = 0.0;
  double raw_mean_best = 0.0;
  double pooled_mean = 0.0;
  double pooled_stddev = 0.0;
  bool degenerate = false;
};

struct RewardSelectionReport {
  std::string best_policy;
  std::string worst_policy;
  std::uint64_t seed = 0;
  std::vector<RewardSelectionRow> rows;  // candidate order
  std::string winner;  // primary criterion: mean difference
  std::string winner_kl;
  std::string winner_js;
  bool js_disagrees = false;
};

/// Argmax of `key` over rows; ties go to the lexicographically smaller name.
std::string reward_argmax(const std::vector<RewardSelectionRow>& rows, double RewardSelectionRow::*key);

/// Recomputes the winners from the rows.
void finalize_reward_report(RewardSelectionReport& report);

/// Separability of the best and worst policy under each candidate reward.
/// Both policies are evaluated on the union of their state spaces with the
/// same FQE seed per reward; samples are standardized with the pooled
/// mean and standard deviation of both policies.
RewardSelectionReport select_reward(const std::vector<RewardSpec>& candidates, const PolicyArtifact& best,
                                    const PolicyArtifact& worst, const Dataset& dataset, const FqeConfig& fqe,
                                    std::uint64_t seed, const HistogramBinning& binning = {}, int jobs = 1);

}  // namespace orl
