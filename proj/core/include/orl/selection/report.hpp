#pragma once

#include <string>

#include "orl/selection/reward_selection.hpp"
#include "orl/selection/state_selection.hpp"

namespace orl {

std::string state_report_json(const StateSelectionReport& report);
std::string state_report_csv(const StateSelectionReport& report);
std::string state_report_table(const StateSelectionReport& report);

inline constexpr const char* kStateReportCsvHeader =
    "rank,state_space,dimension,policy_id,value,standard_error,final_fqe_loss,online_mean,online_stddev,winner";

std::string reward_report_json(const RewardSelectionReport& report);
std::string reward_report_csv(const RewardSelectionReport& report);
/// Rows are criteria (mean worst, mean best, mean difference, JS, KL) and
/// columns are candidate rewards.
std::string reward_report_table(const RewardSelectionReport& report);

inline constexpr const char* kRewardReportCsvHeader =
    "reward_spec,mean_worst,mean_best,mean_difference,js,kl,raw_mean_worst,raw_mean_best,pooled_mean,pooled_stddev,"
    "degenerate";

/// Fixed-width column layout shared by the text tables.
std::string text_table(const std::vector<std::vector<std::string>>& cells);

}  // namespace orl
