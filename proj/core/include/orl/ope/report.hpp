#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace orl {

struct OpeDiagnostics {
  std::size_t episodes = 0;
  // Importance-weight diagnostics; zero for estimators without weights.
  double effective_sample_size = 0.0;
  double weight_max = 0.0;
  double weight_mean = 0.0;
  std::size_t nonzero_weights = 0;
  std::vector<double> fqe_loss_trace;
};

struct OpeReport {
  enum class Aggregation { mean, sum };

  std::string estimator;  // "is", "wis", "dm_fqe", "dr"
  std::string policy_id;
  std::string reward_spec;
  double value = 0.0;
  /// Standard error of `value` for mean-aggregated estimators, NaN otherwise.
  double standard_error = 0.0;
  std::vector<double> per_episode;
  Aggregation aggregation = Aggregation::mean;
  OpeDiagnostics diagnostics;

  /// Recomputes the value from the per-episode contributions.
  double aggregate() const;
};

std::string ope_report_json(const OpeReport& report);

inline constexpr const char* kOpeLedgerHeader =
    "estimator,policy_id,reward_spec,value,standard_error,episodes,ess,weight_max,weight_mean";

/// Appends one CSV row, writing the header first when the file is new.
void append_ope_ledger(const std::filesystem::path& path, const OpeReport& report);

}  // namespace orl
