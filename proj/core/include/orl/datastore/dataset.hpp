#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace orl {

/// Per-transition reward decomposition. Candidate reward functions are
/// re-evaluated offline from these components.
struct RewardComponents {
  double state_based = 0.0;
  double action_based = 0.0;
  double terminal = 0.0;

  bool operator==(const RewardComponents&) const = default;
};

struct Transition {
  std::int64_t episode_id = 0;
  std::int64_t t = 0;
  std::vector<double> state;  // union feature vector
  int action = 0;
  RewardComponents reward;
  std::vector<double> next_state;
  bool done = false;
  bool truncated = false;
  double propensity = 1.0;  // behavior probability of `action`

  /// Done for a reason other than the step budget; value targets stop here.
  bool true_terminal() const noexcept { return done && !truncated; }

  bool operator==(const Transition&) const = default;
};

struct Episode {
  std::int64_t id = 0;
  std::vector<Transition> steps;

  bool operator==(const Episode&) const = default;
};

struct DatasetHeader {
  int format_version = 1;
  std::vector<std::string> feature_names;
  int action_count = 0;
  std::string env_config_hash;
  std::uint64_t collection_seed = 0;
  std::uint64_t episode_count = 0;
  std::uint64_t transition_count = 0;

  bool operator==(const DatasetHeader&) const = default;
};

inline constexpr int kDatasetFormatVersion = 1;

struct Dataset {
  DatasetHeader header;
  std::vector<Episode> episodes;

  std::size_t transition_count() const noexcept;
  std::size_t union_dim() const noexcept { return header.feature_names.size(); }
  /// Sets the header counts from the body.
  void sync_counts() noexcept;

  bool operator==(const Dataset&) const = default;
};

struct SummaryStats {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct DatasetDiagnostics {
  std::vector<std::string> violations;
  std::uint64_t episode_count = 0;
  std::uint64_t transition_count = 0;
  double min_propensity = 1.0;
  // Undiscounted per-episode sums of each reward component.
  SummaryStats state_based_return;
  SummaryStats action_based_return;
  SummaryStats terminal_return;

  bool ok() const noexcept { return violations.empty(); }
};

/// Checks every header and transition invariant. Never throws; failures are
/// reported as violation strings naming the episode and step.
DatasetDiagnostics validate_dataset(const Dataset& dataset);

/// Throws ValidationError carrying the first few violations, if any.
void require_valid(const Dataset& dataset);

}  // namespace orl
