#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "orl/env/lander.hpp"
#include "orl/env/spaces.hpp"
#include "orl/offline/cql.hpp"
#include "orl/ope/fqe.hpp"
#include "orl/online/collect.hpp"
#include "orl/selection/divergence.hpp"

namespace orl {

struct PipelineConfig {
  LanderConfig env;
  DdqnConfig ddqn;
  CqlConfig cql;
  FqeConfig fqe;
  HistogramBinning binning;

  std::vector<StateSpaceSpec> state_spaces;
  std::vector<RewardSpec> rewards;
  std::string selection_reward = "f";  // reward for training and scoring state-space candidates
  std::string offline_state_space = "S_orig";
  std::vector<double> cql_fractions = {0.05, 0.3, 1.0};  // worst, avg, best
  int audit_episodes = 100;

  std::vector<std::uint64_t> seeds = {0, 1, 2};
  std::string output_dir = "runs";
  int jobs = 1;

  /// Throws ValidationError on duplicate or dangling candidate names, empty
  /// seed lists or invalid module configs.
  void validate() const;

  const StateSpaceSpec& state_space(const std::string& name) const;
  const RewardSpec& reward(const std::string& name) const;

  /// Hash of the printed form; names the run directory.
  std::string hash() const;
};

/// Lander defaults with the S_orig/S_more/S_less and f/f_r1/f_r2/f_r3 candidates.
PipelineConfig default_pipeline_config();

/// Values not present in `text` keep their defaults; unknown keys are errors.
PipelineConfig parse_pipeline_config(const std::string& text, const std::string& source = "<config>");
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Complete TOML form; parse_pipeline_config(to_toml(c)) reproduces c.
std::string to_toml(const PipelineConfig& config);

}  // namespace orl
