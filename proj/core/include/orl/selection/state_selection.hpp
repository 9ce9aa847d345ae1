#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "orl/datastore/dataset.hpp"
#include "orl/env/spaces.hpp"
#include "orl/offline/cql.hpp"
#include "orl/ope/fqe.hpp"
#include "orl/policy.hpp"

namespace orl {

struct StateSelectionRow {
  std::string state_space;
  std::size_t dimension = 0;
  std::string policy_id;
  double value = 0.0;  // DM-FQE estimate
  double standard_error = 0.0;
  double final_fqe_loss = 0.0;
  // Optional live audit columns, filled only by audit runs.
  std::optional<double> online_mean;
  std::optional<double> online_stddev;
};

struct StateSelectionReport {
  std::string reward_spec;
  std::string evaluator_context;
  std::uint64_t seed = 0;
  std::vector<StateSelectionRow> rows;  // descending by value
  std::string winner;
  bool vacuous = false;  // a single candidate
};

/// Orders rows by value (descending), then dimension (ascending), then name.
void rank_state_rows(std::vector<StateSelectionRow>& rows);

struct StateSelectionResult {
  StateSelectionReport report;
  std::vector<PolicyArtifact> policies;  // candidate order
};

/// Trains one CQL policy per candidate, fits FQE for it on the union of all
/// candidates, and ranks the candidates by the direct-method estimate.
/// `jobs` > 1 runs candidates on worker threads; results do not depend on it.
StateSelectionResult select_state_space(const std::vector<StateSpaceSpec>& candidates, const Dataset& dataset,
                                        const RewardSpec& reward, const CqlConfig& cql, const FqeConfig& fqe,
                                        std::uint64_t seed, int jobs = 1);

/// Runs `count` independent jobs on up to `jobs` threads; the first exception
/// in job order is rethrown after all workers stop.
void run_jobs(std::size_t count, int jobs, const std::function<void(std::size_t)>& job);

}  // namespace orl
