#include "orl/selection/state_selection.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <set>
#include <thread>

#include "orl/error.hpp"
#include "orl/ope/estimators.hpp"

namespace orl {

void rank_state_rows(std::vector<StateSelectionRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const StateSelectionRow& a, const StateSelectionRow& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.dimension != b.dimension) return a.dimension < b.dimension;
    return a.state_space < b.state_space;
  });
}

void run_jobs(std::size_t count, int jobs, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> errors(count);
  const auto workers = static_cast<std::size_t>(std::clamp<long>(jobs, 1, static_cast<long>(std::max<std::size_t>(count, 1))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

StateSelectionResult select_state_space(const std::vector<StateSpaceSpec>& candidates, const Dataset& dataset,
                                        const RewardSpec& reward, const CqlConfig& cql, const FqeConfig& fqe,
                                        std::uint64_t seed, int jobs) {
  if (candidates.empty()) throw UsageError("state-space selection needs at least one candidate");
  std::set<std::string> names;
  for (const auto& c : candidates) {
    if (!names.insert(c.name).second) throw UsageError("duplicate state-space candidate '" + c.name + "'");
    c.validate(dataset.union_dim());
  }
  const StateSpaceSpec context = union_space(candidates);

  StateSelectionResult result;
  result.policies.resize(candidates.size());
  std::vector<StateSelectionRow> rows(candidates.size());
  run_jobs(candidates.size(), jobs, [&](std::size_t i) {
    const auto& spec = candidates[i];
    PolicyArtifact policy =
        train_cql(dataset, spec, reward, cql, derive_seed(seed, "cql:" + spec.name), "cql_" + spec.name + "_" + reward.name);
    const QFunction q = fit_fqe(dataset, policy, reward, context, fqe, derive_seed(seed, "fqe:" + spec.name));
    const OpeReport est = estimate_dm_fqe(q, dataset, policy);
    StateSelectionRow row;
    row.state_space = spec.name;
    row.dimension = spec.dim();
    row.policy_id = policy.id;
    row.value = est.value;
    row.standard_error = est.standard_error;
    row.final_fqe_loss = q.loss_trace.empty() ? 0.0 : q.loss_trace.back();
    rows[i] = std::move(row);
    result.policies[i] = std::move(policy);
  });

  rank_state_rows(rows);
  result.report.reward_spec = reward.name;
  result.report.evaluator_context = context.name;
  result.report.seed = seed;
  result.report.rows = std::move(rows);
  result.report.winner = result.report.rows.front().state_space;
  result.report.vacuous = candidates.size() == 1;
  return result;
}

}  // namespace orl
