#include "lander_criteria.hpp"

#include <chrono>
#include <cstdio>

#include "orl/offline/cql.hpp"
#include "orl/online/audit.hpp"
#include "orl/online/collect.hpp"
#include "orl/ope/estimators.hpp"
#include "orl/ope/fqe.hpp"
#include "orl/random.hpp"
#include "orl/selection/reward_selection.hpp"
#include "orl/selection/state_selection.hpp"

namespace acceptance {

double kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double score = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = (a[i] - a[j]) * (b[i] - b[j]);
      if (s > 0.0) score += 1.0;
      if (s < 0.0) score -= 1.0;
      pairs += 1.0;
    }
  }
  return pairs > 0.0 ? score / pairs : 1.0;
}

namespace {

void score_family(FamilyScores& fam, const std::vector<orl::PolicyArtifact>& policies, const orl::Dataset& data,
                  const orl::PipelineConfig& config, std::uint64_t seed, const orl::StateSpaceSpec& context,
                  bool verbose) {
  const orl::RewardSpec f = orl::reward_full();
  for (const auto& p : policies) {
    fam.ids.push_back(p.id);
    orl::set_live_environment_allowed(true);
    const orl::AuditResult audit =
        orl::audit_online(p, config.env, config.audit_episodes, orl::derive_seed(seed, "audit:" + p.id), f);
    orl::set_live_environment_allowed(false);
    fam.online.push_back(audit.mean_return());
    const orl::OpeReport is = orl::estimate_is(data, p, f, config.fqe.gamma, false);
    fam.is.push_back(is.value);
    const orl::QFunction q =
        orl::fit_fqe(data, p, f, context, config.fqe, orl::derive_seed(seed, "fqe:" + p.id));
    const orl::OpeReport dm = orl::estimate_dm_fqe(q, data, p);
    fam.dm.push_back(dm.value);
    if (verbose) {
      std::printf("    %-14s online %9.2f (landed %.2f)  IS %10.4g (ess %.1f, nonzero %zu)  DM %9.3f\n", p.id.c_str(),
                  audit.mean_return(), audit.landing_rate(), is.value, is.diagnostics.effective_sample_size,
                  is.diagnostics.nonzero_weights, dm.value);
      std::fflush(stdout);
    }
  }
}

}  // namespace

LanderSeedResult run_lander_seed(const orl::PipelineConfig& config, std::uint64_t seed, bool verbose) {
  const auto start = std::chrono::steady_clock::now();
  LanderSeedResult r;
  r.seed = seed;

  orl::set_live_environment_allowed(true);
  const orl::CollectResult collected = orl::collect_run(config.ddqn, config.env, seed);
  orl::set_live_environment_allowed(false);
  const orl::Dataset& data = collected.dataset;
  if (verbose) {
    std::printf("  seed %llu: %zu episodes, %zu transitions, final moving average %.2f\n",
                static_cast<unsigned long long>(seed), data.episodes.size(), data.transition_count(),
                collected.curve.empty() ? 0.0 : collected.curve.back().moving_average);
    std::printf("    moving average:");
    for (const auto& p : collected.curve) {
      if (p.episode % 100 == 0) std::printf(" %d:%.1f", p.episode, p.moving_average);
    }
    for (const auto& cp : collected.checkpoints) std::printf("  [%s @ %d]", cp.label.c_str(), cp.episode);
    std::printf("\n");
  }

  const orl::StateSpaceSpec context = orl::union_space(config.state_spaces);
  std::vector<orl::PolicyArtifact> ddqn;
  for (const char* label : {"random", "avg", "best"}) ddqn.push_back(collected.find(label)->policy);
  score_family(r.ddqn, ddqn, data, config, seed, context, verbose);

  const orl::StateSpaceSpec& offline = config.state_space(config.offline_state_space);
  const orl::RewardSpec& f = config.reward(config.selection_reward);
  std::vector<orl::PolicyArtifact> cql;
  const char* labels[] = {"cql_worst", "cql_avg", "cql_best"};
  for (int i = 0; i < 3; ++i) {
    orl::CqlConfig c = config.cql;
    c.dataset_fraction = config.cql_fractions[static_cast<std::size_t>(i)];
    cql.push_back(orl::train_cql(data, offline, f, c, orl::derive_seed(seed, labels[i]), labels[i]));
  }
  score_family(r.cql, cql, data, config, seed, context, verbose);

  const orl::StateSelectionResult sel =
      orl::select_state_space(config.state_spaces, data, f, config.cql, config.fqe, seed, config.jobs);
  r.state_winner = sel.report.winner;
  for (std::size_t i = 0; i < config.state_spaces.size(); ++i) {
    const auto& policy = sel.policies[i];
    r.state_names.push_back(config.state_spaces[i].name);
    for (const auto& row : sel.report.rows) {
      if (row.state_space == config.state_spaces[i].name) r.state_ope.push_back(row.value);
    }
    orl::set_live_environment_allowed(true);
    const orl::AuditResult audit = orl::audit_online(policy, config.env, config.audit_episodes,
                                                     orl::derive_seed(seed, "audit:" + policy.id), orl::reward_full());
    orl::set_live_environment_allowed(false);
    r.state_online.push_back(audit.mean_return());
    if (verbose) {
      std::printf("    %-8s OPE %9.3f  online %9.2f (landed %.2f)\n", config.state_spaces[i].name.c_str(),
                  r.state_ope.back(), audit.mean_return(), audit.landing_rate());
    }
  }

  const orl::RewardSelectionReport rew =
      orl::select_reward(config.rewards, cql[2], cql[0], data, config.fqe, seed, config.binning, config.jobs);
  for (const auto& row : rew.rows) {
    r.reward_names.push_back(row.reward_spec);
    r.reward_js.push_back(row.js);
    r.reward_kl.push_back(row.kl);
    r.reward_dv.push_back(row.mean_difference);
    if (verbose) {
      std::printf("    %-5s dV %8.4f  JS %.4f  KL %.4f%s\n", row.reward_spec.c_str(), row.mean_difference, row.js,
                  row.kl, row.degenerate ? " (degenerate)" : "");
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (verbose) std::printf("  seed %llu took %.1f s\n", static_cast<unsigned long long>(seed), r.seconds);
  return r;
}

}  // namespace acceptance
