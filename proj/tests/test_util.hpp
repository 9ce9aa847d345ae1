#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "orl/datastore/dataset.hpp"
#include "orl/env/tabular.hpp"
#include "orl/policy.hpp"
#include "orl/random.hpp"

namespace testutil {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("orl_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::filesystem::path path_;
};

/// Small valid dataset with random features, uniform propensities over
/// `actions` and episodes of 1..max_len steps; the last episode is truncated.
inline orl::Dataset toy_dataset(int episodes, int dim, int actions, int max_len, std::uint64_t seed) {
  orl::Rng rng(seed);
  std::normal_distribution<double> n;
  std::uniform_int_distribution<int> len(1, max_len);
  std::uniform_int_distribution<int> act(0, actions - 1);
  orl::Dataset d;
  for (int i = 0; i < dim; ++i) d.header.feature_names.push_back("f" + std::to_string(i));
  d.header.action_count = actions;
  d.header.env_config_hash = "toy";
  d.header.collection_seed = seed;
  for (int e = 0; e < episodes; ++e) {
    orl::Episode ep{e, {}};
    const int steps = len(rng);
    std::vector<double> s(dim);
    for (double& x : s) x = n(rng);
    for (int t = 0; t < steps; ++t) {
      orl::Transition tr;
      tr.episode_id = e;
      tr.t = t;
      tr.state = s;
      for (double& x : s) x = n(rng);
      tr.next_state = s;
      tr.action = act(rng);
      tr.reward = {n(rng), -0.1 * std::abs(n(rng)), 0.0};
      tr.propensity = 1.0 / actions;
      if (t + 1 == steps) {
        tr.done = true;
        tr.truncated = e + 1 == episodes;
        if (!tr.truncated) tr.reward.terminal = n(rng) > 0 ? 100.0 : -100.0;
      }
      ep.steps.push_back(std::move(tr));
    }
    d.episodes.push_back(std::move(ep));
  }
  d.sync_counts();
  return d;
}

/// Policy over one-hot states acting greedily on `greedy[s]` with the given
/// rule; a single linear layer so Q(s, a) = [a == greedy[s]].
inline orl::PolicyArtifact table_policy(const std::vector<int>& greedy, int actions, orl::SelectionRule rule,
                                        std::string id = "table") {
  const int states = static_cast<int>(greedy.size());
  orl::PolicyArtifact p;
  p.id = std::move(id);
  p.q_model = orl::Mlp::zeros({states, actions});
  for (int s = 0; s < states; ++s) p.q_model.weight(0)(greedy[static_cast<std::size_t>(s)], s) = 1.0;
  p.state_spec.name = "onehot";
  for (int s = 0; s < states; ++s) p.state_spec.indices.push_back(s);
  p.reward_spec = "f";
  p.action_count = actions;
  p.rule = rule;
  return p;
}

/// Action-distribution table equivalent to table_policy().
inline orl::PolicyTable policy_table(const std::vector<int>& greedy, int actions, double epsilon) {
  const auto states = static_cast<Eigen::Index>(greedy.size());
  orl::PolicyTable t = orl::PolicyTable::Constant(states, actions, epsilon / actions);
  for (Eigen::Index s = 0; s < states; ++s) t(s, greedy[static_cast<std::size_t>(s)]) += 1.0 - epsilon;
  return t;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testutil
