#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orl/env/spaces.hpp"
#include "orl/funcapprox/mlp.hpp"
#include "orl/random.hpp"

namespace orl {

/// Index of the largest value; ties go to the lowest index.
int argmax_lowest(std::span<const double> values);

/// Samples an epsilon-greedy action and returns it with its exact probability
/// epsilon/|A| + (1 - epsilon) * [a == greedy].
std::pair<int, double> epsilon_greedy(std::span<const double> q_values, double epsilon, Rng& rng);

struct SelectionRule {
  enum class Kind { greedy, epsilon_greedy };
  Kind kind = Kind::greedy;
  double epsilon = 0.0;

  static SelectionRule greedy() { return {}; }
  static SelectionRule eps_greedy(double eps) { return {Kind::epsilon_greedy, eps}; }
  bool operator==(const SelectionRule&) const = default;
};

/// A Q-network together with the state projection it consumes and the rule
/// turning Q-values into action probabilities.
struct PolicyArtifact {
  std::string id;
  Mlp q_model;
  StateSpaceSpec state_spec;
  std::string reward_spec;
  int action_count = 0;
  SelectionRule rule;
  std::string config_hash;
  std::uint64_t seed = 0;

  /// Throws ValidationError when the network shape disagrees with the spec.
  void validate() const;

  int greedy_action(std::span<const double> projected_state) const;
  std::vector<double> probabilities(std::span<const double> projected_state) const;
  /// Action probabilities for a batch of projected states (actions x batch).
  Eigen::MatrixXd probabilities_batch(const Eigen::MatrixXd& projected_states) const;
  /// Probabilities computed from Q-values directly.
  void probabilities_from_q(std::span<const double> q, std::span<double> out) const;

  /// Convenience wrappers working on union vectors.
  std::vector<double> probabilities_union(std::span<const double> union_vec, StreamPosition position) const;
  int greedy_action_union(std::span<const double> union_vec, StreamPosition position) const;

  bool operator==(const PolicyArtifact&) const = default;
};

/// Writes `<stem>.json` sidecar and `<stem>.mlp` model next to each other.
/// `path` names the sidecar.
void save_policy(const std::filesystem::path& path, const PolicyArtifact& artifact);
PolicyArtifact load_policy(const std::filesystem::path& path);

/// Sidecar JSON text (stable key order) for byte comparisons and hashing.
std::string policy_sidecar(const PolicyArtifact& artifact, const std::string& model_file);

}  // namespace orl
