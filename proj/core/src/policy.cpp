#include "orl/policy.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "orl/error.hpp"
#include "orl/funcapprox/mlp_io.hpp"

namespace orl {

int argmax_lowest(std::span<const double> values) {
  if (values.empty()) throw UsageError("argmax of an empty vector");
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

std::pair<int, double> epsilon_greedy(std::span<const double> q_values, double epsilon, Rng& rng) {
  if (q_values.empty()) throw UsageError("epsilon-greedy over no actions");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw UsageError("epsilon must lie in [0, 1]");
  const int n = static_cast<int>(q_values.size());
  const int greedy = argmax_lowest(q_values);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int action = greedy;
  if (epsilon > 0.0 && unit(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    action = pick(rng);
  }
  const double propensity = epsilon / n + (action == greedy ? 1.0 - epsilon : 0.0);
  return {action, propensity};
}

void PolicyArtifact::validate() const {
  if (action_count <= 0) throw ValidationError("policy '" + id + "' has no actions");
  if (q_model.layer_sizes().empty()) throw ValidationError("policy '" + id + "' has no model");
  if (static_cast<std::size_t>(q_model.input_dim()) != state_spec.dim()) {
    throw ValidationError("policy '" + id + "': model input dimension " + std::to_string(q_model.input_dim()) +
                          " does not match state space '" + state_spec.name + "' (" +
                          std::to_string(state_spec.dim()) + ")");
  }
  if (q_model.output_dim() != action_count) {
    throw ValidationError("policy '" + id + "': model output does not match action count");
  }
  if (rule.kind == SelectionRule::Kind::epsilon_greedy && !(rule.epsilon >= 0.0 && rule.epsilon <= 1.0)) {
    throw ValidationError("policy '" + id + "': epsilon outside [0, 1]");
  }
}

void PolicyArtifact::probabilities_from_q(std::span<const double> q, std::span<double> out) const {
  const int greedy = argmax_lowest(q);
  const double eps = rule.kind == SelectionRule::Kind::epsilon_greedy ? rule.epsilon : 0.0;
  const double floor = eps / static_cast<double>(q.size());
  for (std::size_t a = 0; a < q.size(); ++a) out[a] = floor;
  out[static_cast<std::size_t>(greedy)] += 1.0 - eps;
}

int PolicyArtifact::greedy_action(std::span<const double> projected_state) const {
  const Eigen::VectorXd q = q_model.forward(projected_state);
  return argmax_lowest(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())));
}

std::vector<double> PolicyArtifact::probabilities(std::span<const double> projected_state) const {
  const Eigen::VectorXd q = q_model.forward(projected_state);
  std::vector<double> out(static_cast<std::size_t>(q.size()));
  probabilities_from_q(std::span<const double>(q.data(), out.size()), out);
  return out;
}

Eigen::MatrixXd PolicyArtifact::probabilities_batch(const Eigen::MatrixXd& projected_states) const {
  const Eigen::MatrixXd q = q_model.forward_batch(projected_states);
  Eigen::MatrixXd probs(q.rows(), q.cols());
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    probabilities_from_q(std::span<const double>(q.col(c).data(), static_cast<std::size_t>(q.rows())),
                         std::span<double>(probs.col(c).data(), static_cast<std::size_t>(q.rows())));
  }
  return probs;
}

std::vector<double> PolicyArtifact::probabilities_union(std::span<const double> union_vec,
                                                        StreamPosition position) const {
  return probabilities(project_state(union_vec, state_spec, position));
}

int PolicyArtifact::greedy_action_union(std::span<const double> union_vec, StreamPosition position) const {
  return greedy_action(project_state(union_vec, state_spec, position));
}

namespace {

using json = nlohmann::ordered_json;

json spec_to_json(const StateSpaceSpec& s) {
  json j;
  j["name"] = s.name;
  j["indices"] = s.indices;
  j["noise_dims"] = s.noise_dims;
  j["noise_stream"] = s.noise_stream;
  return j;
}

StateSpaceSpec spec_from_json(const json& j) {
  StateSpaceSpec s;
  s.name = j.at("name").get<std::string>();
  s.indices = j.at("indices").get<std::vector<int>>();
  s.noise_dims = j.at("noise_dims").get<int>();
  s.noise_stream = j.at("noise_stream").get<std::string>();
  return s;
}

}  // namespace

std::string policy_sidecar(const PolicyArtifact& a, const std::string& model_file) {
  json j;
  j["id"] = a.id;
  j["model_file"] = model_file;
  j["state_spec"] = spec_to_json(a.state_spec);
  j["reward_spec"] = a.reward_spec;
  j["action_count"] = a.action_count;
  json rule;
  rule["kind"] = a.rule.kind == SelectionRule::Kind::greedy ? "greedy" : "epsilon_greedy";
  rule["epsilon"] = a.rule.epsilon;
  j["selection"] = rule;
  json meta;
  meta["config_hash"] = a.config_hash;
  meta["seed"] = a.seed;
  j["metadata"] = meta;
  return j.dump(2) + "\n";
}

void save_policy(const std::filesystem::path& path, const PolicyArtifact& artifact) {
  artifact.validate();
  std::filesystem::path model_path = path;
  model_path.replace_extension(".mlp");
  save_mlp(model_path, artifact.q_model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << policy_sidecar(artifact, model_path.filename().string());
  if (!out) throw IoError("write failed: " + path.string());
}

PolicyArtifact load_policy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open policy artifact " + path.string());
  PolicyArtifact a;
  std::string model_file;
  try {
    json j = json::parse(in);
    a.id = j.at("id").get<std::string>();
    model_file = j.at("model_file").get<std::string>();
    a.state_spec = spec_from_json(j.at("state_spec"));
    a.reward_spec = j.at("reward_spec").get<std::string>();
    a.action_count = j.at("action_count").get<int>();
    const auto& rule = j.at("selection");
    const auto kind = rule.at("kind").get<std::string>();
    if (kind == "greedy") {
      a.rule = SelectionRule::greedy();
    } else if (kind == "epsilon_greedy") {
      a.rule = SelectionRule::eps_greedy(rule.at("epsilon").get<double>());
    } else {
      throw ValidationError("unknown selection rule '" + kind + "'");
    }
    a.config_hash = j.at("metadata").at("config_hash").get<std::string>();
    a.seed = j.at("metadata").at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": malformed policy sidecar: " + e.what());
  }
  a.q_model = load_mlp(path.parent_path() / model_file);
  a.validate();
  return a;
}

}  // namespace orl
