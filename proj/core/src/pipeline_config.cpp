#include "orl/pipeline/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "orl/error.hpp"
#include "orl/random.hpp"
#include "orl/util/format.hpp"
#include "toml_lite.hpp"

namespace orl {

namespace {

using json = nlohmann::ordered_json;

// Reads keys out of one table and rejects anything left over.
class Table {
 public:
  Table(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError("'" + path_ + "' must be a table");
  }
  ~Table() = default;

  void get(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) fail(key, "a number");
      out = v->get<double>();
    }
  }
  void get(const char* key, int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) fail(key, "an integer");
      out = v->get<int>();
    }
  }
  void get(const char* key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) fail(key, "a boolean");
      out = v->get<bool>();
    }
  }
  void get(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) fail(key, "a string");
      out = v->get<std::string>();
    }
  }
  void get(const char* key, std::vector<int>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) fail(key, "an array of integers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number_integer()) fail(key, "an array of integers");
        out.push_back(x.get<int>());
      }
    }
  }
  void get(const char* key, std::vector<double>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) fail(key, "an array of numbers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) fail(key, "an array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }
  void get(const char* key, std::vector<std::uint64_t>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) fail(key, "an array of non-negative integers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number_integer() || x.get<std::int64_t>() < 0) fail(key, "an array of non-negative integers");
        out.push_back(x.get<std::uint64_t>());
      }
    }
  }
  const json* sub(const char* key) { return take(key); }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) throw ValidationError("unknown key '" + prefix() + k + "'");
    }
  }

 private:
  const json* take(const char* key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string prefix() const { return path_.empty() ? "" : path_ + "."; }
  [[noreturn]] void fail(const char* key, const char* what) const {
    throw ValidationError("'" + prefix() + key + "' must be " + what);
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void read_env(const json& j, LanderConfig& c) {
  Table t(j, "env");
  t.get("dt", c.dt);
  t.get("gravity", c.gravity);
  t.get("thrust_main", c.thrust_main);
  t.get("thrust_side", c.thrust_side);
  t.get("torque_side", c.torque_side);
  t.get("step_budget", c.step_budget);
  t.get("action_repeat", c.action_repeat);
  t.get("spawn_altitude", c.spawn_altitude);
  t.get("spawn_vx_range", c.spawn_vx_range);
  t.get("spawn_vy_range", c.spawn_vy_range);
  t.get("landing_bonus", c.landing_bonus);
  t.get("crash_penalty", c.crash_penalty);
  t.get("pad_half_width", c.pad_half_width);
  t.get("landing_vy_tol", c.landing_vy_tol);
  t.get("landing_theta_tol", c.landing_theta_tol);
  t.get("x_limit", c.x_limit);
  t.get("y_limit", c.y_limit);
  t.get("cost_main", c.cost_main);
  t.get("cost_side", c.cost_side);
  t.get("shaping_position", c.shaping_position);
  t.get("shaping_velocity", c.shaping_velocity);
  t.get("shaping_angle", c.shaping_angle);
  t.finish();
}

void read_ddqn(const json& j, DdqnConfig& c) {
  Table t(j, "ddqn");
  t.get("gamma", c.gamma);
  t.get("step_size", c.step_size);
  t.get("batch_size", c.batch_size);
  t.get("tau", c.tau);
  t.get("replay_capacity", c.replay_capacity);
  t.get("epsilon_start", c.epsilon_start);
  t.get("epsilon_end", c.epsilon_end);
  t.get("epsilon_decay_steps", c.epsilon_decay_steps);
  t.get("epsilon_decay_fraction", c.epsilon_decay_fraction);
  t.get("episodes", c.episodes);
  t.get("hidden", c.hidden);
  t.get("learning_starts", c.learning_starts);
  t.get("train_every", c.train_every);
  t.get("avg_checkpoint_episode", c.avg_checkpoint_episode);
  t.get("moving_average_window", c.moving_average_window);
  t.get("checkpoint_greedy", c.checkpoint_greedy);
  t.finish();
}

void read_cql(const json& j, CqlConfig& c) {
  Table t(j, "cql");
  t.get("alpha", c.alpha);
  t.get("gamma", c.gamma);
  t.get("step_size", c.step_size);
  t.get("batch_size", c.batch_size);
  t.get("gradient_steps", c.gradient_steps);
  t.get("tau", c.tau);
  t.get("dataset_fraction", c.dataset_fraction);
  t.get("hidden", c.hidden);
  t.finish();
}

void read_fqe(const json& j, FqeConfig& c) {
  Table t(j, "fqe");
  t.get("iterations", c.iterations);
  t.get("steps_per_iteration", c.steps_per_iteration);
  t.get("gamma", c.gamma);
  t.get("step_size", c.step_size);
  t.get("batch_size", c.batch_size);
  t.get("hidden", c.hidden);
  t.finish();
}

void read_selection(const json& j, PipelineConfig& c) {
  Table t(j, "selection");
  t.get("reward", c.selection_reward);
  t.get("offline_state_space", c.offline_state_space);
  t.get("cql_fractions", c.cql_fractions);
  t.get("audit_episodes", c.audit_episodes);
  t.get("bins", c.binning.bins);
  t.get("lo", c.binning.lo);
  t.get("hi", c.binning.hi);
  t.get("smoothing", c.binning.smoothing);
  t.finish();
}

StateSpaceSpec read_state_space(const json& j) {
  Table t(j, "state_space");
  StateSpaceSpec s;
  t.get("name", s.name);
  t.get("indices", s.indices);
  t.get("noise_dims", s.noise_dims);
  t.get("noise_stream", s.noise_stream);
  t.finish();
  if (s.name.empty()) throw ValidationError("every [[state_space]] needs a name");
  return s;
}

RewardSpec read_reward(const json& j) {
  Table t(j, "reward");
  RewardSpec r;
  t.get("name", r.name);
  t.get("state_based", r.include_state_based);
  t.get("action_based", r.include_action_based);
  t.get("terminal", r.include_terminal);
  t.get("state_weight", r.state_weight);
  t.get("action_weight", r.action_weight);
  t.get("terminal_weight", r.terminal_weight);
  t.finish();
  if (r.name.empty()) throw ValidationError("every [[reward]] needs a name");
  return r;
}

std::string num(double x) { return format_double(x); }

template <class T>
std::string list(const std::vector<T>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += num(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out + "]";
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string boolean(bool b) { return b ? "true" : "false"; }

}  // namespace

void PipelineConfig::validate() const {
  auto wrap = [](auto&& f) {
    try {
      f();
    } catch (const UsageError& e) {
      throw ValidationError(e.what());
    }
  };
  wrap([&] { env.validate(); });
  wrap([&] { ddqn.validate(); });
  wrap([&] { cql.validate(); });
  wrap([&] { fqe.validate(); });
  wrap([&] { binning.validate(); });
  if (seeds.empty()) throw ValidationError("config: seeds must be nonempty");
  if (state_spaces.empty()) throw ValidationError("config: at least one [[state_space]] is required");
  if (rewards.empty()) throw ValidationError("config: at least one [[reward]] is required");
  std::set<std::string> names;
  const std::size_t union_dim = lander_feature_names().size();
  for (const auto& s : state_spaces) {
    if (!names.insert(s.name).second) throw ValidationError("config: duplicate state space '" + s.name + "'");
    wrap([&] { s.validate(union_dim); });
  }
  names.clear();
  for (const auto& r : rewards) {
    if (!names.insert(r.name).second) throw ValidationError("config: duplicate reward '" + r.name + "'");
    wrap([&] { r.validate(); });
  }
  state_space(offline_state_space);
  reward(selection_reward);
  if (cql_fractions.size() != 3) throw ValidationError("config: cql_fractions needs three entries (worst, avg, best)");
  for (double f : cql_fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw ValidationError("config: cql_fractions must lie in (0, 1]");
  }
  if (audit_episodes <= 0) throw ValidationError("config: audit_episodes must be positive");
  if (jobs <= 0) throw ValidationError("config: jobs must be positive");
  if (output_dir.empty()) throw ValidationError("config: output_dir must be nonempty");
}

const StateSpaceSpec& PipelineConfig::state_space(const std::string& name) const {
  for (const auto& s : state_spaces) {
    if (s.name == name) return s;
  }
  throw ValidationError("unknown state space '" + name + "'");
}

const RewardSpec& PipelineConfig::reward(const std::string& name) const {
  for (const auto& r : rewards) {
    if (r.name == name) return r;
  }
  throw ValidationError("unknown reward '" + name + "'");
}

std::string PipelineConfig::hash() const { return hex64(fnv1a64(to_toml(*this))); }

PipelineConfig default_pipeline_config() {
  PipelineConfig c;
  c.state_spaces = {lander_state_original(), lander_state_more(), lander_state_less()};
  c.rewards = {reward_full(), reward_terminal_only(), reward_action_terminal(), reward_state_terminal()};
  return c;
}

PipelineConfig parse_pipeline_config(const std::string& text, const std::string& source) {
  const json root = detail::parse_toml(text, source);
  PipelineConfig c = default_pipeline_config();
  try {
    Table t(root, "");
    t.get("seeds", c.seeds);
    t.get("output_dir", c.output_dir);
    t.get("jobs", c.jobs);
    if (const json* j = t.sub("env")) read_env(*j, c.env);
    if (const json* j = t.sub("ddqn")) read_ddqn(*j, c.ddqn);
    if (const json* j = t.sub("cql")) read_cql(*j, c.cql);
    if (const json* j = t.sub("fqe")) read_fqe(*j, c.fqe);
    if (const json* j = t.sub("selection")) read_selection(*j, c);
    // A candidate list given in the file replaces the default list.
    if (const json* j = t.sub("state_space")) {
      if (!j->is_array()) throw ValidationError("'state_space' must be an array of tables ([[state_space]])");
      c.state_spaces.clear();
      for (const auto& e : *j) c.state_spaces.push_back(read_state_space(e));
    }
    if (const json* j = t.sub("reward")) {
      if (!j->is_array()) throw ValidationError("'reward' must be an array of tables ([[reward]])");
      c.rewards.clear();
      for (const auto& e : *j) c.rewards.push_back(read_reward(e));
    }
    t.finish();
    c.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_pipeline_config(ss.str(), path.string());
}

std::string to_toml(const PipelineConfig& c) {
  std::ostringstream os;
  os << "seeds = " << list(c.seeds) << "\n";
  os << "output_dir = " << quoted(c.output_dir) << "\n";
  os << "jobs = " << c.jobs << "\n";

  const LanderConfig& e = c.env;
  os << "\n[env]\n";
  os << "dt = " << num(e.dt) << "\n";
  os << "gravity = " << num(e.gravity) << "\n";
  os << "thrust_main = " << num(e.thrust_main) << "\n";
  os << "thrust_side = " << num(e.thrust_side) << "\n";
  os << "torque_side = " << num(e.torque_side) << "\n";
  os << "step_budget = " << e.step_budget << "\n";
  os << "action_repeat = " << e.action_repeat << "\n";
  os << "spawn_altitude = " << num(e.spawn_altitude) << "\n";
  os << "spawn_vx_range = " << num(e.spawn_vx_range) << "\n";
  os << "spawn_vy_range = " << num(e.spawn_vy_range) << "\n";
  os << "landing_bonus = " << num(e.landing_bonus) << "\n";
  os << "crash_penalty = " << num(e.crash_penalty) << "\n";
  os << "pad_half_width = " << num(e.pad_half_width) << "\n";
  os << "landing_vy_tol = " << num(e.landing_vy_tol) << "\n";
  os << "landing_theta_tol = " << num(e.landing_theta_tol) << "\n";
  os << "x_limit = " << num(e.x_limit) << "\n";
  os << "y_limit = " << num(e.y_limit) << "\n";
  os << "cost_main = " << num(e.cost_main) << "\n";
  os << "cost_side = " << num(e.cost_side) << "\n";
  os << "shaping_position = " << num(e.shaping_position) << "\n";
  os << "shaping_velocity = " << num(e.shaping_velocity) << "\n";
  os << "shaping_angle = " << num(e.shaping_angle) << "\n";

  const DdqnConfig& d = c.ddqn;
  os << "\n[ddqn]\n";
  os << "gamma = " << num(d.gamma) << "\n";
  os << "step_size = " << num(d.step_size) << "\n";
  os << "batch_size = " << d.batch_size << "\n";
  os << "tau = " << num(d.tau) << "\n";
  os << "replay_capacity = " << d.replay_capacity << "\n";
  os << "epsilon_start = " << num(d.epsilon_start) << "\n";
  os << "epsilon_end = " << num(d.epsilon_end) << "\n";
  os << "epsilon_decay_steps = " << d.epsilon_decay_steps << "  # 0: epsilon_decay_fraction of the step budget\n";
  os << "epsilon_decay_fraction = " << num(d.epsilon_decay_fraction) << "\n";
  os << "episodes = " << d.episodes << "\n";
  os << "hidden = " << list(d.hidden) << "\n";
  os << "learning_starts = " << d.learning_starts << "\n";
  os << "train_every = " << d.train_every << "\n";
  os << "avg_checkpoint_episode = " << d.avg_checkpoint_episode << "\n";
  os << "moving_average_window = " << d.moving_average_window << "\n";
  os << "checkpoint_greedy = " << boolean(d.checkpoint_greedy) << "\n";

  const CqlConfig& q = c.cql;
  os << "\n[cql]\n";
  os << "alpha = " << num(q.alpha) << "\n";
  os << "gamma = " << num(q.gamma) << "\n";
  os << "step_size = " << num(q.step_size) << "\n";
  os << "batch_size = " << q.batch_size << "\n";
  os << "gradient_steps = " << q.gradient_steps << "\n";
  os << "tau = " << num(q.tau) << "\n";
  os << "dataset_fraction = " << num(q.dataset_fraction) << "\n";
  os << "hidden = " << list(q.hidden) << "\n";

  const FqeConfig& f = c.fqe;
  os << "\n[fqe]\n";
  os << "iterations = " << f.iterations << "\n";
  os << "steps_per_iteration = " << f.steps_per_iteration << "\n";
  os << "gamma = " << num(f.gamma) << "\n";
  os << "step_size = " << num(f.step_size) << "\n";
  os << "batch_size = " << f.batch_size << "\n";
  os << "hidden = " << list(f.hidden) << "\n";

  os << "\n[selection]\n";
  os << "reward = " << quoted(c.selection_reward) << "\n";
  os << "offline_state_space = " << quoted(c.offline_state_space) << "\n";
  os << "cql_fractions = " << list(c.cql_fractions) << "  # worst, avg, best\n";
  os << "audit_episodes = " << c.audit_episodes << "\n";
  os << "bins = " << c.binning.bins << "\n";
  os << "lo = " << num(c.binning.lo) << "\n";
  os << "hi = " << num(c.binning.hi) << "\n";
  os << "smoothing = " << num(c.binning.smoothing) << "\n";

  for (const auto& s : c.state_spaces) {
    os << "\n[[state_space]]\n";
    os << "name = " << quoted(s.name) << "\n";
    os << "indices = " << list(s.indices) << "\n";
    os << "noise_dims = " << s.noise_dims << "\n";
    os << "noise_stream = " << quoted(s.noise_stream) << "\n";
  }
  for (const auto& r : c.rewards) {
    os << "\n[[reward]]\n";
    os << "name = " << quoted(r.name) << "\n";
    os << "state_based = " << boolean(r.include_state_based) << "\n";
    os << "action_based = " << boolean(r.include_action_based) << "\n";
    os << "terminal = " << boolean(r.include_terminal) << "\n";
    os << "state_weight = " << num(r.state_weight) << "\n";
    os << "action_weight = " << num(r.action_weight) << "\n";
    os << "terminal_weight = " << num(r.terminal_weight) << "\n";
  }
  return os.str();
}

}  // namespace orl
