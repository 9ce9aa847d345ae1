// orl: command-line front end for the offline design pipeline.
//
// Every command resolves a PipelineConfig (defaults, then --config, then
// overrides), picks a seed (--seed, else ORL_SEED, else the first configured
// seed) and writes under <output_dir>/<config-hash>/<seed>/.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "orl/datastore/dataset_io.hpp"
#include "orl/error.hpp"
#include "orl/offline/cql.hpp"
#include "orl/online/audit.hpp"
#include "orl/online/collect.hpp"
#include "orl/ope/estimators.hpp"
#include "orl/ope/fqe.hpp"
#include "orl/ope/report.hpp"
#include "orl/pipeline/config.hpp"
#include "orl/selection/report.hpp"
#include "orl/util/allocator.hpp"
#include "orl/util/format.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct Run {
  orl::PipelineConfig config;
  std::uint64_t seed = 0;
  fs::path dir;
};

std::uint64_t parse_seed(const std::string& text, const char* what) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw orl::UsageError(std::string(what) + " is not a non-negative integer: '" + text + "'");
  }
  return v;
}

orl::PipelineConfig load_config(const std::string& path) {
  if (path.empty()) return orl::default_pipeline_config();
  if (!fs::exists(path)) throw orl::IoError("config file not found: " + path);
  return orl::load_pipeline_config(path);
}

// Config edits (overrides) must happen before the directory is named.
Run resolve(const Common& c, orl::PipelineConfig config) {
  config.validate();
  Run run;
  if (c.seed) {
    run.seed = *c.seed;
  } else if (const char* env = std::getenv("ORL_SEED"); env != nullptr && *env != '\0') {
    run.seed = parse_seed(env, "ORL_SEED");
  } else {
    run.seed = config.seeds.front();
  }
  const fs::path root = c.out.empty() ? fs::path(config.output_dir) : fs::path(c.out);
  run.dir = root / config.hash() / std::to_string(run.seed);
  run.config = std::move(config);
  return run;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw orl::IoError("cannot write " + path.string());
  out << text;
  if (!out) throw orl::IoError("write failed: " + path.string());
}

std::string rel(const Run& run, const fs::path& p) { return p.lexically_relative(run.dir).generic_string(); }

// manifest.json keeps one entry per command; rerunning a command replaces its
// entry in place so identical reruns leave identical bytes.
void record(const Run& run, const std::string& command, const json& inputs, const std::vector<fs::path>& outputs) {
  const fs::path path = run.dir / "manifest.json";
  json m;
  if (fs::exists(path)) {
    std::ifstream in(path);
    try {
      m = json::parse(in);
    } catch (const json::exception&) {
      m = json();
    }
  }
  if (!m.is_object()) m = json::object();
  m["config_hash"] = run.config.hash();
  m["seed"] = run.seed;
  if (!m.contains("commands")) m["commands"] = json::object();
  json entry;
  entry["inputs"] = inputs;
  json files = json::array();
  for (const auto& o : outputs) files.push_back(rel(run, o));
  entry["outputs"] = files;
  m["commands"][command] = entry;
  write_text(path, m.dump(2) + "\n");
  write_text(run.dir / "config.toml", orl::to_toml(run.config));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void add_common(CLI::App* app, Common& c, bool with_out = true) {
  app->add_option("--config", c.config_path, "pipeline config (TOML)");
  app->add_option("--seed", c.seed, "seed (overrides ORL_SEED and the config)");
  if (with_out) app->add_option("--out", c.out, "output root (default: config output_dir)");
}

// ---------------------------------------------------------------------------

int cmd_print_config(const Common& c) {
  std::cout << orl::to_toml(load_config(c.config_path));
  return 0;
}

int cmd_collect(const Common& c, std::optional<int> episodes, bool gzip, bool quiet) {
  orl::PipelineConfig config = load_config(c.config_path);
  if (episodes) config.ddqn.episodes = *episodes;
  const Run run = resolve(c, config);

  auto progress = [&](const orl::CurvePoint& p) {
    if (quiet) return;
    if (p.episode % 50 == 0 || p.episode == run.config.ddqn.episodes) {
      std::cerr << "episode " << p.episode << "  return " << orl::format_double(p.episode_return)
                << "  moving average " << orl::format_double(p.moving_average) << "\n";
    }
  };
  const orl::CollectResult result = orl::collect_run(run.config.ddqn, run.config.env, run.seed, progress);

  std::vector<fs::path> outputs;
  const fs::path dataset = run.dir / (std::string("dataset") + (gzip ? orl::kCompressedDatasetExtension
                                                                      : orl::kDatasetExtension));
  fs::create_directories(run.dir);
  orl::write_dataset(dataset, result.dataset);
  outputs.push_back(dataset);

  for (const auto& cp : result.checkpoints) {
    const fs::path p = run.dir / "checkpoints" / (cp.policy.id + ".json");
    fs::create_directories(p.parent_path());
    orl::save_policy(p, cp.policy);
    outputs.push_back(p);
  }

  std::string curve = "episode,return,moving_average,steps,landed\n";
  for (const auto& p : result.curve) {
    curve += std::to_string(p.episode) + ',' + orl::format_double(p.episode_return) + ',' +
             orl::format_double(p.moving_average) + ',' + std::to_string(p.steps) + ',' + (p.landed ? "1" : "0") +
             "\n";
  }
  const fs::path curve_path = run.dir / "learning_curve.csv";
  write_text(curve_path, curve);
  outputs.push_back(curve_path);

  json checkpoints = json::array();
  for (const auto& cp : result.checkpoints) {
    checkpoints.push_back({{"label", cp.label}, {"episode", cp.episode}, {"moving_average", cp.moving_average}});
  }
  const fs::path summary = run.dir / "collect.json";
  write_text(summary, json{{"episodes", result.dataset.episodes.size()},
                           {"transitions", result.dataset.transition_count()},
                           {"checkpoints", checkpoints}}
                          .dump(2) +
                          "\n");
  outputs.push_back(summary);
  record(run, "collect", json{{"gzip", gzip}}, outputs);
  std::cout << dataset.string() << "\n";
  return 0;
}

std::string fraction_tag(double f) {
  std::string s = orl::format_double(f);
  for (char& ch : s) {
    if (ch == '.') ch = 'p';
  }
  return s;
}

int cmd_train_offline(const Common& c, const std::string& dataset_path, const std::string& state_name,
                      std::string reward_name, std::optional<double> fraction, bool family) {
  orl::set_live_environment_allowed(false);
  const Run run = resolve(c, load_config(c.config_path));
  if (reward_name.empty()) reward_name = run.config.selection_reward;
  const std::string state = state_name.empty() ? run.config.offline_state_space : state_name;
  const orl::StateSpaceSpec& spec = run.config.state_space(state);
  const orl::RewardSpec& reward = run.config.reward(reward_name);
  const orl::Dataset dataset = orl::read_dataset(dataset_path);

  struct Job {
    std::string id;
    double fraction;
  };
  std::vector<Job> jobs;
  if (family) {
    const char* labels[] = {"worst", "avg", "best"};
    for (int i = 0; i < 3; ++i) {
      jobs.push_back({std::string("cql_") + labels[i] + "_" + spec.name + "_" + reward.name,
                      run.config.cql_fractions[static_cast<std::size_t>(i)]});
    }
  } else {
    const double f = fraction.value_or(run.config.cql.dataset_fraction);
    jobs.push_back({"cql_" + spec.name + "_" + reward.name + "_" + fraction_tag(f), f});
  }

  std::vector<fs::path> outputs;
  for (const auto& job : jobs) {
    orl::CqlConfig cql = run.config.cql;
    cql.dataset_fraction = job.fraction;
    const orl::PolicyArtifact policy =
        orl::train_cql(dataset, spec, reward, cql, orl::derive_seed(run.seed, "train-offline:" + job.id), job.id);
    const fs::path p = run.dir / "policies" / (job.id + ".json");
    fs::create_directories(p.parent_path());
    orl::save_policy(p, policy);
    outputs.push_back(p);
    std::cout << p.string() << "\n";
  }
  record(run, family ? "train-offline-family" : "train-offline:" + jobs.front().id,
         json{{"dataset", dataset_path}, {"state_space", spec.name}, {"reward", reward.name}}, outputs);
  return 0;
}

orl::StateSpaceSpec evaluator_context(const orl::PipelineConfig& config, const orl::PolicyArtifact& policy) {
  try {
    orl::StateSpaceSpec u = orl::union_space(config.state_spaces);
    if (orl::is_projection_of(policy.state_spec, u)) return u;
  } catch (const orl::UsageError&) {
  }
  return policy.state_spec;
}

int cmd_evaluate(const Common& c, const std::string& dataset_path, const std::vector<std::string>& policy_paths,
                 const std::string& estimators, std::string reward_name) {
  orl::set_live_environment_allowed(false);
  const Run run = resolve(c, load_config(c.config_path));
  const orl::Dataset dataset = orl::read_dataset(dataset_path);
  const std::vector<std::string> wanted = split_list(estimators);
  if (wanted.empty()) throw orl::UsageError("no estimator requested");
  for (const auto& e : wanted) {
    if (e != "is" && e != "wis" && e != "dm" && e != "dr") {
      throw orl::UsageError("unknown estimator '" + e + "' (expected is, wis, dm, dr)");
    }
  }

  std::vector<fs::path> outputs;
  json inputs{{"dataset", dataset_path}, {"estimators", estimators}};
  json policies = json::array();
  for (const auto& path : policy_paths) {
    const orl::PolicyArtifact policy = orl::load_policy(path);
    policies.push_back(path);
    std::string rname = reward_name;
    if (rname.empty()) {
      const bool known = std::any_of(run.config.rewards.begin(), run.config.rewards.end(),
                                     [&](const orl::RewardSpec& r) { return r.name == policy.reward_spec; });
      rname = known ? policy.reward_spec : run.config.selection_reward;
    }
    const orl::RewardSpec& reward = run.config.reward(rname);
    const double gamma = run.config.fqe.gamma;

    std::optional<orl::QFunction> q;
    auto fitted = [&]() -> const orl::QFunction& {
      if (!q) {
        q = orl::fit_fqe(dataset, policy, reward, evaluator_context(run.config, policy), run.config.fqe,
                         orl::derive_seed(run.seed, "evaluate:fqe:" + policy.id + ":" + reward.name));
      }
      return *q;
    };

    const fs::path dir = run.dir / "ope" / (policy.id + "__" + reward.name);
    const fs::path ledger = dir / "ledger.csv";
    if (fs::exists(ledger)) fs::remove(ledger);
    for (const auto& e : wanted) {
      orl::OpeReport report;
      if (e == "is" || e == "wis") {
        report = orl::estimate_is(dataset, policy, reward, gamma, e == "wis");
      } else if (e == "dm") {
        report = orl::estimate_dm_fqe(fitted(), dataset, policy);
      } else {
        report = orl::estimate_dr(dataset, fitted(), policy, reward, gamma);
      }
      const fs::path p = dir / (e + ".json");
      write_text(p, orl::ope_report_json(report));
      outputs.push_back(p);
      orl::append_ope_ledger(ledger, report);
      std::cout << policy.id << "  " << reward.name << "  " << report.estimator << "  "
                << orl::format_double(report.value) << "\n";
    }
    outputs.push_back(ledger);
  }
  inputs["policies"] = policies;
  inputs["reward"] = reward_name;
  std::string key = "evaluate";
  for (const auto& p : policy_paths) key += ":" + fs::path(p).stem().string();
  record(run, key, inputs, outputs);
  return 0;
}

int cmd_select_state(const Common& c, const std::string& dataset_path, std::optional<int> jobs) {
  orl::set_live_environment_allowed(false);
  const Run run = resolve(c, load_config(c.config_path));
  const orl::Dataset dataset = orl::read_dataset(dataset_path);
  const orl::RewardSpec& reward = run.config.reward(run.config.selection_reward);
  if (run.config.state_spaces.size() == 1) {
    std::cerr << "warning: one state-space candidate; selection is vacuous\n";
  }
  const orl::StateSelectionResult result =
      orl::select_state_space(run.config.state_spaces, dataset, reward, run.config.cql, run.config.fqe, run.seed,
                              jobs.value_or(run.config.jobs));

  std::vector<fs::path> outputs;
  for (const auto& p : result.policies) {
    const fs::path path = run.dir / "policies" / (p.id + ".json");
    fs::create_directories(path.parent_path());
    orl::save_policy(path, p);
    outputs.push_back(path);
  }
  const fs::path base = run.dir / "state_selection";
  write_text(base.string() + ".json", orl::state_report_json(result.report));
  write_text(base.string() + ".csv", orl::state_report_csv(result.report));
  write_text(base.string() + ".txt", orl::state_report_table(result.report));
  outputs.insert(outputs.end(), {base.string() + ".json", base.string() + ".csv", base.string() + ".txt"});
  record(run, "select-state", json{{"dataset", dataset_path}}, outputs);
  std::cout << orl::state_report_table(result.report);
  return 0;
}

int cmd_select_reward(const Common& c, const std::string& dataset_path, const std::string& best_path,
                      const std::string& worst_path, std::optional<int> jobs) {
  orl::set_live_environment_allowed(false);
  const Run run = resolve(c, load_config(c.config_path));
  const orl::Dataset dataset = orl::read_dataset(dataset_path);
  const orl::PolicyArtifact best = orl::load_policy(best_path);
  const orl::PolicyArtifact worst = orl::load_policy(worst_path);
  const orl::RewardSelectionReport report =
      orl::select_reward(run.config.rewards, best, worst, dataset, run.config.fqe, run.seed, run.config.binning,
                         jobs.value_or(run.config.jobs));

  const fs::path base = run.dir / "reward_selection";
  write_text(base.string() + ".json", orl::reward_report_json(report));
  write_text(base.string() + ".csv", orl::reward_report_csv(report));
  write_text(base.string() + ".txt", orl::reward_report_table(report));
  record(run, "select-reward", json{{"dataset", dataset_path}, {"best", best_path}, {"worst", worst_path}},
         {base.string() + ".json", base.string() + ".csv", base.string() + ".txt"});
  std::cout << orl::reward_report_table(report);
  return 0;
}

int cmd_audit_online(const Common& c, const std::vector<std::string>& policy_paths, std::optional<int> episodes,
                     std::string reward_name) {
  const Run run = resolve(c, load_config(c.config_path));
  if (reward_name.empty()) reward_name = "f";
  const orl::RewardSpec& reward = run.config.reward(reward_name);
  const int n = episodes.value_or(run.config.audit_episodes);
  std::vector<fs::path> outputs;
  json policies = json::array();
  std::cerr << "note: audit-online steps the live environment; it is outside the offline pipeline\n";
  for (const auto& path : policy_paths) {
    const orl::PolicyArtifact policy = orl::load_policy(path);
    policies.push_back(path);
    const orl::AuditResult r = orl::audit_online(policy, run.config.env, n, run.seed, reward);
    const fs::path csv = run.dir / "audit" / (policy.id + "__" + reward.name + ".csv");
    const fs::path summary = run.dir / "audit" / (policy.id + "__" + reward.name + ".json");
    write_text(csv, orl::audit_csv(r));
    write_text(summary, json{{"policy_id", policy.id},
                             {"reward_spec", reward.name},
                             {"episodes", n},
                             {"mean_return", r.mean_return()},
                             {"stddev_return", r.stddev_return()},
                             {"landing_rate", r.landing_rate()}}
                                .dump(2) +
                            "\n");
    outputs.push_back(csv);
    outputs.push_back(summary);
    std::cout << policy.id << "  mean " << orl::format_double(r.mean_return()) << "  sd "
              << orl::format_double(r.stddev_return()) << "  landed " << orl::format_double(r.landing_rate())
              << "\n";
  }
  std::string key = "audit-online";
  for (const auto& p : policy_paths) key += ":" + fs::path(p).stem().string();
  record(run, key, json{{"policies", policies}, {"episodes", n}, {"reward", reward.name}}, outputs);
  return 0;
}

int cmd_validate(const std::string& dataset_path) {
  orl::set_live_environment_allowed(false);
  const orl::Dataset dataset = orl::read_dataset(dataset_path);
  const orl::DatasetDiagnostics d = orl::validate_dataset(dataset);
  std::cout << "episodes " << d.episode_count << "\n"
            << "transitions " << d.transition_count << "\n"
            << "min propensity " << orl::format_double(d.min_propensity) << "\n";
  auto stats = [](const char* name, const orl::SummaryStats& s) {
    std::cout << name << " return mean " << orl::format_double(s.mean) << " sd " << orl::format_double(s.stddev)
              << " min " << orl::format_double(s.min) << " max " << orl::format_double(s.max) << "\n";
  };
  stats("state-based", d.state_based_return);
  stats("action-based", d.action_based_return);
  stats("terminal", d.terminal_return);
  std::cout << "ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  orl::configure_allocator();
  CLI::App app{"Offline RL design pipeline: logged-data collection, CQL training, off-policy evaluation, and "
               "state/reward selection."};
  app.require_subcommand(1);

  Common common;
  std::string dataset, state_space, reward, estimators = "is,dm,dr", best, worst;
  std::vector<std::string> policies;
  std::optional<int> episodes, jobs;
  std::optional<double> fraction;
  bool gzip = false, quiet = false, family = false;

  auto* print = app.add_subcommand("print-config", "print the effective config with all defaults");
  print->add_option("--config", common.config_path, "pipeline config (TOML)");

  auto* collect = app.add_subcommand("collect", "train DDQN on the lander and log every transition");
  add_common(collect, common);
  collect->add_option("--episodes", episodes, "override ddqn.episodes");
  collect->add_flag("--gzip", gzip, "gzip the dataset");
  collect->add_flag("--quiet", quiet, "no progress lines");

  auto* train = app.add_subcommand("train-offline", "train a CQL policy from a logged dataset");
  add_common(train, common);
  train->add_option("--dataset", dataset, "dataset file")->required();
  train->add_option("--state-space", state_space, "candidate state space (default selection.offline_state_space)");
  train->add_option("--reward", reward, "candidate reward (default selection.reward)");
  train->add_option("--fraction", fraction, "leading fraction of episodes");
  train->add_flag("--family", family, "train worst/avg/best policies from selection.cql_fractions");

  auto* evaluate = app.add_subcommand("evaluate", "off-policy evaluation of policy artifacts");
  add_common(evaluate, common);
  evaluate->add_option("--dataset", dataset, "dataset file")->required();
  evaluate->add_option("--policy", policies, "policy sidecar (.json); repeatable")->required();
  evaluate->add_option("--estimator", estimators, "comma list of is, wis, dm, dr");
  evaluate->add_option("--reward", reward, "reward to evaluate under (default: the policy's own)");

  auto* sel_state = app.add_subcommand("select-state", "rank candidate state spaces by OPE");
  add_common(sel_state, common);
  sel_state->add_option("--dataset", dataset, "dataset file")->required();
  sel_state->add_option("--jobs", jobs, "parallel candidate jobs");

  auto* sel_reward = app.add_subcommand("select-reward", "rank candidate rewards by best/worst separability");
  add_common(sel_reward, common);
  sel_reward->add_option("--dataset", dataset, "dataset file")->required();
  sel_reward->add_option("--best", best, "best policy sidecar")->required();
  sel_reward->add_option("--worst", worst, "worst policy sidecar")->required();
  sel_reward->add_option("--jobs", jobs, "parallel candidate jobs");

  auto* audit = app.add_subcommand("audit-online",
                                   "ground-truth returns from the live environment (audit only, not offline)");
  add_common(audit, common);
  audit->add_option("--policy", policies, "policy sidecar (.json); repeatable")->required();
  audit->add_option("--episodes", episodes, "episodes (default selection.audit_episodes)");
  audit->add_option("--reward", reward, "reward to sum (default f)");

  auto* validate = app.add_subcommand("validate", "check a dataset file and print its diagnostics");
  validate->add_option("dataset", dataset, "dataset file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : orl::exit_code(orl::ErrorKind::usage);
  }

  try {
    if (*print) return cmd_print_config(common);
    if (*collect) return cmd_collect(common, episodes, gzip, quiet);
    if (*train) return cmd_train_offline(common, dataset, state_space, reward, fraction, family);
    if (*evaluate) return cmd_evaluate(common, dataset, policies, estimators, reward);
    if (*sel_state) return cmd_select_state(common, dataset, jobs);
    if (*sel_reward) return cmd_select_reward(common, dataset, best, worst, jobs);
    if (*audit) return cmd_audit_online(common, policies, episodes, reward);
    if (*validate) return cmd_validate(dataset);
  } catch (const orl::Error& e) {
    std::cerr << "orl: error: " << e.what() << "\n";
    return orl::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "orl: error: " << e.what() << "\n";
    return orl::exit_code(orl::ErrorKind::usage);
  }
  return orl::exit_code(orl::ErrorKind::usage);
}
