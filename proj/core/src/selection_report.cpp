#include "orl/selection/report.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "orl/util/format.hpp"

namespace orl {

namespace {

std::string fixed(double x, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << x;
  return os.str();
}

}  // namespace

std::string text_table(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> width;
  for (const auto& row : cells) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      const auto& s = cells[r][c];
      if (c == 0) {
        line += s + std::string(width[c] - s.size(), ' ');
      } else {
        line += "  " + std::string(width[c] - s.size(), ' ') + s;
      }
    }
    out += line + "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c == 0 ? 0 : 2);
      out += std::string(total, '-') + "\n";
    }
  }
  return out;
}

std::string state_report_json(const StateSelectionReport& report) {
  nlohmann::ordered_json j;
  j["reward_spec"] = report.reward_spec;
  j["evaluator_context"] = report.evaluator_context;
  j["seed"] = report.seed;
  j["winner"] = report.winner;
  j["vacuous"] = report.vacuous;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json o;
    o["state_space"] = r.state_space;
    o["dimension"] = r.dimension;
    o["policy_id"] = r.policy_id;
    o["value"] = r.value;
    o["standard_error"] = r.standard_error;
    o["final_fqe_loss"] = r.final_fqe_loss;
    if (r.online_mean) o["online_mean"] = *r.online_mean;
    if (r.online_stddev) o["online_stddev"] = *r.online_stddev;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string state_report_csv(const StateSelectionReport& report) {
  std::string out = std::string(kStateReportCsvHeader) + "\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    out += std::to_string(i + 1) + ',' + csv_field(r.state_space) + ',' + std::to_string(r.dimension) + ',' +
           csv_field(r.policy_id) + ',' + format_double(r.value) + ',' + format_double(r.standard_error) + ',' +
           format_double(r.final_fqe_loss) + ',' + (r.online_mean ? format_double(*r.online_mean) : "") + ',' +
           (r.online_stddev ? format_double(*r.online_stddev) : "") + ',' +
           (r.state_space == report.winner ? "1" : "0") + "\n";
  }
  return out;
}

std::string state_report_table(const StateSelectionReport& report) {
  const bool online = std::any_of(report.rows.begin(), report.rows.end(),
                                  [](const StateSelectionRow& r) { return r.online_mean.has_value(); });
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> head = {"state space", "dim", "policy", "V_OPE", "s.e."};
  if (online) head.push_back("online");
  cells.push_back(head);
  for (const auto& r : report.rows) {
    std::vector<std::string> row = {r.state_space + (r.state_space == report.winner ? " *" : ""),
                                    std::to_string(r.dimension), r.policy_id, fixed(r.value), fixed(r.standard_error)};
    if (online) row.push_back(r.online_mean ? fixed(*r.online_mean, 2) : "-");
    cells.push_back(row);
  }
  std::string out = "reward " + report.reward_spec + ", evaluator context " + report.evaluator_context + "\n";
  out += text_table(cells);
  out += "winner: " + report.winner + (report.vacuous ? " (single candidate, selection is vacuous)" : "") + "\n";
  return out;
}

std::string reward_report_json(const RewardSelectionReport& report) {
  nlohmann::ordered_json j;
  j["best_policy"] = report.best_policy;
  j["worst_policy"] = report.worst_policy;
  j["seed"] = report.seed;
  j["winner"] = report.winner;
  j["winner_kl"] = report.winner_kl;
  j["winner_js"] = report.winner_js;
  j["js_disagrees"] = report.js_disagrees;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json o;
    o["reward_spec"] = r.reward_spec;
    o["mean_worst"] = r.mean_worst;
    o["mean_best"] = r.mean_best;
    o["mean_difference"] = r.mean_difference;
    o["js"] = r.js;
    o["kl"] = r.kl;
    o["raw_mean_worst"] = r.raw_mean_worst;
    o["raw_mean_best"] = r.raw_mean_best;
    o["pooled_mean"] = r.pooled_mean;
    o["pooled_stddev"] = r.pooled_stddev;
    o["degenerate"] = r.degenerate;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string reward_report_csv(const RewardSelectionReport& report) {
  std::string out = std::string(kRewardReportCsvHeader) + "\n";
  for (const auto& r : report.rows) {
    out += csv_field(r.reward_spec) + ',' + format_double(r.mean_worst) + ',' + format_double(r.mean_best) + ',' +
           format_double(r.mean_difference) + ',' + format_double(r.js) + ',' + format_double(r.kl) + ',' +
           format_double(r.raw_mean_worst) + ',' + format_double(r.raw_mean_best) + ',' +
           format_double(r.pooled_mean) + ',' + format_double(r.pooled_stddev) + ',' + (r.degenerate ? "1" : "0") +
           "\n";
  }
  return out;
}

std::string reward_report_table(const RewardSelectionReport& report) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> head = {""};
  for (const auto& r : report.rows) head.push_back(r.reward_spec + (r.degenerate ? " (degenerate)" : ""));
  cells.push_back(head);
  const std::pair<const char*, double RewardSelectionRow::*> lines[] = {
      {"mean worst", &RewardSelectionRow::mean_worst},
      {"mean best", &RewardSelectionRow::mean_best},
      {"mean difference", &RewardSelectionRow::mean_difference},
      {"JS", &RewardSelectionRow::js},
      {"KL", &RewardSelectionRow::kl},
  };
  for (const auto& [label, key] : lines) {
    std::vector<std::string> row = {label};
    for (const auto& r : report.rows) row.push_back(fixed(r.*key));
    cells.push_back(row);
  }
  std::string out = "best " + report.best_policy + ", worst " + report.worst_policy + "\n";
  out += text_table(cells);
  out += "winner (mean difference): " + report.winner + "\n";
  out += "winner (KL): " + report.winner_kl + "\n";
  out += "winner (JS): " + report.winner_js + (report.js_disagrees ? "  [disagrees with mean difference]" : "") + "\n";
  return out;
}

}  // namespace orl
