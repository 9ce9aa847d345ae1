#include "orl/ope/report.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "orl/error.hpp"
#include "orl/util/format.hpp"

namespace orl {

double OpeReport::aggregate() const {
  const double total = std::accumulate(per_episode.begin(), per_episode.end(), 0.0);
  if (aggregation == Aggregation::sum) return total;
  return per_episode.empty() ? 0.0 : total / static_cast<double>(per_episode.size());
}

std::string ope_report_json(const OpeReport& r) {
  nlohmann::ordered_json j;
  j["estimator"] = r.estimator;
  j["policy_id"] = r.policy_id;
  j["reward_spec"] = r.reward_spec;
  j["value"] = r.value;
  if (std::isfinite(r.standard_error)) {
    j["standard_error"] = r.standard_error;
  } else {
    j["standard_error"] = nullptr;
  }
  j["aggregation"] = r.aggregation == OpeReport::Aggregation::mean ? "mean" : "sum";
  nlohmann::ordered_json d;
  d["episodes"] = r.diagnostics.episodes;
  d["effective_sample_size"] = r.diagnostics.effective_sample_size;
  d["weight_max"] = r.diagnostics.weight_max;
  d["weight_mean"] = r.diagnostics.weight_mean;
  d["nonzero_weights"] = r.diagnostics.nonzero_weights;
  d["fqe_loss_trace"] = r.diagnostics.fqe_loss_trace;
  j["diagnostics"] = d;
  j["per_episode"] = r.per_episode;
  return j.dump(2) + "\n";
}

void append_ope_ledger(const std::filesystem::path& path, const OpeReport& r) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot open ledger " + path.string());
  if (fresh) out << kOpeLedgerHeader << "\n";
  out << csv_field(r.estimator) << ',' << csv_field(r.policy_id) << ',' << csv_field(r.reward_spec) << ','
      << format_double(r.value) << ',' << format_double(r.standard_error) << ',' << r.diagnostics.episodes << ','
      << format_double(r.diagnostics.effective_sample_size) << ',' << format_double(r.diagnostics.weight_max)
      << ',' << format_double(r.diagnostics.weight_mean) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace orl
