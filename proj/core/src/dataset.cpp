#include "orl/datastore/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "orl/error.hpp"

namespace orl {

std::size_t Dataset::transition_count() const noexcept {
  std::size_t n = 0;
  for (const auto& ep : episodes) n += ep.steps.size();
  return n;
}

void Dataset::sync_counts() noexcept {
  header.episode_count = episodes.size();
  header.transition_count = transition_count();
}

namespace {

SummaryStats summarize(const std::vector<double>& xs) {
  SummaryStats s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(xs.size()));
  auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

DatasetDiagnostics validate_dataset(const Dataset& dataset) {
  DatasetDiagnostics d;
  auto violate = [&](std::int64_t episode, std::int64_t step, const std::string& what) {
    std::ostringstream os;
    os << "episode " << episode;
    if (step >= 0) os << " step " << step;
    os << ": " << what;
    d.violations.push_back(os.str());
  };

  const auto& h = dataset.header;
  if (h.format_version != kDatasetFormatVersion) {
    d.violations.push_back("header: unsupported format_version " + std::to_string(h.format_version));
  }
  if (h.action_count <= 0) d.violations.push_back("header: action_count must be positive");
  if (h.feature_names.empty()) d.violations.push_back("header: feature_names is empty");
  if (h.episode_count != dataset.episodes.size()) {
    d.violations.push_back("header: episode_count " + std::to_string(h.episode_count) +
                           " does not match body " + std::to_string(dataset.episodes.size()));
  }
  if (h.transition_count != dataset.transition_count()) {
    d.violations.push_back("header: transition_count " + std::to_string(h.transition_count) +
                           " does not match body " + std::to_string(dataset.transition_count()));
  }

  const std::size_t dim = h.feature_names.size();
  std::set<std::int64_t> seen_ids;
  std::vector<double> state_sums, action_sums, terminal_sums;
  for (const auto& ep : dataset.episodes) {
    if (!seen_ids.insert(ep.id).second) violate(ep.id, -1, "duplicate episode id");
    if (ep.steps.empty()) {
      violate(ep.id, -1, "episode has no transitions");
      continue;
    }
    double ssum = 0.0, asum = 0.0, tsum = 0.0;
    for (std::size_t i = 0; i < ep.steps.size(); ++i) {
      const Transition& tr = ep.steps[i];
      const auto step = static_cast<std::int64_t>(i);
      const bool last = i + 1 == ep.steps.size();
      if (tr.episode_id != ep.id) violate(ep.id, step, "transition carries episode_id " + std::to_string(tr.episode_id));
      if (tr.t != step) violate(ep.id, step, "step index " + std::to_string(tr.t) + " is not contiguous from 0");
      if (tr.state.size() != dim || tr.next_state.size() != dim) violate(ep.id, step, "feature vector length differs from header");
      if (!all_finite(tr.state) || !all_finite(tr.next_state)) violate(ep.id, step, "non-finite feature value");
      if (tr.action < 0 || tr.action >= h.action_count) violate(ep.id, step, "action " + std::to_string(tr.action) + " out of range");
      if (!(tr.propensity > 0.0 && tr.propensity <= 1.0)) {
        std::ostringstream os;
        os << "propensity " << tr.propensity << " outside (0, 1]";
        violate(ep.id, step, os.str());
      }
      if (!std::isfinite(tr.reward.state_based) || !std::isfinite(tr.reward.action_based) ||
          !std::isfinite(tr.reward.terminal)) {
        violate(ep.id, step, "non-finite reward component");
      }
      if (!tr.done && tr.reward.terminal != 0.0) violate(ep.id, step, "terminal reward on a non-done transition");
      if (tr.truncated && !tr.done) violate(ep.id, step, "truncated transition is not done");
      if (tr.done && !last) violate(ep.id, step, "done before the last transition");
      if (last && !tr.done) violate(ep.id, step, "episode does not end with done");
      if (tr.propensity > 0.0) d.min_propensity = std::min(d.min_propensity, tr.propensity);
      ssum += tr.reward.state_based;
      asum += tr.reward.action_based;
      tsum += tr.reward.terminal;
      ++d.transition_count;
    }
    state_sums.push_back(ssum);
    action_sums.push_back(asum);
    terminal_sums.push_back(tsum);
  }
  d.episode_count = dataset.episodes.size();
  d.state_based_return = summarize(state_sums);
  d.action_based_return = summarize(action_sums);
  d.terminal_return = summarize(terminal_sums);
  return d;
}

void require_valid(const Dataset& dataset) {
  auto diag = validate_dataset(dataset);
  if (diag.ok()) return;
  std::ostringstream os;
  os << "invalid dataset (" << diag.violations.size() << " violations)";
  for (std::size_t i = 0; i < diag.violations.size() && i < 5; ++i) os << "; " << diag.violations[i];
  throw ValidationError(os.str());
}

}  // namespace orl
