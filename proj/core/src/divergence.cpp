#include "orl/selection/divergence.hpp"

#include <cmath>
#include <numeric>

#include "orl/error.hpp"

namespace orl {

void HistogramBinning::validate() const {
  if (bins < 1) throw UsageError("histogram needs at least one bin");
  if (!(hi > lo)) throw UsageError("histogram range must satisfy lo < hi");
  if (!(smoothing > 0.0 && smoothing < 1.0)) throw UsageError("histogram smoothing must lie in (0, 1)");
}

Histogram make_histogram(std::span<const double> samples, const HistogramBinning& binning) {
  binning.validate();
  Histogram h;
  h.smoothing = binning.smoothing;
  const double width = (binning.hi - binning.lo) / binning.bins;
  h.edges.resize(static_cast<std::size_t>(binning.bins) + 1);
  for (int i = 0; i <= binning.bins; ++i) h.edges[static_cast<std::size_t>(i)] = binning.lo + width * i;
  h.edges.back() = binning.hi;
  h.masses.assign(static_cast<std::size_t>(binning.bins), 0.0);
  if (samples.empty()) return h;
  for (double x : samples) {
    auto bin = static_cast<long>(std::floor((x - binning.lo) / width));
    bin = std::clamp<long>(bin, 0, binning.bins - 1);
    h.masses[static_cast<std::size_t>(bin)] += 1.0;
  }
  for (double& m : h.masses) m /= static_cast<double>(samples.size());
  return h;
}

std::pair<double, double> mean_stddev(std::span<const double> samples) {
  if (samples.empty()) return {0.0, 0.0};
  const auto n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n)};
}

ReturnDistribution make_return_distribution(std::vector<double> samples, double mean, double stddev,
                                            const HistogramBinning& binning) {
  ReturnDistribution d;
  d.samples = std::move(samples);
  d.mean = mean;
  d.stddev = stddev;
  // Spreads below 1e-12 of the location are rounding noise, not signal.
  d.degenerate = !(stddev > 1e-12 * std::max(1.0, std::abs(mean)));
  d.standardized.resize(d.samples.size());
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    d.standardized[i] = d.degenerate ? 0.0 : (d.samples[i] - mean) / stddev;
  }
  d.histogram = make_histogram(d.standardized, binning);
  return d;
}

ReturnDistribution make_return_distribution(std::vector<double> samples, const HistogramBinning& binning) {
  const auto [mean, stddev] = mean_stddev(samples);
  return make_return_distribution(std::move(samples), mean, stddev, binning);
}

namespace {

void check_compatible(const Histogram& p, const Histogram& q) {
  if (p.edges != q.edges || p.masses.size() != q.masses.size()) {
    throw UsageError("divergence between histograms with different binning");
  }
  if (p.smoothing != q.smoothing) throw UsageError("divergence between histograms with different smoothing");
}

std::vector<double> smoothed(const Histogram& h) {
  const double n = static_cast<double>(h.masses.size());
  const double total = std::accumulate(h.masses.begin(), h.masses.end(), 0.0);
  std::vector<double> out(h.masses.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (h.masses[i] + h.smoothing) / (total + n * h.smoothing);
  return out;
}

double kl_terms(const std::vector<double>& p, const std::vector<double>& q) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) kl += p[i] * std::log(p[i] / q[i]);
  return kl;
}

}  // namespace

double kl_divergence(const Histogram& p, const Histogram& q) {
  check_compatible(p, q);
  // Rounding can leave -1e-17 on identical inputs; the true value is >= 0.
  return std::max(0.0, kl_terms(smoothed(p), smoothed(q)));
}

double js_divergence(const Histogram& p, const Histogram& q) {
  check_compatible(p, q);
  const auto ps = smoothed(p);
  const auto qs = smoothed(q);
  double js = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double m = 0.5 * (ps[i] + qs[i]);
    js += 0.5 * (ps[i] * std::log(ps[i] / m) + qs[i] * std::log(qs[i] / m));
  }
  return std::clamp(js, 0.0, std::log(2.0));
}

double kl_divergence(const ReturnDistribution& p, const ReturnDistribution& q) {
  return kl_divergence(p.histogram, q.histogram);
}

double js_divergence(const ReturnDistribution& p, const ReturnDistribution& q) {
  return js_divergence(p.histogram, q.histogram);
}

}  // namespace orl
