#pragma once

#include <span>
#include <vector>

namespace orl {

struct HistogramBinning {
  int bins = 50;
  double lo = -5.0;
  double hi = 5.0;
  double smoothing = 1e-8;  // additive mass per bin before renormalizing

  void validate() const;
};

struct Histogram {
  std::vector<double> edges;  // bins + 1
  std::vector<double> masses;  // sums to 1 (all zero for an empty sample)
  double smoothing = 1e-8;
};

/// Uniform-bin histogram; samples outside [lo, hi] land in the edge bins.
Histogram make_histogram(std::span<const double> samples, const HistogramBinning& binning);

/// Per-initial-state value samples of one policy, standardized with the
/// given location/scale and histogrammed.
struct ReturnDistribution {
  std::vector<double> samples;
  std::vector<double> standardized;
  double mean = 0.0;
  double stddev = 0.0;
  bool degenerate = false;  // zero scale: standardized samples are all zero
  Histogram histogram;
};

/// Population mean and standard deviation.
std::pair<double, double> mean_stddev(std::span<const double> samples);

ReturnDistribution make_return_distribution(std::vector<double> samples, double mean, double stddev,
                                            const HistogramBinning& binning);
/// Standardizes with the samples' own mean and standard deviation.
ReturnDistribution make_return_distribution(std::vector<double> samples, const HistogramBinning& binning);

/// sum_i p_i ln(p_i / q_i) after additive smoothing; always >= 0.
/// Throws UsageError when the bin edges differ.
double kl_divergence(const Histogram& p, const Histogram& q);
double kl_divergence(const ReturnDistribution& p, const ReturnDistribution& q);

/// 1/2 KL(p||m) + 1/2 KL(q||m) with m = (p + q) / 2; lies in [0, ln 2] and is
/// exactly symmetric.
double js_divergence(const Histogram& p, const Histogram& q);
double js_divergence(const ReturnDistribution& p, const ReturnDistribution& q);

}  // namespace orl
