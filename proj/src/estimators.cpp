#include "clickstat/estimators.hpp"

#include "clickstat/errors.hpp"
#include "clickstat/parallel.hpp"
#include "clickstat/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace clickstat {
namespace {

struct SampleMoments {
  double mean;
  double variance;
};

SampleMoments moments_of(double sum, double sum_sq, double n, VarianceKind kind) {
  const double mean = sum / n;
  double centered = sum_sq - sum * mean;
  if (centered < 0.0) centered = 0.0;
  return {mean, centered / (kind == VarianceKind::Unbiased ? n - 1.0 : n)};
}

// Integer counts keep the sums exact up to 2^53.
SampleMoments moments_of(std::span<const int> counts, VarianceKind kind) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int c : counts) {
    sum += c;
    sum_sq += static_cast<double>(c) * c;
  }
  return moments_of(sum, sum_sq, static_cast<double>(counts.size()), kind);
}

std::optional<double> qb_from(SampleMoments m, int detectors) {
  const double n = detectors;
  if (m.mean <= kDegenerateMeanThreshold || m.mean >= n - kDegenerateMeanThreshold) return std::nullopt;
  return n * m.variance / (m.mean * (n - m.mean)) - 1.0;
}

std::optional<double> mandel_from(SampleMoments m) {
  if (m.mean < kDegenerateMeanThreshold) return std::nullopt;
  return m.variance / m.mean - 1.0;
}

void require_size(std::size_t size, std::size_t minimum, const char* what) {
  if (size < minimum)
    throw Error(ErrorCode::InsufficientData, std::string(what) + " needs at least " + std::to_string(minimum) +
                                                 " samples, got " + std::to_string(size));
}

void check_range(std::span<const int> clicks, int detectors) {
  for (std::size_t i = 0; i < clicks.size(); ++i) {
    if (clicks[i] < 0 || clicks[i] > detectors)
      throw Error(ErrorCode::InvalidSample, "record " + std::to_string(i) + " has " + std::to_string(clicks[i]) +
                                                " clicks, outside [0, " + std::to_string(detectors) + "]");
  }
}

double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

EstimateReport make_report(Statistic statistic, double point, std::size_t size, const BootstrapOptions& bootstrap,
                           std::span<const int> counts, int detectors) {
  EstimateReport report;
  report.statistic = statistic;
  report.point_estimate = point;
  report.sample_size = size;
  report.confidence_level = bootstrap.level;
  report.ci_low = std::numeric_limits<double>::quiet_NaN();
  report.ci_high = std::numeric_limits<double>::quiet_NaN();
  if (bootstrap.replicates == 0) return report;
  const auto ci = bootstrap_ci(counts, detectors, statistic, bootstrap.replicates, bootstrap.level, bootstrap.seed,
                               bootstrap.workers);
  // Percentile endpoints need not bracket a skewed point estimate; the report
  // widens the interval so that they always do.
  report.ci_low = std::min(ci.low, point);
  report.ci_high = std::max(ci.high, point);
  report.bootstrap_replicates = bootstrap.replicates;
  report.discarded_resamples = ci.discarded;
  return report;
}

}  // namespace

const char* to_string(Statistic statistic) noexcept {
  return statistic == Statistic::QB ? "q_b" : "q_m";
}

ClickDistribution empirical_frequencies(const ClickSampleSet& samples) {
  require_size(samples.clicks.size(), 1, "empirical frequencies");
  check_range(samples.clicks, samples.detectors);
  std::vector<std::uint64_t> tally(samples.detectors + 1, 0);
  for (int c : samples.clicks) ++tally[c];
  ClickDistribution dist{Vector<double>(samples.detectors + 1)};
  const double total = static_cast<double>(samples.clicks.size());
  for (int k = 0; k <= samples.detectors; ++k) dist.probs(k) = static_cast<double>(tally[k]) / total;
  return dist;
}

double qb_point_estimate(std::span<const int> clicks, int detectors, VarianceKind variance) {
  require_size(clicks.size(), 2, "Q_B estimate");
  check_range(clicks, detectors);
  const auto m = moments_of(clicks, variance);
  const auto qb = qb_from(m, detectors);
  if (!qb)
    throw Error(ErrorCode::DegenerateMean, "sample mean " + std::to_string(m.mean) + " leaves Q_B undefined for N = " +
                                               std::to_string(detectors));
  return *qb;
}

double mandel_q_point_estimate(std::span<const int> counts, VarianceKind variance) {
  require_size(counts.size(), 2, "Q_M estimate");
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] < 0) throw Error(ErrorCode::InvalidSample, "record " + std::to_string(i) + " is negative");
  const auto m = moments_of(counts, variance);
  const auto qm = mandel_from(m);
  if (!qm) throw Error(ErrorCode::DegenerateMean, "sample mean " + std::to_string(m.mean) + " leaves Q_M undefined");
  return *qm;
}

EstimateReport qb_estimate(const ClickSampleSet& samples, const BootstrapOptions& bootstrap) {
  const double point = qb_point_estimate(samples.clicks, samples.detectors);
  return make_report(Statistic::QB, point, samples.clicks.size(), bootstrap, samples.clicks, samples.detectors);
}

EstimateReport mandel_q_estimate(std::span<const int> counts, const BootstrapOptions& bootstrap) {
  const double point = mandel_q_point_estimate(counts);
  return make_report(Statistic::QM, point, counts.size(), bootstrap, counts, 0);
}

BootstrapInterval bootstrap_ci(std::span<const int> counts, int detectors, Statistic statistic,
                               std::size_t replicates, double level, std::uint64_t seed, unsigned workers) {
  if (replicates < kMinBootstrapReplicates)
    throw Error(ErrorCode::InsufficientData,
                "bootstrap needs at least " + std::to_string(kMinBootstrapReplicates) + " replicates");
  require_size(counts.size(), kMinBootstrapSampleSize, "bootstrap");
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "confidence level must lie in (0, 1)");
  if (statistic == Statistic::QB) check_range(counts, detectors);

  const std::size_t size = counts.size();
  std::vector<double> values(replicates, std::numeric_limits<double>::quiet_NaN());
  parallel_for(replicates, workers, [&](std::size_t r) {
    auto engine = substream(seed, r);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      const double c = counts[uniform_below(engine, size)];
      sum += c;
      sum_sq += c * c;
    }
    const auto m = moments_of(sum, sum_sq, static_cast<double>(size), VarianceKind::Unbiased);
    const auto value = statistic == Statistic::QB ? qb_from(m, detectors) : mandel_from(m);
    if (value) values[r] = *value;
  });

  std::vector<double> valid;
  valid.reserve(replicates);
  for (double v : values)
    if (!std::isnan(v)) valid.push_back(v);
  if (valid.empty()) throw Error(ErrorCode::AllResamplesDegenerate, "every bootstrap resample had a degenerate mean");
  std::sort(valid.begin(), valid.end());
  const double alpha = 1.0 - level;
  return {percentile(valid, alpha / 2.0), percentile(valid, 1.0 - alpha / 2.0), replicates - valid.size()};
}

BootstrapInterval bootstrap_ci(const ClickSampleSet& samples, Statistic statistic, std::size_t replicates,
                               double level, std::uint64_t seed, unsigned workers) {
  return bootstrap_ci(samples.clicks, samples.detectors, statistic, replicates, level, seed, workers);
}

}  // namespace clickstat
