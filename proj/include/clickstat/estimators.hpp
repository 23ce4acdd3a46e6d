#pragma once

#include "clickstat/click_kernel.hpp"
#include "clickstat/simulator.hpp"

#include <cstdint>
#include <span>

namespace clickstat {

inline constexpr std::size_t kDefaultBootstrapReplicates = 1000;
inline constexpr double kDefaultConfidenceLevel = 0.95;
inline constexpr std::size_t kMinBootstrapReplicates = 100;
inline constexpr std::size_t kMinBootstrapSampleSize = 10;

enum class Statistic { QB, QM };

const char* to_string(Statistic statistic) noexcept;

enum class VarianceKind { Unbiased, Population };

struct EstimateReport {
  Statistic statistic = Statistic::QB;
  double point_estimate = 0.0;
  double ci_low = 0.0;   // NaN without bootstrap
  double ci_high = 0.0;  // NaN without bootstrap
  double confidence_level = kDefaultConfidenceLevel;
  std::uint64_t sample_size = 0;
  std::uint64_t bootstrap_replicates = 0;
  std::uint64_t discarded_resamples = 0;
};

struct BootstrapOptions {
  std::size_t replicates = 0;  // 0 disables the interval
  double level = kDefaultConfidenceLevel;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct BootstrapInterval {
  double low;
  double high;
  std::size_t discarded;  // resamples with a degenerate mean
};

/// Click-count frequencies; throws InvalidSample for records outside [0, N].
ClickDistribution empirical_frequencies(const ClickSampleSet& samples);

double qb_point_estimate(std::span<const int> clicks, int detectors,
                         VarianceKind variance = VarianceKind::Unbiased);
double mandel_q_point_estimate(std::span<const int> counts, VarianceKind variance = VarianceKind::Unbiased);

EstimateReport qb_estimate(const ClickSampleSet& samples, const BootstrapOptions& bootstrap = {});
EstimateReport mandel_q_estimate(std::span<const int> counts, const BootstrapOptions& bootstrap = {});

/// Percentile bootstrap over resamples with replacement of the original size.
/// Replicate r draws from substream (seed, r), so the interval does not
/// depend on the worker count. For Statistic::QM `detectors` is ignored.
BootstrapInterval bootstrap_ci(std::span<const int> counts, int detectors, Statistic statistic,
                               std::size_t replicates, double level, std::uint64_t seed, unsigned workers = 1);

BootstrapInterval bootstrap_ci(const ClickSampleSet& samples, Statistic statistic, std::size_t replicates,
                               double level, std::uint64_t seed, unsigned workers = 1);

}  // namespace clickstat
