#pragma once

#include "clickstat/numeric.hpp"
#include "clickstat/states.hpp"

#include <algorithm>
#include <optional>

namespace clickstat {

inline constexpr int kMaxDetectors = 1024;

/// Mean click counts closer than this to 0 or N make Q_B undefined.
inline constexpr double kDegenerateMeanThreshold = 1e-12;

struct DetectorConfig {
  int detectors = 1;  // N
  double eta = 1.0;   // quantum efficiency
  double nu = 0.0;    // dark-count parameter; a detector stays dark with probability exp(-nu)

  void validate() const;

  bool operator==(const DetectorConfig&) const = default;
};

/// Distribution c_0..c_N of the number of clicking detectors.
struct ClickDistribution {
  Vector<double> probs;

  int detectors() const { return static_cast<int>(probs.size()) - 1; }
};

enum class ClickMethod {
  GeneratingFunction,  // inclusion-exclusion over the photon generating function
  OccupancyDp,         // nonnegative occupancy recurrence, averaged over photon number
  Auto,
};

const char* to_string(ClickMethod method) noexcept;

ClickDistribution click_distribution(const StateSpec& spec, const DetectorConfig& config,
                                     ClickMethod method = ClickMethod::Auto,
                                     double tail_tolerance = kDefaultTailTolerance);

/// Result of a single evaluation path before validity checks are applied.
struct PathResult {
  Vector<double> probs;
  // Estimated absolute round-off in the worst entry; zero for the occupancy path.
  double error_estimate = 0.0;
};

/// Inclusion-exclusion path, accumulated in long double.
PathResult click_distribution_generating_function(const StateSpec& spec, const DetectorConfig& config,
                                                  double tail_tolerance = kDefaultTailTolerance);
PathResult click_distribution_occupancy(const StateSpec& spec, const DetectorConfig& config,
                                        double tail_tolerance = kDefaultTailTolerance);

/// Law of the number of distinct bins hit when `balls` balls land uniformly
/// and independently in `bins` bins. Entry k is C(N,k) k! S(m,k) / N^m.
template <typename Scalar = double>
Vector<Scalar> occupancy_distribution(int balls, int bins) {
  const int support = std::min(balls, bins);
  Vector<Scalar> occ = Vector<Scalar>::Zero(support + 1);
  occ(0) = Scalar(1);
  const Scalar n = Scalar(bins);
  for (int m = 0; m < balls; ++m) {
    for (int k = std::min(m + 1, bins); k >= 1; --k)
      occ(k) = occ(k) * (Scalar(k) / n) + occ(k - 1) * (Scalar(bins - k + 1) / n);
    occ(0) = Scalar(0);
  }
  return occ;
}

ClickDistribution binomial_reference(int detectors, double p);

Moments<double> click_moments(const ClickDistribution& dist);

/// Q_B = N Var(c) / (<c> (N - <c>)) - 1. Throws DegenerateMean when the mean
/// is within kDegenerateMeanThreshold of 0 or N.
double qb_parameter(const ClickDistribution& dist);

/// Q_M = Var(n) / <n> - 1 over a distribution indexed by count.
double mandel_q(const Eigen::Ref<const Vector<double>>& probs);

struct NonclassicalityReport {
  double q_b = 0.0;
  double q_m_clicks = 0.0;
  std::optional<double> q_m_photons;
  double click_mean = 0.0;
  double click_variance = 0.0;
};

NonclassicalityReport nonclassicality_report(const StateSpec& spec, const DetectorConfig& config,
                                             ClickMethod method = ClickMethod::Auto);

}  // namespace clickstat
