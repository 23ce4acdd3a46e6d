#pragma once

#include "clickstat/click_kernel.hpp"
#include "clickstat/states.hpp"

#include <cstdint>
#include <vector>

namespace clickstat {

/// Trials per random substream. Changing it changes every simulated record.
inline constexpr std::size_t kSimulationChunkSize = 4096;
inline constexpr std::uint64_t kMaxTrials = 100'000'000;

struct ClickSampleSet {
  int detectors = 1;
  std::vector<int> clicks;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  DetectorConfig config_echo;
  StateSpec state_echo;
};

/// Inverse-CDF table over a truncated photon-number distribution.
class PhotonNumberSampler {
 public:
  explicit PhotonNumberSampler(const StateSpec& spec, double tail_tolerance = kDefaultTailTolerance);

  /// Smallest n whose cumulative probability exceeds `draw`; draws at or past
  /// the truncated total map to n_max.
  int operator()(double draw) const;

  int n_max() const { return static_cast<int>(cumulative_.size()) - 1; }

 private:
  std::vector<double> cumulative_;
};

int sample_photon_number(const StateSpec& spec, double random_draw);

/// Per-photon Monte Carlo of the detector array. The record is a function of
/// (spec, config, trials, seed) only; `workers` sets parallelism.
ClickSampleSet simulate(const StateSpec& spec, const DetectorConfig& config, std::uint64_t trials,
                        std::uint64_t seed, unsigned workers = 1);

}  // namespace clickstat
