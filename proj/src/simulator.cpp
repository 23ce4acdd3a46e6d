#include "clickstat/simulator.hpp"

#include "clickstat/errors.hpp"
#include "clickstat/parallel.hpp"
#include "clickstat/random.hpp"

#include <algorithm>
#include <cmath>

namespace clickstat {

PhotonNumberSampler::PhotonNumberSampler(const StateSpec& spec, double tail_tolerance) {
  const auto pnd = make_distribution(spec, tail_tolerance);
  cumulative_.resize(pnd.probs.size());
  CompensatedSum<double> running;
  for (Eigen::Index n = 0; n < pnd.probs.size(); ++n) {
    running.add(pnd.probs(n));
    cumulative_[n] = running.value();
  }
}

int PhotonNumberSampler::operator()(double draw) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), draw);
  if (it == cumulative_.end()) return n_max();
  return static_cast<int>(it - cumulative_.begin());
}

int sample_photon_number(const StateSpec& spec, double random_draw) {
  return PhotonNumberSampler(spec)(random_draw);
}

ClickSampleSet simulate(const StateSpec& spec, const DetectorConfig& config, std::uint64_t trials,
                        std::uint64_t seed, unsigned workers) {
  config.validate();
  if (trials < 1 || trials > kMaxTrials)
    throw Error(ErrorCode::InvalidArgument, "trials must lie in [1, 1e8]");
  const PhotonNumberSampler sampler(spec);

  ClickSampleSet out;
  out.detectors = config.detectors;
  out.seed = seed;
  out.trials = trials;
  out.config_echo = config;
  out.state_echo = spec;
  out.clicks.assign(trials, 0);

  const int n_det = config.detectors;
  const double dark = -std::expm1(-config.nu);
  const std::size_t chunks = (trials + kSimulationChunkSize - 1) / kSimulationChunkSize;

  parallel_for(chunks, workers, [&](std::size_t chunk) {
    auto engine = substream(seed, chunk);
    // fired[d] == stamp marks detector d as clicked in the current trial.
    std::vector<std::uint64_t> fired(n_det, 0);
    const std::size_t begin = chunk * kSimulationChunkSize;
    const std::size_t end = std::min<std::size_t>(begin + kSimulationChunkSize, trials);
    for (std::size_t t = begin; t < end; ++t) {
      const std::uint64_t stamp = t + 1;
      int count = 0;
      const int photons = sampler(uniform01(engine));
      for (int p = 0; p < photons; ++p) {
        if (uniform01(engine) >= config.eta) continue;
        const auto d = uniform_below(engine, static_cast<std::uint64_t>(n_det));
        if (fired[d] != stamp) {
          fired[d] = stamp;
          ++count;
        }
      }
      if (dark > 0.0) {
        for (int d = 0; d < n_det; ++d) {
          if (fired[d] == stamp) continue;
          if (uniform01(engine) < dark) ++count;
        }
      }
      out.clicks[t] = count;
    }
  });
  return out;
}

}  // namespace clickstat
