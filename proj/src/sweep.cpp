#include "clickstat/sweep.hpp"

#include "clickstat/errors.hpp"
#include "clickstat/parallel.hpp"

#include <cmath>

namespace clickstat {
namespace {

// Returns the number of fields rewritten.
int apply_axis(StateSpec& spec, SweepAxis axis, double value) {
  switch (spec.kind) {
    case StateKind::Coherent:
    case StateKind::Thermal:
      if (axis != SweepAxis::MeanPhotons) return 0;
      spec.mean_photons = value;
      return 1;
    case StateKind::SqueezedVacuum:
      if (axis != SweepAxis::SqueezeR) return 0;
      spec.r = value;
      return 1;
    case StateKind::Mixture: {
      int touched = 0;
      for (auto& c : spec.components) touched += apply_axis(c.state, axis, value);
      return touched;
    }
    default: return 0;
  }
}

}  // namespace

const char* to_string(SweepAxis axis) noexcept {
  switch (axis) {
    case SweepAxis::Eta: return "eta";
    case SweepAxis::Nu: return "nu";
    case SweepAxis::Detectors: return "N";
    case SweepAxis::MeanPhotons: return "mean_photons";
    case SweepAxis::SqueezeR: return "r";
  }
  return "unknown";
}

std::optional<SweepAxis> parse_sweep_axis(std::string_view name) {
  for (auto axis : {SweepAxis::Eta, SweepAxis::Nu, SweepAxis::Detectors, SweepAxis::MeanPhotons, SweepAxis::SqueezeR})
    if (name == to_string(axis)) return axis;
  return std::nullopt;
}

std::vector<double> sweep_grid(SweepAxis axis, double from, double to, int steps) {
  if (steps < 1) throw Error(ErrorCode::ValidationError, "steps: must be at least 1");
  if (!std::isfinite(from) || !std::isfinite(to)) throw Error(ErrorCode::ValidationError, "from/to: must be finite");
  if (axis == SweepAxis::Detectors && (from != std::round(from) || to != std::round(to)))
    throw Error(ErrorCode::ValidationError, "from/to: detector axis needs integer end points");
  std::vector<double> grid(steps);
  for (int i = 0; i < steps; ++i) {
    const double v = steps == 1 ? from : i == steps - 1 ? to : from + (to - from) * i / (steps - 1);
    grid[i] = axis == SweepAxis::Detectors ? std::round(v) : v;
  }
  return grid;
}

std::vector<SweepRow> sweep(const StateSpec& spec, const DetectorConfig& config, SweepAxis axis,
                            const std::vector<double>& grid, ClickMethod method, unsigned workers) {
  std::vector<StateSpec> states(grid.size(), spec);
  std::vector<DetectorConfig> configs(grid.size(), config);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    switch (axis) {
      case SweepAxis::Eta: configs[i].eta = grid[i]; break;
      case SweepAxis::Nu: configs[i].nu = grid[i]; break;
      case SweepAxis::Detectors: configs[i].detectors = static_cast<int>(grid[i]); break;
      case SweepAxis::MeanPhotons:
      case SweepAxis::SqueezeR:
        if (apply_axis(states[i], axis, grid[i]) == 0)
          throw Error(ErrorCode::ValidationError, std::string("sweep axis ") + to_string(axis) +
                                                      " does not apply to a " + to_string(spec.kind) + " state");
        break;
    }
    configs[i].validate();
    states[i].validate();
  }

  std::vector<SweepRow> rows(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    rows[i].axis_value = grid[i];
    try {
      rows[i].report = nonclassicality_report(states[i], configs[i], method);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateMean) throw;
    }
  });
  return rows;
}

}  // namespace clickstat
