#pragma once

#include "clickstat/click_kernel.hpp"
#include "clickstat/states.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace clickstat {

enum class SweepAxis { Eta, Nu, Detectors, MeanPhotons, SqueezeR };

const char* to_string(SweepAxis axis) noexcept;
std::optional<SweepAxis> parse_sweep_axis(std::string_view name);

/// `steps` evenly spaced values from `from` to `to` inclusive. The detector
/// axis requires integral end points and rounds interior points.
std::vector<double> sweep_grid(SweepAxis axis, double from, double to, int steps);

struct SweepRow {
  double axis_value;
  // Empty when the click mean is degenerate at this grid point.
  std::optional<NonclassicalityReport> report;
};

/// Evaluates the exact report at every grid point. `mean_photons` applies to
/// coherent and thermal states, `r` to squeezed vacuum; inside a mixture the
/// axis is applied to every component of the matching kind.
std::vector<SweepRow> sweep(const StateSpec& spec, const DetectorConfig& config, SweepAxis axis,
                            const std::vector<double>& grid, ClickMethod method = ClickMethod::Auto,
                            unsigned workers = 1);

}  // namespace clickstat
