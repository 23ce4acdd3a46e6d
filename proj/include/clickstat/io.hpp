#pragma once

#include "clickstat/click_kernel.hpp"
#include "clickstat/estimators.hpp"
#include "clickstat/simulator.hpp"
#include "clickstat/states.hpp"
#include "clickstat/sweep.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace clickstat {

enum class OutputFormat { Table, Structured };

/// Rounds to the 12 significant digits used by every emitted number.
double round_to_output_precision(double value);
std::string format_number(double value);

// State specs: {"kind":"coherent","mean_photons":4.0}, {"kind":"fock","n":3},
// {"kind":"mixture","components":[{"weight":0.5,"state":{...}}, ...]}, ...
StateSpec parse_state_spec(std::string_view text);
std::string format_state_spec(const StateSpec& spec);

std::string format_detector_config(const DetectorConfig& config);
DetectorConfig parse_detector_config(std::string_view text);

// Sample records: '#'-prefixed key=value preamble (N, seed, trials, state,
// config), a `clicks` header line, then one count per line.
void write_sample_file(std::ostream& out, const ClickSampleSet& samples);
ClickSampleSet read_sample_file(std::istream& in);

void write_click_distribution(std::ostream& out, const ClickDistribution& dist, OutputFormat format);
ClickDistribution read_click_distribution(std::istream& in);

void write_nonclassicality_report(std::ostream& out, const NonclassicalityReport& report, OutputFormat format);
NonclassicalityReport read_nonclassicality_report(std::istream& in);

void write_estimates(std::ostream& out, const std::vector<EstimateReport>& reports, OutputFormat format);
std::vector<EstimateReport> read_estimates(std::istream& in);

struct SweepTable {
  SweepAxis axis;
  std::vector<SweepRow> rows;
};

void write_sweep(std::ostream& out, const SweepTable& table, OutputFormat format);
SweepTable read_sweep(std::istream& in);

}  // namespace clickstat
