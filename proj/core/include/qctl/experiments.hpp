// Copyright 2026 The qctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QCTL_EXPERIMENTS_HPP
#define QCTL_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "qctl/config.hpp"
#include "qctl/fit.hpp"

namespace qctl::orchestrator {

const char* tool_version();

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

struct RunResult {
  ExperimentKind kind = ExperimentKind::kT1;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string tool_version;
  std::vector<Table> tables;
  std::vector<fit::FitResult> fits;
  /// Set when a fit failed to converge or a calibration missed its target.
  /// Raw tables are still written.
  bool flagged = false;
  std::vector<std::string> flags;
  /// Experiment-specific scalar results.
  Json metrics = Json::object();
  Json ledger = Json::object();
  Json normalized_config = Json::object();

  void flag(std::string why);
};

// Readout chain: measurement record -> ADC -> fs/4 mix -> accumulate -> discriminate.
struct ReadoutCalibration {
  double rotation_rad = 0.0;
  std::int64_t threshold = 0;
  std::int64_t window_samples = 0;
  dsp::IqPoint ground;
  dsp::IqPoint excited;
};

ReadoutCalibration calibrate_readout(const device::ReadoutPulse& pulse, std::int64_t window_samples,
                                     const device::QubitParams& p, double bias_volts);

struct ReadoutShot {
  dsp::IqPoint point;
  dsp::Discrimination decision;
  device::MeasurementRecord record;
};

ReadoutShot read_out(const device::Bloch& state, const device::ReadoutPulse& pulse, const dsp::AdcModel& adc,
                     const ReadoutCalibration& cal, const device::QubitParams& p, double bias_volts,
                     std::uint64_t seed, Picoseconds start_ps = 0);

struct TimelineEvent {
  std::string name;
  Picoseconds t_ps = 0;
  std::string component;
  timing::LatencyGroup group = timing::LatencyGroup::kElectronics;
  Picoseconds step_ps = 0;  // time since the previous event
};

struct FeedbackRun {
  std::vector<TimelineEvent> timeline;
  dsp::QubitState decided = dsp::QubitState::kGround;
  bool feedback_issued = false;
  /// Last event minus first event.
  Picoseconds measured_ps = 0;
  Picoseconds measured_electronics_ps = 0;
  Picoseconds measured_readout_ps = 0;
  Picoseconds measured_control_pulse_ps = 0;
  timing::FeedbackLatency ledger_totals;
  std::vector<timing::TriggerEvent> triggers;
};

/// Loopback AWG -> DAQ feedback run. A ground-state decision ends the timeline
/// at discrimination and is reported as "no feedback", not as an error.
FeedbackRun run_feedback_latency(const ExperimentConfig& cfg);

struct JitterHistogram {
  std::vector<double> delays_ps;  // per-shot relative delay channel 0 - channel 1
  double mean_ps = 0.0;
  double std_ps = 0.0;
  std::vector<double> bin_centers_ps;
  std::vector<std::int64_t> counts;
};

/// Paired two-channel captures, relative delay from the phase of the tone's
/// DFT bin computed in Q15 fixed point. Throws Error when the tone is too weak.
JitterHistogram run_jitter_histogram(const ExperimentConfig& cfg);

/// Fixed-point single-bin DFT phase (rad) of a 12-bit capture.
double fixed_point_bin_phase(std::span<const std::int16_t> codes, std::size_t bin, double* magnitude = nullptr);

Table budget_table(BudgetKind kind, const SweepAxis& axis);
SweepAxis default_budget_axis(BudgetKind kind);

/// Executes any experiment kind deterministically from (config, seed).
RunResult run(const ExperimentConfig& cfg);

struct WrittenFiles {
  std::vector<std::filesystem::path> tables;
  std::filesystem::path summary;
};

/// One table file per sweep plus `<experiment>_summary.json`. Every row
/// carries the seed and config hash.
WrittenFiles write_outputs(const RunResult& result, const std::filesystem::path& out_dir, OutputFormat format);

Json summary_json(const RunResult& result);

std::string format_cell(const Cell& c);

}  // namespace qctl::orchestrator

#endif  // QCTL_EXPERIMENTS_HPP
