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

#ifndef QCTL_CONFIG_HPP
#define QCTL_CONFIG_HPP

// Experiment configuration: JSON document, strict schema (unknown keys are
// errors), every problem reported with a JSON-pointer style location.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qctl/awg_engine.hpp"
#include "qctl/device_model.hpp"
#include "qctl/dsp_demod.hpp"
#include "qctl/mixer.hpp"
#include "qctl/timing_fabric.hpp"

namespace qctl::orchestrator {

using Json = nlohmann::json;

enum class ExperimentKind {
  kOneTone,
  kTwoTone,
  kT1,
  kRamsey,
  kJitterHistogram,
  kFeedbackLatency,
  kMixerCalibration,
  kBudgetSweep,
  kDemodSelftest,
};

const char* to_string(ExperimentKind kind);
std::optional<ExperimentKind> experiment_kind_from_string(const std::string& s);

struct SweepAxis {
  std::string name;
  double start = 0.0;
  double stop = 0.0;
  int points = 1;

  /// Linearly spaced values, start..stop inclusive.
  std::vector<double> values() const;
};

struct ReadoutSettings {
  device::ReadoutPulse pulse;
  std::int64_t window_samples = 0;  // 0 = whole readout record
};

struct DriveSettings {
  std::string pi_envelope = "pi_pulse";
  double detuning_hz = 0.0;
  double bias_volts = 0.0;
  bool bias_set = false;
  /// Two-tone saturation pulse.
  double saturation_amplitude = 0.002;
  double saturation_duration_s = 4e-6;
  bool use_bvg_noise = false;
};

struct JitterSettings {
  std::vector<std::string> channels{"AWG1", "AWG2"};
  std::string daq = "DAQ";
  double tone_hz = 819.0 * 1e9 / 4096.0;
  std::size_t capture_samples = 4096;
  double amplitude_volts = 0.9;
  double interval_s = 100e-6;
  double histogram_bin_ps = 1.0;
};

enum class OutputFormat { kCsv, kJsonLines };

struct FeedbackSettings {
  dsp::QubitState input_state = dsp::QubitState::kExcited;
};

enum class BudgetKind { kJitter, kSfdr, kBias };

const char* to_string(BudgetKind kind);
std::optional<BudgetKind> budget_kind_from_string(const std::string& s);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kT1;
  std::uint64_t seed = 0;
  int shots = 1;
  std::optional<SweepAxis> sweep;
  device::QubitParams device;
  device::BvgModel bvg;
  ReadoutSettings readout;
  DriveSettings drive;
  dsp::AdcModel adc;
  timing::ClockTopology topology;
  timing::LatencyLedger ledger = timing::default_ledger();
  awg::PulseSequence sequence;
  awg::MixerParams mixer;
  JitterSettings jitter;
  FeedbackSettings feedback;
  BudgetKind budget = BudgetKind::kJitter;
  OutputFormat format = OutputFormat::kCsv;

  /// Canonical JSON of the normalized config (defaults filled in).
  Json normalized;
  /// FNV-1a 64 of normalized.dump(), hex.
  std::string hash;
};

struct ConfigError {
  std::string path;
  std::string message;
};

struct ValidationResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigError> errors;
  bool ok() const { return errors.empty(); }
};

/// Schema-checks a parsed document. `base_dir` resolves a sequence given as a
/// file path.
ValidationResult validate_config(const Json& doc, const std::filesystem::path& base_dir = {});

/// Reads and validates a config file. I/O and JSON syntax problems are
/// reported as errors at path "".
ValidationResult validate_config_file(const std::filesystem::path& path);

/// Envelope/schedule document:
///   {"envelopes": [{"name": str, "codes": [int...]}],
///    "schedule": [{"envelope": str, "offset_samples": int, "scale": num, "phase_tag": str}],
///    "memory_budget_bits": int}
awg::PulseSequence parse_sequence(const Json& doc, const std::string& at, std::vector<ConfigError>& errors);
Json sequence_to_json(const awg::PulseSequence& seq);

/// 40-sample (20 ns) Gaussian envelope used as the default pi pulse.
awg::PulseEnvelope default_pi_envelope(const std::string& name = "pi_pulse");

/// TCM star with AWG1, AWG2 and DAQ leaves; AWG edges carry sigma so the
/// channel-to-channel jitter is `differential_sigma_ps`.
timing::ClockTopology default_topology(double differential_sigma_ps = 5.0);

std::string fnv1a_hex(const std::string& data);

}  // namespace qctl::orchestrator

#endif  // QCTL_CONFIG_HPP
