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

#ifndef QCTL_AWG_ENGINE_HPP
#define QCTL_AWG_ENGINE_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qctl/common.hpp"
#include "qctl/timing_fabric.hpp"

namespace qctl::awg {

inline constexpr int kDacBits = 14;
inline constexpr std::int16_t kDacMin = -8192;
inline constexpr std::int16_t kDacMax = 8191;
inline constexpr double kDacSampleRateHz = 2e9;
inline constexpr Picoseconds kDacSamplePeriodPs = 500;
inline constexpr std::int64_t kDefaultMemoryBudgetBits = 30'000'000;
inline constexpr std::int64_t kScheduleEntryBits = 64;
/// Output filter cutoff used for the analog reconstruction model.
inline constexpr double kReconstructionCutoffHz = 530e6;

struct PulseEnvelope {
  std::string name;
  std::vector<std::int16_t> samples;

  void validate() const;
};

struct ScheduleEntry {
  std::string envelope;
  std::int64_t offset_samples = 0;  // from the level-2 trigger, 2 GSa/s ticks
  double scale = 1.0;               // in [-1, 1]
  std::string phase_tag;
};

struct PulseSequence {
  std::vector<PulseEnvelope> envelopes;
  std::vector<ScheduleEntry> schedule;
  std::int64_t memory_budget_bits = kDefaultMemoryBudgetBits;

  /// 14 bits per stored envelope sample plus 64 bits per schedule entry.
  std::int64_t stored_bits() const;
};

class MemoryBudgetExceeded : public Error {
 public:
  MemoryBudgetExceeded(std::int64_t required_bits, std::int64_t available_bits);
  std::int64_t required_bits() const { return required_; }
  std::int64_t available_bits() const { return available_; }

 private:
  std::int64_t required_;
  std::int64_t available_;
};

struct SequenceHandle {
  std::uint32_t id = 0;
  friend bool operator==(SequenceHandle, SequenceHandle) = default;
};

struct RenderResult {
  std::vector<std::int16_t> codes;
  Picoseconds trigger_ps = 0;
  /// Waveform-generator pipeline latency spent before the first code leaves.
  Picoseconds latency_ps = 0;
  Picoseconds first_sample_ps() const { return trigger_ps + latency_ps; }
};

/// Envelope/offset compressed waveform store with trigger-driven playback.
/// Stored sequences are immutable; render is const.
class AwgEngine {
 public:
  /// Throws MemoryBudgetExceeded, or InvalidArgument for malformed sequences
  /// (bad codes, duplicate envelope names, unknown envelope in the schedule,
  /// scale outside [-1, 1], negative offset).
  SequenceHandle load_sequence(PulseSequence seq);

  std::int64_t stored_bits(SequenceHandle h) const;

  /// Dense 14-bit stream of `duration_samples` following a level-2 trigger.
  /// Each scheduled envelope is scaled and rounded half-to-even, contributions
  /// are summed wide and the sum is clamped to the 14-bit range.
  RenderResult render(SequenceHandle h, const timing::TriggerEvent& trigger,
                      std::int64_t duration_samples) const;

  const PulseSequence& sequence(SequenceHandle h) const;

 private:
  std::map<std::uint32_t, PulseSequence> sequences_;
  std::uint32_t next_id_ = 1;
};

/// Per-channel sample offset after DAC power-up, uniform over {-2..+2}.
std::vector<int> dac_power_up(std::uint64_t seed, std::size_t channels);

/// Delays `codes` by `offset` samples (negative advances), zero-filling.
std::vector<std::int16_t> apply_sample_offset(std::span<const std::int16_t> codes, int offset);

/// Measures each captured channel's lag against `reference` by
/// cross-correlating first differences (edges) over +/- max_lag and returns the
/// correction that cancels it. Throws InvalidArgument when the correlation has
/// no unique peak (flat waveform).
std::vector<int> calibrate_dac_sync(std::span<const std::int16_t> reference,
                                    const std::vector<std::vector<std::int16_t>>& captured,
                                    int max_lag = 8);

/// Magnitude spectrum (one-sided, volts-per-code units) of the DAC output after
/// zero-order hold and the ideal 530 MHz reconstruction filter.
std::vector<double> reconstructed_spectrum(std::span<const std::int16_t> codes);

}  // namespace qctl::awg

#endif  // QCTL_AWG_ENGINE_HPP
