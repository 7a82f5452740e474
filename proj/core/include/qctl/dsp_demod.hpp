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

#ifndef QCTL_DSP_DEMOD_HPP
#define QCTL_DSP_DEMOD_HPP

// DAQ model: 12-bit ADC, fixed-point digital downconversion, windowed
// accumulation, state discrimination and multi-channel demodulation.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qctl/common.hpp"
#include "qctl/timing_fabric.hpp"

namespace qctl::dsp {

using Complex = std::complex<double>;

inline constexpr int kAdcBits = 12;
inline constexpr std::int16_t kAdcMin = -2048;
inline constexpr std::int16_t kAdcMax = 2047;
inline constexpr double kAdcSampleRateHz = 1e9;
inline constexpr Picoseconds kAdcSamplePeriodPs = 1000;
inline constexpr double kFastPathIfHz = kAdcSampleRateHz / 4.0;

// DSP pipeline at 250 MHz: mixer 1 clock, three-stage adder 3 clocks,
// rotation/threshold 1 clock.
inline constexpr Picoseconds kPipelineClockPs = 4000;
inline constexpr Picoseconds kMixerLatencyPs = 1 * kPipelineClockPs;
inline constexpr Picoseconds kAccumulatorLatencyPs = 3 * kPipelineClockPs;
inline constexpr Picoseconds kDiscriminatorLatencyPs = 1 * kPipelineClockPs;
inline constexpr Picoseconds kDaqDspLatencyPs = kMixerLatencyPs + kAccumulatorLatencyPs + kDiscriminatorLatencyPs;

inline constexpr std::int64_t kMaxWindowSamples = std::int64_t{1} << 18;

struct IQSampleStream {
  std::vector<std::int16_t> i_codes;
  std::vector<std::int16_t> q_codes;
  double sample_rate_hz = kAdcSampleRateHz;
  Picoseconds start_timestamp_ps = 0;

  std::size_t size() const { return i_codes.size(); }
  void validate() const;
};

struct DemodConfig {
  double if_frequency_hz = kFastPathIfHz;
  std::int64_t window_samples = 48;
  double rotation_rad = 0.0;
  std::int64_t threshold = 0;
  bool fast_path = true;

  void validate(double sample_rate_hz = kAdcSampleRateHz) const;
};

struct SnrPoint {
  double frequency_hz = 0.0;
  double snr_db = 0.0;
  double thd_dbc = 0.0;
};

/// Measured DAQ SNR/THD versus input frequency.
std::vector<SnrPoint> default_snr_table();

struct AdcModel {
  double full_scale_volts = 1.0;  // amplitude mapped to 2048 codes
  double band_low_hz = 4.5e6;
  double band_high_hz = 400e6;
  /// SNR relative to a full-scale sine, linearly interpolated in frequency.
  /// Empty table means no added noise (quantization only).
  std::vector<SnrPoint> snr_table = default_snr_table();

  static AdcModel noiseless();
  double snr_db_at(double frequency_hz) const;
  void validate() const;
};

struct DigitizeResult {
  IQSampleStream stream;
  bool clipped = false;
};

/// Band-limits each channel to the input band (brick-wall FFT filter), adds
/// Gaussian noise sized to the SNR at the dominant tone frequency and quantizes
/// round-half-even to 12 bits with clipping. Inputs are volts at 1 GSa/s.
DigitizeResult adc_digitize(std::span<const double> i_volts, std::span<const double> q_volts,
                            const AdcModel& model, std::uint64_t seed, Picoseconds start_ps = 0);

struct MixedStream {
  std::vector<std::int32_t> i;
  std::vector<std::int32_t> q;
};

enum class TrigPrecision {
  kQ15,   // 16-bit signed tables, products rescaled by 2^-15 round-half-even
  kUnit,  // coefficients rounded to {-1, 0, 1}; exact at fs/4
};

/// General-path mixer:
///   I' = V_I cos(w n / fs) + V_Q sin(w n / fs)
///   Q' = V_Q cos(w n / fs) - V_I sin(w n / fs)
MixedStream digital_mix_general(const IQSampleStream& stream, double if_frequency_hz,
                                TrigPrecision precision = TrigPrecision::kQ15);

/// Multiplier-free fs/4 mixer: coefficients cycle through cos {1,0,-1,0},
/// sin {0,1,0,-1}.
MixedStream digital_mix_fast(const IQSampleStream& stream);

struct MixResult {
  MixedStream mixed;
  Picoseconds latency_ps = 0;
};

/// Dispatches on cfg.fast_path. Throws InvalidArgument for a fast path at a
/// non-fs/4 IF. The fast path costs one pipeline clock.
MixResult digital_mix(const IQSampleStream& stream, const DemodConfig& cfg);

struct IqPoint {
  std::int32_t i_sum = 0;
  std::int32_t q_sum = 0;
  friend bool operator==(const IqPoint&, const IqPoint&) = default;
};

/// Sums over consecutive non-overlapping windows in saturating 32-bit
/// accumulators; a trailing partial window is dropped. Throws InvalidArgument
/// when the window is < 1, above 2^18 or longer than the stream.
std::vector<IqPoint> accumulate(const MixedStream& mixed, std::int64_t window_samples);

enum class QubitState { kGround = 0, kExcited = 1 };

const char* to_string(QubitState s);

struct Discrimination {
  QubitState state = QubitState::kGround;
  double rotated_i = 0.0;
  std::optional<timing::TriggerEvent> feedback;
};

/// Rotates the point by rotation_rad; excited iff rotated I > threshold
/// (equality is ground). An excited decision emits a level-2 "feedback"
/// trigger stamped at decision_time_ps.
Discrimination discriminate(IqPoint point, double rotation_rad, std::int64_t threshold,
                            Picoseconds decision_time_ps = 0, const std::string& source = "DAQ");

/// Direct per-channel demodulation at full rate over the first `window`
/// samples; the reference for the decimated path.
std::vector<Complex> full_rate_demod(const IQSampleStream& stream, std::span<const double> channel_hz,
                                     std::int64_t window_samples);

/// fs/4 fast mix, two rounds of 2-tap boxcar + decimate-by-2, per-channel
/// rotation at (f_ch - fs/4) on the 250 MHz stream and accumulation over the
/// first `window` input samples. Results are normalized by the known boxcar
/// response so they are directly comparable to full_rate_demod.
std::vector<Complex> multi_channel_demod(const IQSampleStream& stream, std::span<const double> channel_hz,
                                         std::int64_t window_samples);

struct SpectrumMetrics {
  double snr_db = 0.0;
  double thd_dbc = 0.0;
  double sfdr_dbc = 0.0;
  double enob_bits = 0.0;
  std::size_t fundamental_bin = 0;
};

/// 4-term Blackman-Harris windowed FFT. Fundamental is the largest bin;
/// THD sums harmonics 2-6 (aliased); SFDR is the worst spur relative to the
/// fundamental (negative dBc); SNR excludes DC, fundamental and harmonics;
/// ENOB = (SNR - 1.76) / 6.02. Length must be a power of two >= 4096.
SpectrumMetrics spectrum_metrics(std::span<const double> samples);
SpectrumMetrics spectrum_metrics(std::span<const Complex> samples);

}  // namespace qctl::dsp

#endif  // QCTL_DSP_DEMOD_HPP
