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

#ifndef QCTL_MIXER_HPP
#define QCTL_MIXER_HPP

// Analog IQ upconversion with DC offset, gain imbalance and phase skew, plus
// the digital pre-compensation that cancels LO and image leakage.

#include <array>
#include <span>
#include <vector>

#include "qctl/common.hpp"

namespace qctl::awg {

struct MixerParams {
  double lo_frequency_hz = 3000.0 * 2e9 / 16384.0;
  double dc_offset_i = 0.0;     // fraction of full scale
  double dc_offset_q = 0.0;
  double gain_imbalance = 0.0;  // epsilon
  double phase_skew_rad = 0.0;  // delta

  void validate() const;
};

/// Digital correction applied before the DAC:
///   [i'; q'] = M(gain, phase) [i; q] + [offset_i; offset_q]
/// with M = [[1/(1+g/2), tan(p)/(1+g/2)], [0, 1/((1-g/2) cos p)]].
/// All-zero parameters are the identity.
struct IqCorrection {
  double offset_i = 0.0;
  double offset_q = 0.0;
  double gain = 0.0;
  double phase = 0.0;

  std::array<double, 4> matrix() const;  // row-major
  bool is_identity() const { return offset_i == 0 && offset_q == 0 && gain == 0 && phase == 0; }
};

/// out(t) = (1+e/2)(i+dI) cos(w t) - (1-e/2)(q+dQ) sin(w t + delta)
std::vector<double> upconvert(std::span<const double> i, std::span<const double> q, const MixerParams& params,
                              double sample_rate_hz = 2e9);

void apply_correction(const IqCorrection& c, std::span<double> i, std::span<double> q);

/// Coherent single-sideband probe used to measure leakage: IF tone on bin
/// `if_bin` of an `fft_size` record at 2 GSa/s.
struct LeakageProbe {
  std::size_t fft_size = 16384;
  std::size_t if_bin = 400;
  double amplitude = 0.5;
  double sample_rate_hz = 2e9;
};

struct LeakageReport {
  double lo_dbc = 0.0;
  double image_dbc = 0.0;
};

LeakageReport measure_leakage(const MixerParams& params, const IqCorrection& correction,
                              const LeakageProbe& probe = {});

/// Closed-form inverse of the mixer model.
IqCorrection analytic_correction(const MixerParams& params);

struct PrecompensationResult {
  IqCorrection correction;
  LeakageReport leakage;
  int iterations = 0;
};

class PrecompensationFailed : public Error {
 public:
  PrecompensationFailed(PrecompensationResult best);
  const PrecompensationResult& best() const { return best_; }

 private:
  PrecompensationResult best_;
};

inline constexpr int kPrecompensationIterationCap = 200;
inline constexpr double kPrecompensationTargetDbc = -50.0;

/// Derivative-free coordinate search over (offset_i, offset_q, gain, phase)
/// minimizing LO plus image power on a 2^14-point FFT, starting at `start`.
/// Throws PrecompensationFailed with the best point found if either leakage
/// is still above -50 dBc after the iteration cap.
PrecompensationResult precompensate(const MixerParams& params, const IqCorrection& start = {},
                                    const LeakageProbe& probe = {});

}  // namespace qctl::awg

#endif  // QCTL_MIXER_HPP
