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

#include "qctl/mixer.hpp"

#include <algorithm>
#include <cmath>

#include "qctl/fft.hpp"

namespace qctl::awg {

void MixerParams::validate() const {
  if (!(std::abs(dc_offset_i) < 1.0) || !(std::abs(dc_offset_q) < 1.0)) {
    throw InvalidArgument("mixer: |dc offset| must be < 1");
  }
  // gain_imbalance is the deviation epsilon; the I/Q gains (1 +/- e/2) must stay positive.
  if (!(std::abs(gain_imbalance) < 2.0)) throw InvalidArgument("mixer: gain imbalance out of range");
  if (!(lo_frequency_hz > 0.0)) throw InvalidArgument("mixer: LO frequency must be positive");
}

std::array<double, 4> IqCorrection::matrix() const {
  const double a = 1.0 / (1.0 + gain / 2.0);
  return {a, a * std::tan(phase), 0.0, 1.0 / ((1.0 - gain / 2.0) * std::cos(phase))};
}

void apply_correction(const IqCorrection& c, std::span<double> i, std::span<double> q) {
  if (c.is_identity()) return;
  const auto m = c.matrix();
  for (std::size_t n = 0; n < i.size(); ++n) {
    const double ii = i[n];
    const double qq = q[n];
    i[n] = m[0] * ii + m[1] * qq + c.offset_i;
    q[n] = m[2] * ii + m[3] * qq + c.offset_q;
  }
}

std::vector<double> upconvert(std::span<const double> i, std::span<const double> q, const MixerParams& params,
                              double sample_rate_hz) {
  params.validate();
  if (i.size() != q.size()) throw InvalidArgument("upconvert: I and Q lengths differ");
  const double gi = 1.0 + params.gain_imbalance / 2.0;
  const double gq = 1.0 - params.gain_imbalance / 2.0;
  const double w = kTwoPi * params.lo_frequency_hz / sample_rate_hz;
  std::vector<double> out(i.size());
  for (std::size_t n = 0; n < i.size(); ++n) {
    const double ph = w * static_cast<double>(n);
    out[n] = gi * (i[n] + params.dc_offset_i) * std::cos(ph) -
             gq * (q[n] + params.dc_offset_q) * std::sin(ph + params.phase_skew_rad);
  }
  return out;
}

LeakageReport measure_leakage(const MixerParams& params, const IqCorrection& correction, const LeakageProbe& probe) {
  const std::size_t n = probe.fft_size;
  std::vector<double> i(n), q(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double ph = kTwoPi * static_cast<double>(probe.if_bin) * static_cast<double>(k) / static_cast<double>(n);
    i[k] = probe.amplitude * std::cos(ph);
    q[k] = probe.amplitude * std::sin(ph);
  }
  apply_correction(correction, i, q);
  const auto rf = upconvert(i, q, params, probe.sample_rate_hz);
  const auto spec = fft_real(rf);

  const auto lo_bin = static_cast<std::size_t>(
      std::llround(params.lo_frequency_hz * static_cast<double>(n) / probe.sample_rate_hz));
  const std::size_t usb = lo_bin + probe.if_bin;
  const std::size_t lsb = lo_bin - probe.if_bin;
  const double p_sig = std::norm(spec[usb]);
  // The numerical floor of a double-precision FFT sits near -300 dBc; clamp so
  // a perfect cancellation still yields a finite number.
  const auto rel_db = [&](std::size_t bin) {
    return 10.0 * std::log10(std::max(std::norm(spec[bin]) / p_sig, 1e-40));
  };
  return {rel_db(lo_bin), rel_db(lsb)};
}

IqCorrection analytic_correction(const MixerParams& params) {
  // Solving the closed form for [i'; q'] such that the output is
  // i cos(wt) - q sin(wt) exactly gives M(eps, delta) and offsets -d.
  return {-params.dc_offset_i, -params.dc_offset_q, params.gain_imbalance, params.phase_skew_rad};
}

PrecompensationFailed::PrecompensationFailed(PrecompensationResult best)
    : Error("mixer pre-compensation did not reach -50 dBc"), best_(best) {}

namespace {

double cost(const MixerParams& params, const IqCorrection& c, const LeakageProbe& probe) {
  const auto r = measure_leakage(params, c, probe);
  return std::pow(10.0, r.lo_dbc / 10.0) + std::pow(10.0, r.image_dbc / 10.0);
}

double& coord(IqCorrection& c, int k) {
  switch (k) {
    case 0: return c.offset_i;
    case 1: return c.offset_q;
    case 2: return c.gain;
    default: return c.phase;
  }
}

}  // namespace

PrecompensationResult precompensate(const MixerParams& params, const IqCorrection& start, const LeakageProbe& probe) {
  params.validate();
  constexpr double kFloor = 1e-16;  // -160 dBc combined
  constexpr double kMinStep = 1e-14;
  IqCorrection best = start;
  double best_cost = cost(params, best, probe);
  std::array<double, 4> step{1e-2, 1e-2, 1e-2, 1e-2};

  int iter = 0;
  while (iter < kPrecompensationIterationCap && best_cost > kFloor) {
    ++iter;
    bool moved = false;
    for (int k = 0; k < 4; ++k) {
      bool improved = false;
      for (const double dir : {1.0, -1.0}) {
        IqCorrection trial = best;
        coord(trial, k) += dir * step[k];
        const double c = cost(params, trial, probe);
        if (c < best_cost) {
          best = trial;
          best_cost = c;
          improved = true;
          break;
        }
      }
      if (improved) {
        moved = true;
        step[k] *= 1.5;
      } else {
        step[k] *= 0.5;
      }
    }
    if (!moved && *std::max_element(step.begin(), step.end()) < kMinStep) break;
  }

  PrecompensationResult result{best, measure_leakage(params, best, probe), iter};
  if (result.leakage.lo_dbc > kPrecompensationTargetDbc || result.leakage.image_dbc > kPrecompensationTargetDbc) {
    throw PrecompensationFailed(result);
  }
  return result;
}

}  // namespace qctl::awg
