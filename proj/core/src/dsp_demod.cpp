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

#include "qctl/dsp_demod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qctl/fft.hpp"

namespace qctl::dsp {

void IQSampleStream::validate() const {
  if (i_codes.size() != q_codes.size()) throw InvalidArgument("iq stream: I and Q lengths differ");
  const auto in_range = [](std::int16_t v) { return v >= kAdcMin && v <= kAdcMax; };
  if (!std::all_of(i_codes.begin(), i_codes.end(), in_range) || !std::all_of(q_codes.begin(), q_codes.end(), in_range)) {
    throw InvalidArgument("iq stream: code outside 12-bit range");
  }
  if (!(sample_rate_hz > 0.0)) throw InvalidArgument("iq stream: sample rate must be positive");
}

void DemodConfig::validate(double sample_rate_hz) const {
  if (fast_path && if_frequency_hz != sample_rate_hz / 4.0) {
    throw InvalidArgument("demod: fast path requires IF = fs/4");
  }
  if (window_samples < 1 || window_samples > kMaxWindowSamples) throw InvalidArgument("demod: window out of range");
}

std::vector<SnrPoint> default_snr_table() {
  return {
      {19.9e6, 60.0, -65.5}, {49e6, 58.3, -65.0},  {98e6, 58.2, -65.6},
      {148e6, 58.0, -62.9},  {198e6, 58.1, -64.0}, {248e6, 57.4, -61.9},
      {298e6, 57.1, -59.6},  {348e6, 57.0, -57.1}, {398e6, 57.1, -63.9},
  };
}

AdcModel AdcModel::noiseless() {
  AdcModel m;
  m.snr_table.clear();
  return m;
}

void AdcModel::validate() const {
  if (!(full_scale_volts > 0.0)) throw InvalidArgument("adc: full scale must be positive");
  if (!(band_low_hz < band_high_hz)) throw InvalidArgument("adc: band low must be below band high");
  for (const auto& p : snr_table) {
    if (!(p.snr_db > 0.0)) throw InvalidArgument("adc: snr must be positive");
  }
}

double AdcModel::snr_db_at(double f) const {
  if (snr_table.empty()) return std::numeric_limits<double>::infinity();
  if (f <= snr_table.front().frequency_hz) return snr_table.front().snr_db;
  if (f >= snr_table.back().frequency_hz) return snr_table.back().snr_db;
  for (std::size_t k = 1; k < snr_table.size(); ++k) {
    const auto& a = snr_table[k - 1];
    const auto& b = snr_table[k];
    if (f <= b.frequency_hz) {
      const double t = (f - a.frequency_hz) / (b.frequency_hz - a.frequency_hz);
      return a.snr_db + t * (b.snr_db - a.snr_db);
    }
  }
  return snr_table.back().snr_db;
}

namespace {

// Zeroes every bin whose |frequency| lies outside [lo, hi]; returns the
// filtered signal and the dominant in-band frequency.
std::vector<double> band_limit(std::span<const double> x, double fs, double lo, double hi, double* peak_hz) {
  std::vector<Complex> c(x.begin(), x.end());
  auto spec = fft(c);
  const std::size_t n = spec.size();
  double peak = -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t kk = k <= n / 2 ? k : n - k;
    const double f = fs * static_cast<double>(kk) / static_cast<double>(n);
    if (f < lo || f > hi) {
      spec[k] = 0.0;
    } else if (peak_hz != nullptr && std::norm(spec[k]) > peak) {
      peak = std::norm(spec[k]);
      *peak_hz = f;
    }
  }
  const auto back = ifft(spec);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = back[k].real();
  return out;
}

}  // namespace

DigitizeResult adc_digitize(std::span<const double> i_volts, std::span<const double> q_volts, const AdcModel& model,
                            std::uint64_t seed, Picoseconds start_ps) {
  model.validate();
  if (i_volts.size() != q_volts.size()) throw InvalidArgument("adc: I and Q lengths differ");

  double peak_i = 0.0;
  double peak_q = 0.0;
  const auto fi = band_limit(i_volts, kAdcSampleRateHz, model.band_low_hz, model.band_high_hz, &peak_i);
  const auto fq = band_limit(q_volts, kAdcSampleRateHz, model.band_low_hz, model.band_high_hz, &peak_q);

  const double codes_per_volt = 2048.0 / model.full_scale_volts;
  // Total noise for a full-scale sine at the configured SNR, less the
  // quantization share the rounding below contributes on its own.
  double sigma_codes = 0.0;
  if (!model.snr_table.empty()) {
    const double snr = model.snr_db_at(std::max(peak_i, peak_q));
    const double total = (2048.0 * 2048.0 / 2.0) / std::pow(10.0, snr / 10.0);
    sigma_codes = std::sqrt(std::max(0.0, total - 1.0 / 12.0));
  }

  Rng rng(derive_seed(seed, 0xADCULL));
  std::normal_distribution<double> gauss(0.0, 1.0);
  DigitizeResult out;
  out.stream.start_timestamp_ps = start_ps;
  out.stream.i_codes.resize(fi.size());
  out.stream.q_codes.resize(fq.size());
  const auto quantize = [&](double v) {
    double code = v * codes_per_volt;
    if (sigma_codes > 0.0) code += sigma_codes * gauss(rng);
    const auto r = static_cast<std::int64_t>(round_half_even(code));
    const auto c = clamp_to_bits(r, kAdcBits);
    if (c != r) out.clipped = true;
    return static_cast<std::int16_t>(c);
  };
  for (std::size_t n = 0; n < fi.size(); ++n) {
    out.stream.i_codes[n] = quantize(fi[n]);
    out.stream.q_codes[n] = quantize(fq[n]);
  }
  return out;
}

namespace {

// Integer division by 2^shift rounding half to even.
std::int64_t rshift_round_even(std::int64_t v, int shift) {
  if (shift == 0) return v;
  const std::int64_t div = std::int64_t{1} << shift;
  std::int64_t q = v >= 0 ? v / div : -((-v) / div);
  std::int64_t r = v - q * div;  // same sign as v
  const std::int64_t half = div / 2;
  if (r > half || (r == half && (q & 1) != 0)) {
    ++q;
  } else if (r < -half || (r == -half && (q & 1) != 0)) {
    --q;
  }
  return q;
}

}  // namespace

MixedStream digital_mix_general(const IQSampleStream& stream, double if_frequency_hz, TrigPrecision precision) {
  stream.validate();
  const long double step = static_cast<long double>(if_frequency_hz) / stream.sample_rate_hz;
  const double scale = precision == TrigPrecision::kQ15 ? 32767.0 : 1.0;
  const int shift = precision == TrigPrecision::kQ15 ? 15 : 0;

  MixedStream out;
  out.i.resize(stream.size());
  out.q.resize(stream.size());
  for (std::size_t n = 0; n < stream.size(); ++n) {
    long double cycles = step * static_cast<long double>(n);
    cycles -= std::floor(cycles);
    const double ph = kTwoPi * static_cast<double>(cycles);
    const auto c = static_cast<std::int64_t>(round_half_even(scale * std::cos(ph)));
    const auto s = static_cast<std::int64_t>(round_half_even(scale * std::sin(ph)));
    const std::int64_t vi = stream.i_codes[n];
    const std::int64_t vq = stream.q_codes[n];
    out.i[n] = static_cast<std::int32_t>(rshift_round_even(vi * c + vq * s, shift));
    out.q[n] = static_cast<std::int32_t>(rshift_round_even(vq * c - vi * s, shift));
  }
  return out;
}

MixedStream digital_mix_fast(const IQSampleStream& stream) {
  stream.validate();
  MixedStream out;
  out.i.resize(stream.size());
  out.q.resize(stream.size());
  for (std::size_t n = 0; n < stream.size(); ++n) {
    const std::int32_t vi = stream.i_codes[n];
    const std::int32_t vq = stream.q_codes[n];
    switch (n & 3U) {
      case 0: out.i[n] = vi;  out.q[n] = vq;  break;
      case 1: out.i[n] = vq;  out.q[n] = -vi; break;
      case 2: out.i[n] = -vi; out.q[n] = -vq; break;
      default: out.i[n] = -vq; out.q[n] = vi; break;
    }
  }
  return out;
}

MixResult digital_mix(const IQSampleStream& stream, const DemodConfig& cfg) {
  cfg.validate(stream.sample_rate_hz);
  if (cfg.fast_path) return {digital_mix_fast(stream), kMixerLatencyPs};
  // The multiplier path costs an extra clock for the DSP slices.
  return {digital_mix_general(stream, cfg.if_frequency_hz, TrigPrecision::kQ15), 2 * kPipelineClockPs};
}

std::vector<IqPoint> accumulate(const MixedStream& mixed, std::int64_t window_samples) {
  if (window_samples < 1) throw InvalidArgument("accumulate: window must be >= 1");
  if (window_samples > kMaxWindowSamples) throw InvalidArgument("accumulate: window exceeds 2^18 samples");
  if (mixed.i.size() != mixed.q.size()) throw InvalidArgument("accumulate: I and Q lengths differ");
  if (static_cast<std::size_t>(window_samples) > mixed.i.size()) {
    throw InvalidArgument("accumulate: window longer than stream (partial window)");
  }
  static constexpr std::int64_t lo = std::numeric_limits<std::int32_t>::min();
  static constexpr std::int64_t hi = std::numeric_limits<std::int32_t>::max();
  const auto sat_add = [](std::int32_t a, std::int32_t b) {
    return static_cast<std::int32_t>(std::clamp(std::int64_t{a} + b, lo, hi));
  };

  const std::size_t w = static_cast<std::size_t>(window_samples);
  const std::size_t windows = mixed.i.size() / w;
  std::vector<IqPoint> out(windows);
  for (std::size_t k = 0; k < windows; ++k) {
    IqPoint p;
    for (std::size_t n = k * w; n < (k + 1) * w; ++n) {
      p.i_sum = sat_add(p.i_sum, mixed.i[n]);
      p.q_sum = sat_add(p.q_sum, mixed.q[n]);
    }
    out[k] = p;
  }
  return out;
}

const char* to_string(QubitState s) { return s == QubitState::kExcited ? "excited" : "ground"; }

Discrimination discriminate(IqPoint point, double rotation_rad, std::int64_t threshold, Picoseconds decision_time_ps,
                            const std::string& source) {
  const double c = std::cos(rotation_rad);
  const double s = std::sin(rotation_rad);
  Discrimination d;
  d.rotated_i = c * point.i_sum - s * point.q_sum;
  if (d.rotated_i > static_cast<double>(threshold)) {
    d.state = QubitState::kExcited;
    d.feedback = timing::TriggerEvent{2, decision_time_ps, source, "feedback"};
  }
  return d;
}

namespace {

void check_channels(const IQSampleStream& stream, std::span<const double> channel_hz, std::int64_t window,
                    bool decimated) {
  stream.validate();
  if (window < 1 || static_cast<std::size_t>(window) > stream.size()) {
    throw InvalidArgument("demod: window must be within the stream length");
  }
  const double fs = stream.sample_rate_hz;
  for (const double f : channel_hz) {
    if (f < 4.5e6 || f > 400e6) throw InvalidArgument("demod: channel " + std::to_string(f) + " Hz outside input band");
    if (decimated && std::abs(f - fs / 4.0) >= fs / 8.0) {
      throw InvalidArgument("demod: channel " + std::to_string(f) + " Hz outside the decimated band");
    }
  }
  if (!decimated) return;
  if (window % 4 != 0) throw InvalidArgument("demod: window must be a multiple of the decimation factor 4");
  const double min_spacing = 2.0 * fs / static_cast<double>(window);
  for (std::size_t a = 0; a < channel_hz.size(); ++a) {
    for (std::size_t b = a + 1; b < channel_hz.size(); ++b) {
      if (std::abs(channel_hz[a] - channel_hz[b]) < min_spacing) {
        throw InvalidArgument("demod: channels " + std::to_string(a) + " and " + std::to_string(b) +
                              " closer than two post-decimation bins");
      }
    }
  }
}

}  // namespace

std::vector<Complex> full_rate_demod(const IQSampleStream& stream, std::span<const double> channel_hz,
                                     std::int64_t window_samples) {
  check_channels(stream, channel_hz, window_samples, false);
  std::vector<Complex> out;
  for (const double f : channel_hz) {
    Complex acc = 0.0;
    for (std::int64_t n = 0; n < window_samples; ++n) {
      const double ph = -kTwoPi * f * static_cast<double>(n) / stream.sample_rate_hz;
      acc += Complex(stream.i_codes[static_cast<std::size_t>(n)], stream.q_codes[static_cast<std::size_t>(n)]) *
             std::polar(1.0, ph);
    }
    out.push_back(acc);
  }
  return out;
}

std::vector<Complex> multi_channel_demod(const IQSampleStream& stream, std::span<const double> channel_hz,
                                         std::int64_t window_samples) {
  check_channels(stream, channel_hz, window_samples, true);
  const double fs = stream.sample_rate_hz;

  IQSampleStream head = stream;
  head.i_codes.resize(static_cast<std::size_t>(window_samples));
  head.q_codes.resize(static_cast<std::size_t>(window_samples));
  const MixedStream mixed = digital_mix_fast(head);

  // Two 2-tap boxcar + decimate-by-2 stages.
  const auto halve = [](const std::vector<std::int32_t>& x) {
    std::vector<std::int32_t> y(x.size() / 2);
    for (std::size_t p = 0; p < y.size(); ++p) y[p] = x[2 * p] + x[2 * p + 1];
    return y;
  };
  const auto di = halve(halve(mixed.i));
  const auto dq = halve(halve(mixed.q));

  std::vector<Complex> out;
  for (const double f : channel_hz) {
    const double delta = f - fs / 4.0;
    Complex acc = 0.0;
    for (std::size_t m = 0; m < di.size(); ++m) {
      const double ph = -kTwoPi * delta * 4.0 * static_cast<double>(m) / fs;
      acc += Complex(di[m], dq[m]) * std::polar(1.0, ph);
    }
    Complex gain = 0.0;
    for (int k = 0; k < 4; ++k) gain += std::polar(1.0, kTwoPi * delta * k / fs);
    out.push_back(acc * 4.0 / gain);
  }
  return out;
}

}  // namespace qctl::dsp
