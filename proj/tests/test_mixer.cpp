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

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "qctl/mixer.hpp"

namespace qctl::awg {
namespace {

using C = std::complex<double>;

// Phasors of the closed-form mixer output for i = A cos(wt), q = A sin(wt):
// LO term g_I d_I + j g_Q d_Q e^{j delta}; sidebands A/2 (g_I +/- g_Q e^{j delta}).
LeakageReport closed_form(const MixerParams& p, double amp) {
  const double gi = 1.0 + p.gain_imbalance / 2.0;
  const double gq = 1.0 - p.gain_imbalance / 2.0;
  const C e = std::polar(1.0, p.phase_skew_rad);
  const C lo = gi * p.dc_offset_i + C(0, 1) * gq * p.dc_offset_q * e;
  const C usb = amp / 2.0 * (gi + gq * e);
  const C lsb = amp / 2.0 * (gi - gq * e);
  // A real cosine's one-sided bin carries half the phasor; the DC-like LO
  // term appears at +f_LO with the same factor, so the ratios hold directly.
  return {20.0 * std::log10(std::abs(lo) / std::abs(usb)), 20.0 * std::log10(std::abs(lsb) / std::abs(usb))};
}

// Naive DFT of the upconverted stream at one bin.
C dft_bin(const std::vector<double>& x, std::size_t bin) {
  C acc = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) acc += x[k] * std::polar(1.0, -kTwoPi * static_cast<double>((bin * k) % x.size()) / n);
  return acc;
}

MixerParams imbalanced() {
  MixerParams p;
  p.dc_offset_i = 0.003;
  p.dc_offset_q = 0.003;
  p.gain_imbalance = 0.02;
  p.phase_skew_rad = 0.02;
  return p;
}

TEST(Mixer, IdealIsPure) {
  const auto r = measure_leakage(MixerParams{}, {});
  EXPECT_LT(r.lo_dbc, -120.0);
  EXPECT_LT(r.image_dbc, -120.0);
}

TEST(Mixer, IdealPowerOutsideSidebandBelowFloor) {
  const LeakageProbe probe;
  std::vector<double> i(probe.fft_size), q(probe.fft_size);
  for (std::size_t k = 0; k < probe.fft_size; ++k) {
    const double ph = kTwoPi * static_cast<double>(probe.if_bin * k) / static_cast<double>(probe.fft_size);
    i[k] = probe.amplitude * std::cos(ph);
    q[k] = probe.amplitude * std::sin(ph);
  }
  const auto rf = upconvert(i, q, MixerParams{});
  const std::size_t usb = 3000 + probe.if_bin;
  const double p_sig = std::norm(dft_bin(rf, usb));
  double other = 0.0;
  for (std::size_t b = 2900; b < 3500; ++b) {
    if (b != usb) other += std::norm(dft_bin(rf, b));
  }
  EXPECT_LT(10.0 * std::log10(other / p_sig), -120.0);
}

TEST(Mixer, ImbalanceMatchesClosedForm) {
  const auto p = imbalanced();
  const auto r = measure_leakage(p, {});
  const auto oracle = closed_form(p, 0.5);
  EXPECT_NEAR(r.lo_dbc, oracle.lo_dbc, 0.01);
  EXPECT_NEAR(r.image_dbc, oracle.image_dbc, 0.01);
  EXPECT_GT(r.lo_dbc, -50.0);
  EXPECT_GT(r.image_dbc, -50.0);
}

TEST(Mixer, ImbalanceMatchesNaiveDft) {
  const auto p = imbalanced();
  const LeakageProbe probe;
  std::vector<double> i(probe.fft_size), q(probe.fft_size);
  for (std::size_t k = 0; k < probe.fft_size; ++k) {
    const double ph = kTwoPi * static_cast<double>(probe.if_bin * k) / static_cast<double>(probe.fft_size);
    i[k] = probe.amplitude * std::cos(ph);
    q[k] = probe.amplitude * std::sin(ph);
  }
  const auto rf = upconvert(i, q, p);
  const double sig = std::abs(dft_bin(rf, 3400));
  const auto r = measure_leakage(p, {});
  EXPECT_NEAR(r.lo_dbc, 20.0 * std::log10(std::abs(dft_bin(rf, 3000)) / sig), 1e-6);
  EXPECT_NEAR(r.image_dbc, 20.0 * std::log10(std::abs(dft_bin(rf, 2600)) / sig), 1e-6);
}

TEST(Mixer, AnalyticInverseIsExact) {
  const auto p = imbalanced();
  const auto r = measure_leakage(p, analytic_correction(p));
  EXPECT_LT(r.lo_dbc, -120.0);
  EXPECT_LT(r.image_dbc, -120.0);
}

TEST(Mixer, PrecompensationReachesTarget) {
  const auto p = imbalanced();
  const auto res = precompensate(p);
  EXPECT_LE(res.leakage.lo_dbc, -50.0);
  EXPECT_LE(res.leakage.image_dbc, -50.0);
  EXPECT_LE(res.iterations, kPrecompensationIterationCap);
  // Within 10 dB of the analytic inverse (which sits at the numerical floor).
  const auto exact = measure_leakage(p, analytic_correction(p));
  EXPECT_LE(std::max(res.leakage.lo_dbc, res.leakage.image_dbc),
            std::max({exact.lo_dbc, exact.image_dbc, -130.0}) + 10.0);
}

TEST(Mixer, IdealGivesIdentity) {
  const auto res = precompensate(MixerParams{});
  EXPECT_TRUE(res.correction.is_identity());
  const auto m = res.correction.matrix();
  EXPECT_EQ(m[0], 1.0);
  EXPECT_EQ(m[1], 0.0);
  EXPECT_EQ(m[3], 1.0);
}

TEST(Mixer, CalibrationIdempotent) {
  const auto p = imbalanced();
  const auto first = precompensate(p);
  const auto second = precompensate(p, first.correction);
  EXPECT_LE(second.leakage.lo_dbc, first.leakage.lo_dbc + 1e-9);
  EXPECT_LE(second.leakage.image_dbc, first.leakage.image_dbc + 1e-9);
  EXPECT_NEAR(second.correction.gain, first.correction.gain, 1e-6);
  EXPECT_NEAR(second.correction.phase, first.correction.phase, 1e-6);
  EXPECT_NEAR(second.correction.offset_i, first.correction.offset_i, 1e-6);
  EXPECT_NEAR(second.correction.offset_q, first.correction.offset_q, 1e-6);
}

TEST(Mixer, UnequalLengthsRejected) {
  const std::vector<double> a(4), b(5);
  EXPECT_THROW(upconvert(a, b, MixerParams{}), InvalidArgument);
  MixerParams bad;
  bad.dc_offset_i = 1.5;
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

}  // namespace
}  // namespace qctl::awg
