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

#include "qctl/device_model.hpp"

#include <algorithm>
#include <cmath>

namespace qctl::device {

void QubitParams::validate() const {
  if (!(t1_s > 0.0) || !(t2_star_s > 0.0)) throw InvalidArgument("qubit: T1 and T2* must be positive");
  if (t2_star_s > 2.0 * t1_s) throw InvalidArgument("qubit: T2* must not exceed 2 T1");
  if (!(kappa_hz > 0.0) || !(chi_hz > 0.0)) throw InvalidArgument("qubit: kappa and chi must be positive");
  if (!(flux_period_volts > 0.0)) throw InvalidArgument("qubit: flux period must be positive");
  if (!(f_max_hz >= f_min_hz)) throw InvalidArgument("qubit: f_max must be >= f_min");
  if (!(qnd_fidelity >= 0.0 && qnd_fidelity <= 1.0)) throw InvalidArgument("qubit: QND fidelity must be in [0, 1]");
}

double qubit_frequency(double bias_volts, const QubitParams& p) {
  const double u = kTwoPi * (bias_volts - p.sweet_spot_volts) / p.flux_period_volts;
  return p.f_min_hz + (p.f_max_hz - p.f_min_hz) * (1.0 - std::cos(u)) / 2.0;
}

double qubit_frequency_slope(double bias_volts, const QubitParams& p) {
  const double u = kTwoPi * (bias_volts - p.sweet_spot_volts) / p.flux_period_volts;
  return (p.f_max_hz - p.f_min_hz) * kPi / p.flux_period_volts * std::sin(u);
}

double resonator_frequency(int state, const QubitParams& p, double bias_volts) {
  const double span = p.f_max_hz - p.f_min_hz;
  const double pull = span > 0.0 ? p.flux_pull_hz * (qubit_frequency(bias_volts, p) - p.f_min_hz) / span : 0.0;
  return p.readout_frequency_hz + p.chi_hz * (state == 0 ? -1.0 : 1.0) + pull;
}

Complex resonator_response(double probe_hz, int state, const QubitParams& p, double bias_volts) {
  const double x = (probe_hz - resonator_frequency(state, p, bias_volts)) / p.kappa_hz;
  const Complex j2x(0.0, 2.0 * x);
  return j2x / (1.0 + j2x);
}

Complex resonator_response(double probe_hz, int state, const QubitParams& p) {
  return resonator_response(probe_hz, state, p, p.sweet_spot_volts);
}

double Bloch::norm() const { return std::sqrt(x * x + y * y + z * z); }

namespace {

// Rotates r by angle |w| dt about w (Rodrigues).
Bloch rotate(const Bloch& r, double wx, double wy, double wz, double dt) {
  const double w = std::sqrt(wx * wx + wy * wy + wz * wz);
  if (w == 0.0 || dt == 0.0) return r;
  const double nx = wx / w, ny = wy / w, nz = wz / w;
  const double a = w * dt;
  const double c = std::cos(a), s = std::sin(a);
  const double dot = nx * r.x + ny * r.y + nz * r.z;
  const double cx = ny * r.z - nz * r.y;
  const double cy = nz * r.x - nx * r.z;
  const double cz = nx * r.y - ny * r.x;
  return {r.x * c + cx * s + nx * dot * (1 - c), r.y * c + cy * s + ny * dot * (1 - c),
          r.z * c + cz * s + nz * dot * (1 - c)};
}

Bloch damp(Bloch r, double dt, const QubitParams& p) {
  const double et2 = std::exp(-dt / p.t2_star_s);
  const double et1 = std::exp(-dt / p.t1_s);
  r.x *= et2;
  r.y *= et2;
  r.z = 1.0 + (r.z - 1.0) * et1;
  return r;
}

}  // namespace

Bloch evolve(Bloch state, std::span<const DriveSegment> segments, const QubitParams& p, std::uint64_t seed,
             const EvolveOptions& opt) {
  p.validate();
  if (!(opt.max_step_s > 0.0) || opt.max_step_s > kMaxStepSeconds) {
    throw InvalidArgument("evolve: step size must be in (0, 1 ns]");
  }
  const double bias = opt.bias_volts.value_or(p.sweet_spot_volts);
  const double fq = qubit_frequency(bias, p);
  double static_hz = opt.static_detuning_hz;
  if (opt.bvg != nullptr) {
    Rng rng(derive_seed(seed, 0xB7CULL));
    std::normal_distribution<double> gauss(0.0, bvg_detuning_sigma_hz(*opt.bvg, p, bias));
    static_hz += gauss(rng);
  }

  for (const auto& seg : segments) {
    if (seg.duration_s < 0.0) throw InvalidArgument("evolve: negative segment duration");
    const double omega = p.rabi_rad_s_per_unit * seg.amplitude;
    // A zero carrier means the frame rotates with the unperturbed qubit.
    const double delta = seg.frequency_hz == 0.0 ? -kTwoPi * static_hz : kTwoPi * (seg.frequency_hz - fq - static_hz);
    const double wx = omega * std::cos(seg.phase_rad);
    const double wy = omega * std::sin(seg.phase_rad);
    const int steps = omega == 0.0 ? 1 : static_cast<int>(std::ceil(seg.duration_s / opt.max_step_s - 1e-9));
    const double dt = steps > 0 ? seg.duration_s / steps : 0.0;
    for (int k = 0; k < steps; ++k) {
      state = rotate(state, wx, wy, delta, dt);
      if (opt.decoherence) state = damp(state, dt, p);
    }
  }
  return state;
}

MeasurementRecord measure(const Bloch& state, const ReadoutPulse& pulse, const QubitParams& p, std::uint64_t seed,
                          double bias_volts) {
  if (!(pulse.duration_s > 0.0)) throw InvalidArgument("measure: readout duration must be positive");
  Rng rng(derive_seed(seed, 0x3EA5ULL));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  MeasurementRecord rec;
  rec.state = uni(rng) < std::clamp(state.p_excited(), 0.0, 1.0) ? 1 : 0;
  int post = rec.state;
  if (p.qnd_fidelity < 1.0 && uni(rng) >= p.qnd_fidelity) post = 1 - post;
  rec.post_state = post == 1 ? Bloch::excited() : Bloch::ground();

  const Complex s21 = resonator_response(pulse.probe_hz, rec.state, p, bias_volts);
  const auto n = static_cast<std::size_t>(std::llround(pulse.duration_s * pulse.sample_rate_hz));
  rec.i_volts.resize(n);
  rec.q_volts.resize(n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double ph = kTwoPi * pulse.if_hz * static_cast<double>(k) / pulse.sample_rate_hz;
    const Complex v = pulse.amplitude_volts * s21 * std::polar(1.0, ph);
    rec.i_volts[k] = v.real();
    rec.q_volts[k] = v.imag();
    if (pulse.noise_sigma_volts > 0.0) {
      rec.i_volts[k] += pulse.noise_sigma_volts * gauss(rng);
      rec.q_volts[k] += pulse.noise_sigma_volts * gauss(rng);
    }
  }
  return rec;
}

MeasurementRecord measure(const Bloch& state, const ReadoutPulse& pulse, const QubitParams& p, std::uint64_t seed) {
  return measure(state, pulse, p, seed, p.sweet_spot_volts);
}

double BvgModel::lsb_volts() const { return 2.0 * range_volts / std::ldexp(1.0, resolution_bits); }

void BvgModel::validate() const {
  if (!(std::abs(set_voltage) <= range_volts)) throw InvalidArgument("bvg: set point outside output range");
  if (!(noise_pp_volts >= 0.0)) throw InvalidArgument("bvg: noise must be >= 0");
  if (resolution_bits < 1 || resolution_bits > 32) throw InvalidArgument("bvg: resolution out of range");
}

double bvg_output(const BvgModel& model, double t_s, std::uint64_t seed) {
  model.validate();
  const double lsb = model.lsb_volts();
  double v = round_half_even(model.set_voltage / lsb) * lsb;

  if (model.noise_pp_volts > 0.0) {
    Rng rng(derive_seed(seed, 0xB76ULL));
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    const double rms = model.noise_pp_volts / kPeakToPeakPerRms;
    const double a = rms * std::sqrt(2.0 / kBvgNoiseTones);
    for (int k = 0; k < kBvgNoiseTones; ++k) {
      const double f = 0.1 * std::pow(100.0, static_cast<double>(k) / (kBvgNoiseTones - 1));
      v += a * std::sin(kTwoPi * f * t_s + phase(rng));
    }
  }
  v += model.drift_pp_volts_per_10h * t_s / 36000.0;
  v += model.temp_coefficient_v_per_c * model.temp_swing_c * std::sin(kTwoPi * t_s / 86400.0);
  return v;
}

double combine_noise_pp(std::span<const double> contributions_pp) {
  double s = 0.0;
  for (const double c : contributions_pp) s += c * c;
  return std::sqrt(s);
}

double bvg_detuning_sigma_hz(const BvgModel& model, const QubitParams& p, double bias_volts) {
  return std::abs(qubit_frequency_slope(bias_volts, p)) * model.noise_pp_volts / kPeakToPeakPerRms;
}

}  // namespace qctl::device
