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

#ifndef QCTL_DEVICE_MODEL_HPP
#define QCTL_DEVICE_MODEL_HPP

// Minimal flux-tunable two-level qubit with a dispersively coupled readout
// resonator and the DC bias source that sets its operating point.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qctl/common.hpp"
#include "qctl/fidelity_budget.hpp"

namespace qctl::device {

using Complex = std::complex<double>;

struct QubitParams {
  double f_min_hz = 1.82e9;
  double f_max_hz = 3.5e9;
  double r_ohm = 1e3;
  double m_henry = 2e-12;
  /// Bias period of one flux quantum, Phi0 R / M.
  double flux_period_volts = fidelity::kFluxQuantumWb * 1e3 / 2e-12;
  /// Half-flux-quantum point where f_q = f_min.
  double sweet_spot_volts = 0.5 * fidelity::kFluxQuantumWb * 1e3 / 2e-12;
  double t1_s = 90e-6;
  double t2_star_s = 19e-6;
  double readout_frequency_hz = 7.0e9;
  double kappa_hz = 1e6;
  double chi_hz = 0.5e6;
  /// Resonator pull swept across one flux period (dip moves with bias).
  double flux_pull_hz = 2e6;
  /// Rabi angular frequency per unit of normalized drive amplitude (rad/s).
  double rabi_rad_s_per_unit = kTwoPi * 50e6;
  /// Probability that an immediately repeated measurement agrees.
  double qnd_fidelity = 1.0;

  void validate() const;
};

/// f_q(V) = f_min + (f_max - f_min) (1 - cos(2 pi (V - V_sweet) / P)) / 2
double qubit_frequency(double bias_volts, const QubitParams& p);
double qubit_frequency_slope(double bias_volts, const QubitParams& p);  // Hz / V

/// Resonator centre for a qubit state: f_r +/- chi plus the flux pull.
double resonator_frequency(int state, const QubitParams& p, double bias_volts);

/// Notch-type Lorentzian S21 = 2 i x / (1 + 2 i x), x = (f - f_c) / kappa.
Complex resonator_response(double probe_hz, int state, const QubitParams& p, double bias_volts);
Complex resonator_response(double probe_hz, int state, const QubitParams& p);

/// Bloch vector with +z = ground.
struct Bloch {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  double p_excited() const { return 0.5 * (1.0 - z); }
  double p_ground() const { return 0.5 * (1.0 + z); }
  double norm() const;
  static Bloch ground() { return {0, 0, 1}; }
  static Bloch excited() { return {0, 0, -1}; }
};

/// Piecewise-constant drive. amplitude is normalized (Omega = k * amplitude).
struct DriveSegment {
  double duration_s = 0.0;
  double amplitude = 0.0;
  double phase_rad = 0.0;
  double frequency_hz = 0.0;  // rotating-frame carrier; 0 selects the qubit frame
};

inline constexpr double kMaxStepSeconds = 1e-9;

struct BvgModel;

struct EvolveOptions {
  /// Operating point; defaults to the sweet spot when unset.
  std::optional<double> bias_volts;
  /// When set, a quasi-static detuning is drawn per call from the BVG noise
  /// through the local flux slope.
  const BvgModel* bvg = nullptr;
  /// Extra fixed detuning for this shot (Hz).
  double static_detuning_hz = 0.0;
  /// Step for driven segments (s). Must not exceed 1 ns.
  double max_step_s = kMaxStepSeconds;
  bool decoherence = true;
};

/// Rotating-frame evolution: exact rotation about (Omega cos phi, Omega sin phi,
/// Delta) per step, followed by T1 relaxation and pure dephasing
/// (1/T_phi = 1/T2* - 1/(2 T1)) as exponential damping.
/// Throws InvalidArgument when max_step_s exceeds 1 ns.
Bloch evolve(Bloch state, std::span<const DriveSegment> segments, const QubitParams& p, std::uint64_t seed,
             const EvolveOptions& opt = {});

struct ReadoutPulse {
  double duration_s = 512e-9;
  double probe_hz = 7.0e9 - 0.5e6;  // readout tone, default at the ground-state dip
  double if_hz = 250e6;
  double amplitude_volts = 0.5;
  double noise_sigma_volts = 0.02;  // per sample, per quadrature
  double sample_rate_hz = 1e9;
};

struct MeasurementRecord {
  int state = 0;  // collapsed outcome, 0 ground / 1 excited
  Bloch post_state;
  std::vector<double> i_volts;
  std::vector<double> q_volts;
};

/// Projective readout with Born probabilities. The emitted IF tone carries
/// amplitude and phase of the resonator response for the collapsed state plus
/// additive Gaussian noise.
MeasurementRecord measure(const Bloch& state, const ReadoutPulse& pulse, const QubitParams& p, std::uint64_t seed,
                          double bias_volts);
MeasurementRecord measure(const Bloch& state, const ReadoutPulse& pulse, const QubitParams& p, std::uint64_t seed);

struct BvgModel {
  double set_voltage = 0.0;
  double noise_pp_volts = 1.6e-6;           // 0.1-10 Hz band
  double drift_pp_volts_per_10h = 4.6e-6;   // linear drift accumulated over 10 h
  int resolution_bits = 20;
  double range_volts = 5.0;                 // output spans +/- range
  double temp_coefficient_v_per_c = 0.0;
  double temp_swing_c = 0.0;                // peak ambient swing, 24 h period

  double lsb_volts() const;
  void validate() const;
};

inline constexpr int kBvgNoiseTones = 200;
/// Peak-to-peak to RMS ratio used to size the band-limited noise.
inline constexpr double kPeakToPeakPerRms = 6.6;

/// Quantized set point + 200 random-phase log-spaced tones (0.1-10 Hz) scaled
/// to noise_pp + linear drift + temperature term. Deterministic in seed.
double bvg_output(const BvgModel& model, double t_s, std::uint64_t seed);

/// Root-sum-square combination of independent peak-to-peak contributions.
double combine_noise_pp(std::span<const double> contributions_pp);

/// RMS quasi-static detuning (Hz) produced by the BVG noise at `bias_volts`,
/// first order in the flux slope: sigma_f = |df/dV| noise_pp / 6.6.
double bvg_detuning_sigma_hz(const BvgModel& model, const QubitParams& p, double bias_volts);

}  // namespace qctl::device

#endif  // QCTL_DEVICE_MODEL_HPP
