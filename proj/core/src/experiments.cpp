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

#include "qctl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qctl/fidelity_budget.hpp"

namespace qctl::orchestrator {

namespace {

dsp::DemodConfig demod_for(const device::ReadoutPulse& pulse, std::int64_t window) {
  dsp::DemodConfig d;
  d.if_frequency_hz = pulse.if_hz;
  d.window_samples = window;
  d.fast_path = pulse.if_hz == dsp::kFastPathIfHz && pulse.sample_rate_hz == dsp::kAdcSampleRateHz;
  return d;
}

std::int64_t record_samples(const device::ReadoutPulse& pulse) {
  return std::llround(pulse.duration_s * pulse.sample_rate_hz);
}

dsp::IqPoint demodulate(const dsp::IQSampleStream& stream, const device::ReadoutPulse& pulse, std::int64_t window) {
  const auto mixed = dsp::digital_mix(stream, demod_for(pulse, window));
  return dsp::accumulate(mixed.mixed, window).front();
}

double rotate(const dsp::IqPoint& p, double rot) {
  return std::cos(rot) * p.i_sum - std::sin(rot) * p.q_sum;
}

}  // namespace

ReadoutCalibration calibrate_readout(const device::ReadoutPulse& pulse, std::int64_t window_samples,
                                     const device::QubitParams& p, double bias_volts) {
  device::ReadoutPulse clean = pulse;
  clean.noise_sigma_volts = 0.0;
  const auto adc = dsp::AdcModel::noiseless();
  ReadoutCalibration cal;
  cal.window_samples = window_samples > 0 ? window_samples : record_samples(pulse);
  const auto point = [&](const device::Bloch& b) {
    const auto rec = device::measure(b, clean, p, 0, bias_volts);
    const auto dig = dsp::adc_digitize(rec.i_volts, rec.q_volts, adc, 0);
    return demodulate(dig.stream, clean, cal.window_samples);
  };
  cal.ground = point(device::Bloch::ground());
  cal.excited = point(device::Bloch::excited());
  const double di = static_cast<double>(cal.excited.i_sum) - cal.ground.i_sum;
  const double dq = static_cast<double>(cal.excited.q_sum) - cal.ground.q_sum;
  if (di == 0.0 && dq == 0.0) throw Error("readout calibration: ground and excited responses coincide");
  cal.rotation_rad = -std::atan2(dq, di);
  cal.threshold = std::llround(0.5 * (rotate(cal.ground, cal.rotation_rad) + rotate(cal.excited, cal.rotation_rad)));
  return cal;
}

ReadoutShot read_out(const device::Bloch& state, const device::ReadoutPulse& pulse, const dsp::AdcModel& adc,
                     const ReadoutCalibration& cal, const device::QubitParams& p, double bias_volts,
                     std::uint64_t seed, Picoseconds start_ps) {
  ReadoutShot shot;
  shot.record = device::measure(state, pulse, p, derive_seed(seed, 1), bias_volts);
  const auto dig = dsp::adc_digitize(shot.record.i_volts, shot.record.q_volts, adc, derive_seed(seed, 2), start_ps);
  shot.point = demodulate(dig.stream, pulse, cal.window_samples);
  shot.decision = dsp::discriminate(shot.point, cal.rotation_rad, cal.threshold, start_ps);
  return shot;
}

double fixed_point_bin_phase(std::span<const std::int16_t> codes, std::size_t bin, double* magnitude) {
  const std::size_t n = codes.size();
  if (n == 0 || bin >= n) throw InvalidArgument("fixed_point_bin_phase: bin outside the capture");
  std::int64_t re = 0;
  std::int64_t im = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double ph = kTwoPi * static_cast<double>((bin * k) % n) / static_cast<double>(n);
    const auto c = static_cast<std::int64_t>(round_half_even(32767.0 * std::cos(ph)));
    const auto s = static_cast<std::int64_t>(round_half_even(32767.0 * std::sin(ph)));
    re += codes[k] * c;
    im -= codes[k] * s;
  }
  if (magnitude != nullptr) *magnitude = std::hypot(static_cast<double>(re), static_cast<double>(im)) / 32767.0;
  return std::atan2(static_cast<double>(im), static_cast<double>(re));
}

JitterHistogram run_jitter_histogram(const ExperimentConfig& cfg) {
  const auto& js = cfg.jitter;
  const std::size_t n = js.capture_samples;
  const double fs = dsp::kAdcSampleRateHz;
  const auto bin = static_cast<std::size_t>(std::llround(js.tone_hz * static_cast<double>(n) / fs));
  if (bin == 0 || 2 * bin >= n) throw InvalidArgument("jitter histogram: tone must lie strictly inside (0, fs/2)");
  // A full-scale tone yields 2048 * n / 2; below 1/128 of full scale the phase
  // estimate is dominated by quantization.
  const double min_magnitude = 16.0 * static_cast<double>(n) / 2.0;
  const Picoseconds period_ps = 4000;
  const auto ticks_per_shot = std::llround(js.interval_s * 1e12 / static_cast<double>(period_ps));

  JitterHistogram h;
  h.delays_ps.reserve(static_cast<std::size_t>(cfg.shots));
  std::vector<double> vi(n), vq(n);
  for (int s = 0; s < cfg.shots; ++s) {
    const auto err = timing::clock_errors(cfg.topology, s * ticks_per_shot, cfg.seed, period_ps);
    const double d0 = static_cast<double>(err.at(js.channels[0]) - err.at(js.daq)) * 1e-12;
    const double d1 = static_cast<double>(err.at(js.channels[1]) - err.at(js.daq)) * 1e-12;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / fs;
      vi[k] = js.amplitude_volts * std::cos(kTwoPi * (std::fmod(js.tone_hz * t, 1.0) - js.tone_hz * d0));
      vq[k] = js.amplitude_volts * std::cos(kTwoPi * (std::fmod(js.tone_hz * t, 1.0) - js.tone_hz * d1));
    }
    const auto dig = dsp::adc_digitize(vi, vq, cfg.adc, derive_seed(cfg.seed, 0x717E4ULL, static_cast<std::uint64_t>(s)));
    double m0 = 0.0;
    double m1 = 0.0;
    const double p0 = fixed_point_bin_phase(dig.stream.i_codes, bin, &m0);
    const double p1 = fixed_point_bin_phase(dig.stream.q_codes, bin, &m1);
    if (m0 < min_magnitude || m1 < min_magnitude) {
      throw Error("jitter histogram: tone amplitude too low for phase extraction");
    }
    const double dphi = std::remainder(p0 - p1, kTwoPi);
    h.delays_ps.push_back(-dphi / (kTwoPi * js.tone_hz) * 1e12);
  }
  const double count = static_cast<double>(h.delays_ps.size());
  h.mean_ps = std::accumulate(h.delays_ps.begin(), h.delays_ps.end(), 0.0) / count;
  double ss = 0.0;
  for (const double d : h.delays_ps) ss += (d - h.mean_ps) * (d - h.mean_ps);
  h.std_ps = h.delays_ps.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;

  const auto [lo_it, hi_it] = std::minmax_element(h.delays_ps.begin(), h.delays_ps.end());
  const double w = js.histogram_bin_ps;
  const auto lo = static_cast<std::int64_t>(std::floor(*lo_it / w + 0.5));
  const auto hi = static_cast<std::int64_t>(std::floor(*hi_it / w + 0.5));
  h.counts.assign(static_cast<std::size_t>(hi - lo + 1), 0);
  for (std::int64_t b = lo; b <= hi; ++b) h.bin_centers_ps.push_back(static_cast<double>(b) * w);
  for (const double d : h.delays_ps) {
    ++h.counts[static_cast<std::size_t>(static_cast<std::int64_t>(std::floor(d / w + 0.5)) - lo)];
  }
  return h;
}

namespace {

struct DrivePulses {
  std::vector<std::int16_t> pi_codes;
  std::vector<std::int16_t> half_pi_codes;
  double amplitude_per_code = 0.0;
};

DrivePulses prepare_drive(const ExperimentConfig& cfg) {
  awg::AwgEngine engine;
  engine.load_sequence(cfg.sequence);
  const awg::PulseEnvelope* env = nullptr;
  for (const auto& e : cfg.sequence.envelopes) {
    if (e.name == cfg.drive.pi_envelope) env = &e;
  }
  if (env == nullptr) throw InvalidArgument("undefined envelope '" + cfg.drive.pi_envelope + "'");
  const timing::TriggerEvent trig{2, 0, "AWG", "drive"};
  const auto len = static_cast<std::int64_t>(env->samples.size());
  const auto render = [&](double scale) {
    awg::PulseSequence seq{{*env}, {{env->name, 0, scale, "x"}}};
    return engine.render(engine.load_sequence(seq), trig, len).codes;
  };
  DrivePulses d;
  d.pi_codes = render(1.0);
  d.half_pi_codes = render(0.5);
  double area = 0.0;
  for (const auto c : d.pi_codes) area += c / static_cast<double>(awg::kDacMax);
  area *= 1.0 / awg::kDacSampleRateHz;
  if (area == 0.0) throw InvalidArgument("pi envelope has zero area");
  // Amplitude calibration: the rendered pi pulse rotates by exactly pi.
  d.amplitude_per_code = kPi / (cfg.device.rabi_rad_s_per_unit * area * awg::kDacMax);
  return d;
}

void append_pulse(std::vector<device::DriveSegment>& segs, const std::vector<std::int16_t>& codes, double per_code,
                  double frequency_hz) {
  for (const auto c : codes) segs.push_back({1.0 / awg::kDacSampleRateHz, c * per_code, 0.0, frequency_hz});
}

device::EvolveOptions evolve_options(const ExperimentConfig& cfg) {
  device::EvolveOptions opt;
  opt.bias_volts = cfg.drive.bias_volts;
  if (cfg.drive.use_bvg_noise) opt.bvg = &cfg.bvg;
  return opt;
}

Json ledger_json(const timing::LatencyLedger& ledger) {
  Json comps = Json::array();
  for (const auto& c : ledger.components()) {
    comps.push_back({{"name", c.name}, {"group", timing::to_string(c.group)}, {"duration_ps", c.duration_ps}});
  }
  const auto t = timing::feedback_latency(ledger);
  return {{"components", comps},
          {"total_ps", t.total_ps},
          {"electronics_ps", t.electronics_ps},
          {"readout_ps", t.readout_ps},
          {"control_pulse_ps", t.control_pulse_ps}};
}

struct PointStats {
  std::int64_t excited = 0;
  double mean_i = 0.0;
  double mean_q = 0.0;
};

// Shots at one sweep point; `prepare` returns the state right before readout.
template <typename Prepare>
PointStats run_point(const ExperimentConfig& cfg, const ReadoutCalibration& cal, const device::ReadoutPulse& pulse,
                     std::size_t point, Prepare&& prepare) {
  PointStats st;
  for (int s = 0; s < cfg.shots; ++s) {
    const std::uint64_t seed = derive_seed(cfg.seed, point, static_cast<std::uint64_t>(s));
    const device::Bloch state = prepare(seed);
    const auto shot = read_out(state, pulse, cfg.adc, cal, cfg.device, cfg.drive.bias_volts, seed);
    st.excited += shot.decision.state == dsp::QubitState::kExcited ? 1 : 0;
    st.mean_i += shot.point.i_sum;
    st.mean_q += shot.point.q_sum;
  }
  st.mean_i /= cfg.shots;
  st.mean_q /= cfg.shots;
  return st;
}

void add_fit(RunResult& r, const std::string& label, const std::function<fit::FitResult()>& f) {
  try {
    r.fits.push_back(f());
    if (!r.fits.back().converged) r.flag(label + " fit did not converge");
  } catch (const Error& e) {
    r.flag(label + " fit failed: " + e.what());
  }
}

void run_population_sweep(const ExperimentConfig& cfg, RunResult& r) {
  const auto drive = prepare_drive(cfg);
  const auto& pulse = cfg.readout.pulse;
  const auto cal = calibrate_readout(pulse, cfg.readout.window_samples, cfg.device, cfg.drive.bias_volts);
  const auto opt = evolve_options(cfg);
  const bool ramsey = cfg.kind == ExperimentKind::kRamsey;
  const double frame_hz = ramsey ? device::qubit_frequency(cfg.drive.bias_volts, cfg.device) + cfg.drive.detuning_hz : 0.0;

  Table t{"sweep", {"point", cfg.sweep->name, "shots", "excited", "p_excited", "mean_i", "mean_q"}, {}};
  std::vector<double> xs, ps;
  const auto values = cfg.sweep->values();
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double delay = values[k];
    std::vector<device::DriveSegment> segs;
    append_pulse(segs, ramsey ? drive.half_pi_codes : drive.pi_codes, drive.amplitude_per_code, frame_hz);
    if (delay > 0.0) segs.push_back({delay, 0.0, 0.0, frame_hz});
    if (ramsey) append_pulse(segs, drive.half_pi_codes, drive.amplitude_per_code, frame_hz);
    const auto st = run_point(cfg, cal, pulse, k, [&](std::uint64_t seed) {
      return device::evolve(device::Bloch::ground(), segs, cfg.device, derive_seed(seed, 0), opt);
    });
    const double p = static_cast<double>(st.excited) / cfg.shots;
    t.add_row({static_cast<std::int64_t>(k), delay, std::int64_t{cfg.shots}, st.excited, p, st.mean_i, st.mean_q});
    xs.push_back(delay);
    ps.push_back(p);
  }
  r.tables.push_back(std::move(t));
  if (ramsey) {
    add_fit(r, "ramsey", [&] { return fit::fit_decaying_cosine(xs, ps); });
    r.metrics["configured_t2_star_s"] = cfg.device.t2_star_s;
    r.metrics["configured_detuning_hz"] = cfg.drive.detuning_hz;
    if (!r.fits.empty()) {
      r.metrics["t2_star_s"] = r.fits.back().get("T");
      r.metrics["fringe_hz"] = std::abs(r.fits.back().get("f"));
    }
  } else {
    add_fit(r, "t1", [&] { return fit::fit_exponential(xs, ps); });
    r.metrics["configured_t1_s"] = cfg.device.t1_s;
    if (!r.fits.empty()) r.metrics["t1_s"] = r.fits.back().get("T");
  }
}

void run_one_tone(const ExperimentConfig& cfg, RunResult& r) {
  device::ReadoutPulse pulse = cfg.readout.pulse;
  const auto cal = calibrate_readout(pulse, cfg.readout.window_samples, cfg.device, cfg.drive.bias_volts);
  Table t{"sweep", {"point", "probe_hz", "shots", "mean_i", "mean_q", "magnitude", "phase_rad"}, {}};
  const auto values = cfg.sweep->values();
  double best_mag = INFINITY;
  double dip = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    pulse.probe_hz = values[k];
    const auto st = run_point(cfg, cal, pulse, k, [](std::uint64_t) { return device::Bloch::ground(); });
    const double mag = std::hypot(st.mean_i, st.mean_q);
    t.add_row({static_cast<std::int64_t>(k), values[k], std::int64_t{cfg.shots}, st.mean_i, st.mean_q, mag,
               std::atan2(st.mean_q, st.mean_i)});
    if (mag < best_mag) {
      best_mag = mag;
      dip = values[k];
    }
  }
  r.tables.push_back(std::move(t));
  r.metrics["dip_hz"] = dip;
  r.metrics["expected_dip_hz"] = device::resonator_frequency(0, cfg.device, cfg.drive.bias_volts);
}

void run_two_tone(const ExperimentConfig& cfg, RunResult& r) {
  const auto& pulse = cfg.readout.pulse;
  const auto cal = calibrate_readout(pulse, cfg.readout.window_samples, cfg.device, cfg.drive.bias_volts);
  const auto opt = evolve_options(cfg);
  Table t{"sweep", {"point", "drive_hz", "shots", "excited", "p_excited"}, {}};
  const auto values = cfg.sweep->values();
  double best = -1.0;
  double peak = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::vector<device::DriveSegment> segs{
        {cfg.drive.saturation_duration_s, cfg.drive.saturation_amplitude, 0.0, values[k]}};
    const auto st = run_point(cfg, cal, pulse, k, [&](std::uint64_t seed) {
      return device::evolve(device::Bloch::ground(), segs, cfg.device, derive_seed(seed, 0), opt);
    });
    const double p = static_cast<double>(st.excited) / cfg.shots;
    t.add_row({static_cast<std::int64_t>(k), values[k], std::int64_t{cfg.shots}, st.excited, p});
    if (p > best) {
      best = p;
      peak = values[k];
    }
  }
  r.tables.push_back(std::move(t));
  r.metrics["peak_hz"] = peak;
  r.metrics["qubit_frequency_hz"] = device::qubit_frequency(cfg.drive.bias_volts, cfg.device);
}

void run_jitter(const ExperimentConfig& cfg, RunResult& r) {
  const auto h = run_jitter_histogram(cfg);
  Table shots{"shots", {"shot", "delay_ps"}, {}};
  for (std::size_t k = 0; k < h.delays_ps.size(); ++k) shots.add_row({static_cast<std::int64_t>(k), h.delays_ps[k]});
  Table hist{"histogram", {"bin_center_ps", "count"}, {}};
  for (std::size_t k = 0; k < h.counts.size(); ++k) hist.add_row({h.bin_centers_ps[k], h.counts[k]});
  r.tables.push_back(std::move(hist));
  r.tables.push_back(std::move(shots));
  r.metrics["mean_ps"] = h.mean_ps;
  r.metrics["std_ps"] = h.std_ps;
  r.metrics["shots"] = h.delays_ps.size();
}

void run_feedback(const ExperimentConfig& cfg, RunResult& r) {
  const auto fb = run_feedback_latency(cfg);
  Table t{"timeline", {"event", "t_ps", "component", "group", "step_ps"}, {}};
  for (const auto& e : fb.timeline) {
    t.add_row({e.name, e.t_ps, e.component, std::string(timing::to_string(e.group)), e.step_ps});
  }
  r.tables.push_back(std::move(t));
  r.metrics["input_state"] = dsp::to_string(cfg.feedback.input_state);
  r.metrics["decided_state"] = dsp::to_string(fb.decided);
  r.metrics["outcome"] = fb.feedback_issued ? "feedback" : "no feedback";
  r.metrics["measured_ps"] = fb.measured_ps;
  r.metrics["measured_electronics_ps"] = fb.measured_electronics_ps;
  r.metrics["measured_readout_ps"] = fb.measured_readout_ps;
  r.metrics["measured_control_pulse_ps"] = fb.measured_control_pulse_ps;
}

void run_mixer(const ExperimentConfig& cfg, RunResult& r) {
  Table t{"leakage", {"stage", "lo_dbc", "image_dbc"}, {}};
  const auto row = [&](const std::string& stage, const awg::LeakageReport& l) { t.add_row({stage, l.lo_dbc, l.image_dbc}); };
  row("uncorrected", awg::measure_leakage(cfg.mixer, {}));
  row("analytic", awg::measure_leakage(cfg.mixer, awg::analytic_correction(cfg.mixer)));
  awg::PrecompensationResult res;
  try {
    res = awg::precompensate(cfg.mixer);
  } catch (const awg::PrecompensationFailed& e) {
    res = e.best();
    r.flag(e.what());
  }
  row("precompensated", res.leakage);
  awg::MixerParams ideal;
  ideal.lo_frequency_hz = cfg.mixer.lo_frequency_hz;
  row("ideal", awg::measure_leakage(ideal, {}));
  r.tables.push_back(std::move(t));
  r.metrics["correction"] = {{"offset_i", res.correction.offset_i},
                             {"offset_q", res.correction.offset_q},
                             {"gain", res.correction.gain},
                             {"phase", res.correction.phase}};
  r.metrics["iterations"] = res.iterations;
  r.metrics["lo_dbc"] = res.leakage.lo_dbc;
  r.metrics["image_dbc"] = res.leakage.image_dbc;
}

void run_selftest(const ExperimentConfig& cfg, RunResult& r) {
  Table t{"streams", {"stream", "length", "exact_unit", "exact_q15"}, {}};
  std::int64_t bad_unit = 0;
  std::int64_t bad_q15 = 0;
  for (int s = 0; s < cfg.shots; ++s) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(s)));
    std::uniform_int_distribution<int> len(1, 4096);
    std::uniform_int_distribution<int> code(dsp::kAdcMin, dsp::kAdcMax);
    dsp::IQSampleStream st;
    const auto n = static_cast<std::size_t>(len(rng));
    for (std::size_t k = 0; k < n; ++k) {
      st.i_codes.push_back(static_cast<std::int16_t>(code(rng)));
      st.q_codes.push_back(static_cast<std::int16_t>(code(rng)));
    }
    const auto fast = dsp::digital_mix_fast(st);
    const auto unit = dsp::digital_mix_general(st, dsp::kFastPathIfHz, dsp::TrigPrecision::kUnit);
    const auto q15 = dsp::digital_mix_general(st, dsp::kFastPathIfHz, dsp::TrigPrecision::kQ15);
    const bool eu = fast.i == unit.i && fast.q == unit.q;
    const bool eq = fast.i == q15.i && fast.q == q15.q;
    bad_unit += eu ? 0 : 1;
    bad_q15 += eq ? 0 : 1;
    t.add_row({std::int64_t{s}, static_cast<std::int64_t>(n), std::int64_t{eu}, std::int64_t{eq}});
  }
  r.tables.push_back(std::move(t));
  dsp::IQSampleStream ex;
  ex.i_codes = {100, 100, 100, 100};
  ex.q_codes = {0, 0, 0, 0};
  const auto m = dsp::digital_mix_fast(ex);
  const bool worked = m.i == std::vector<std::int32_t>{100, 0, -100, 0} && m.q == std::vector<std::int32_t>{0, -100, 0, 100};
  r.metrics["streams"] = cfg.shots;
  r.metrics["mismatches_unit"] = bad_unit;
  r.metrics["mismatches_q15"] = bad_q15;
  r.metrics["worked_example_ok"] = worked;
  if (bad_unit != 0 || bad_q15 != 0 || !worked) r.flag("fast path differs from the general path");
}

}  // namespace

RunResult run(const ExperimentConfig& cfg) {
  RunResult r;
  r.kind = cfg.kind;
  r.seed = cfg.seed;
  r.config_hash = cfg.hash;
  r.tool_version = tool_version();
  r.normalized_config = cfg.normalized;
  r.ledger = ledger_json(cfg.ledger);
  switch (cfg.kind) {
    case ExperimentKind::kOneTone: run_one_tone(cfg, r); break;
    case ExperimentKind::kTwoTone: run_two_tone(cfg, r); break;
    case ExperimentKind::kT1:
    case ExperimentKind::kRamsey: run_population_sweep(cfg, r); break;
    case ExperimentKind::kJitterHistogram: run_jitter(cfg, r); break;
    case ExperimentKind::kFeedbackLatency: run_feedback(cfg, r); break;
    case ExperimentKind::kMixerCalibration: run_mixer(cfg, r); break;
    case ExperimentKind::kBudgetSweep: r.tables.push_back(budget_table(cfg.budget, *cfg.sweep)); break;
    case ExperimentKind::kDemodSelftest: run_selftest(cfg, r); break;
  }
  return r;
}

}  // namespace qctl::orchestrator
