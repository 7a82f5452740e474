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

// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failing criteria (0 when all pass).

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qctl/config.hpp"
#include "qctl/dsp_demod.hpp"
#include "qctl/experiments.hpp"
#include "qctl/fidelity_budget.hpp"
#include "qctl/mixer.hpp"
#include "qctl/timing_fabric.hpp"

namespace {

using namespace qctl;
using orchestrator::ExperimentConfig;
using orchestrator::Json;
using Complex = std::complex<double>;

struct Outcome {
  bool ok = true;
  std::string detail;

  void check(bool cond, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
    if (!cond) {
      ok = false;
      detail += " [x]";
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ExperimentConfig make(const std::string& json) {
  const auto r = orchestrator::validate_config(Json::parse(json));
  if (!r.ok()) throw Error("config: " + r.errors.front().path + " " + r.errors.front().message);
  return *r.config;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome demod_exactness() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = orchestrator::run(make(R"({"experiment":"demod_selftest","seed":1,"shots":10000})"));
  const double dt = seconds_since(t0);
  o.check(r.metrics.at("mismatches_unit") == 0 && r.metrics.at("mismatches_q15") == 0,
          "10000 streams, mismatches " + r.metrics.at("mismatches_unit").dump() + "/" + r.metrics.at("mismatches_q15").dump());
  o.check(r.metrics.at("worked_example_ok").get<bool>(), "worked example");
  o.check(dt < 10.0, fmt("%.2f s < 10 s", dt));
  return o;
}

Outcome fidelity_numbers() {
  using namespace fidelity;
  Outcome o;
  const double f = gate_fidelity(rotation_unitary(kPi, 0.00387), rotation_unitary(kPi, 0.0));
  o.check(std::abs(f - 0.99999) <= 1e-6, fmt("F(0.00387 rad) = %.8f", f));
  const double j = jitter_for_fidelity(0.99999, 100e6) * 1e12;
  o.check(std::abs(j - 6.2) <= 0.05, fmt("jitter %.4f ps", j));
  const double dv = bias_precision(BiasBudget{}) * 1e6;
  o.check(std::abs(dv - 10.34) <= 0.01, fmt("dV %.4f uV", dv));
  return o;
}

Outcome spurious_drive() {
  using namespace fidelity;
  Outcome o;
  const auto spec = SpuriousDriveSpec::from_sfdr_dbc(-40.0);
  const double w = spurious_fidelity_worst_case(spec).fidelity;
  o.check(w >= 0.99997 && w <= 0.999995, fmt("worst case %.7f", w));
  bool mono = true;
  double prev = 1.0;
  for (int k = 0; k < 20; ++k) {
    const double v = spurious_fidelity_worst_case(SpuriousDriveSpec::from_sfdr_dbc(-80.0 + 3.0 * k)).fidelity;
    mono = mono && v <= prev + 1e-15;
    prev = v;
  }
  o.check(mono, "monotone over 20 m values");
  const double c = spurious_fidelity(spec);
  o.check(c > 1.0 - 1e-8, fmt("commensurate %.11f", c));
  return o;
}

Outcome feedback_latency() {
  Outcome o;
  auto cfg = make(R"({"experiment":"feedback_latency","seed":3})");
  const auto fb = orchestrator::run_feedback_latency(cfg);
  o.check(fb.feedback_issued && fb.measured_electronics_ps == 125000,
          "electronics " + std::to_string(fb.measured_electronics_ps) + " ps");
  const auto* awg = cfg.ledger.find("awg_dsp");
  const auto* daq = cfg.ledger.find("daq_dsp");
  o.check(awg && awg->duration_ps == 16000 && daq && daq->duration_ps == 20000, "AWG 16 ns, DAQ 20 ns");
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> ns(0, 80), ro(16, 96);
  int agree = 0;
  for (int c = 0; c < 1000; ++c) {
    std::vector<timing::LatencyComponent> comps;
    const auto defaults = timing::default_ledger();
    for (auto comp : defaults.components()) {
      if (comp.name == "readout_window") {
        comp.duration_ps = 1000LL * ro(rng);
      } else if (!comp.stages.empty()) {
        comp.duration_ps = 0;
        for (auto& s : comp.stages) comp.duration_ps += (s.duration_ps = 1000LL * ns(rng) + ns(rng));
      } else {
        comp.duration_ps = 1000LL * ns(rng) + ns(rng);
      }
      comps.push_back(comp);
    }
    cfg.ledger = timing::LatencyLedger(comps);
    cfg.seed = static_cast<std::uint64_t>(c);
    const auto run = orchestrator::run_feedback_latency(cfg);
    const auto want = timing::feedback_latency(cfg.ledger);
    agree += run.feedback_issued && run.measured_ps == want.total_ps && run.measured_electronics_ps == want.electronics_ps &&
             run.measured_readout_ps == want.readout_ps && run.measured_control_pulse_ps == want.control_pulse_ps;
  }
  o.check(agree == 1000, std::to_string(agree) + "/1000 randomized ledgers");
  return o;
}

Outcome jitter_recovery() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = make(R"({"experiment":"jitter_histogram","seed":5,"shots":5000})");
  cfg.topology = orchestrator::default_topology(5.0);
  const auto h = orchestrator::run_jitter_histogram(cfg);
  cfg.topology = orchestrator::default_topology(0.0);
  const auto z = orchestrator::run_jitter_histogram(cfg);
  const double dt = seconds_since(t0);
  o.check(std::abs(h.std_ps - 5.0) <= 0.5, fmt("5 ps -> %.3f ps", h.std_ps));
  o.check(z.std_ps < 0.1, fmt("0 ps -> %.4f ps", z.std_ps));
  o.check(dt < 60.0, fmt("%.1f s < 60 s", dt));
  return o;
}

Outcome qubit_experiments() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto t1 = orchestrator::run(make(R"({"experiment":"t1","seed":7})"));
  const auto ra = orchestrator::run(make(R"({"experiment":"ramsey","seed":7})"));
  const double dt = seconds_since(t0);
  const auto get = [](const orchestrator::RunResult& r, const char* k) {
    return r.metrics.contains(k) ? r.metrics.at(k).get<double>() : std::nan("");
  };
  const double t1v = get(t1, "t1_s");
  const double t2v = get(ra, "t2_star_s");
  const double fr = get(ra, "fringe_hz");
  const double det = get(ra, "configured_detuning_hz");
  o.check(std::abs(t1v / 90e-6 - 1.0) <= 0.05, fmt("T1 %.2f us", t1v * 1e6));
  o.check(std::abs(t2v / 19e-6 - 1.0) <= 0.05, fmt("T2* %.2f us", t2v * 1e6));
  o.check(std::abs(fr / det - 1.0) <= 0.01, fmt("fringe %.1f Hz", fr) + fmt(" vs %.1f Hz", det));
  o.check(dt < 300.0, fmt("%.1f s < 300 s", dt));
  return o;
}

Outcome mixer_calibration() {
  Outcome o;
  const auto r = orchestrator::run(make(
      R"({"experiment":"mixer_calibration","seed":1,
          "mixer":{"dc_offset_i":0.003,"dc_offset_q":0.003,"gain_imbalance":0.02,"phase_skew_rad":0.02}})"));
  const double lo = r.metrics.at("lo_dbc");
  const double im = r.metrics.at("image_dbc");
  o.check(!r.flagged && lo <= -50.0 && im <= -50.0, fmt("LO %.1f dBc", lo) + fmt(", image %.1f dBc", im));
  const auto ideal = awg::measure_leakage(awg::MixerParams{}, {});
  o.check(ideal.lo_dbc < -120.0 && ideal.image_dbc < -120.0,
          fmt("ideal LO %.0f", ideal.lo_dbc) + fmt(" image %.0f dBc", ideal.image_dbc));
  return o;
}

std::vector<double> tone(std::size_t n, std::size_t bin, double amp) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = amp * std::cos(kTwoPi * static_cast<double>((bin * k) % n) / static_cast<double>(n) + 0.3);
  }
  return v;
}

Outcome adc_metrics() {
  Outcome o;
  const std::size_t n = 4096;
  const auto v = tone(n, 1631, 0.999);  // 398.2 MHz at 1 GS/s
  const std::vector<double> zero(n, 0.0);
  const auto noisy = dsp::adc_digitize(v, zero, dsp::AdcModel{}, 5);
  const auto m = dsp::spectrum_metrics(std::vector<double>(noisy.stream.i_codes.begin(), noisy.stream.i_codes.end()));
  o.check(std::abs(m.snr_db - 57.1) <= 0.5, fmt("SNR %.2f dB", m.snr_db));
  o.check(std::abs(m.enob_bits - 9.2) <= 0.1, fmt("ENOB %.2f", m.enob_bits));
  const auto clean = dsp::adc_digitize(v, zero, dsp::AdcModel::noiseless(), 5);
  const auto q = dsp::spectrum_metrics(std::vector<double>(clean.stream.i_codes.begin(), clean.stream.i_codes.end()));
  o.check(std::abs(q.enob_bits - 12.0) <= 0.2, fmt("noiseless ENOB %.2f", q.enob_bits));
  return o;
}

Outcome pll_determinism() {
  Outcome o;
  std::set<Picoseconds> one;
  for (std::uint64_t s = 0; s < 1000; ++s) one.insert(timing::pll_lock({1, true, 25e6, 2e9}, s));
  o.check(one.size() == 1, "R1=1: " + std::to_string(one.size()) + " phase");
  for (int n = 2; n <= 4; ++n) {
    std::set<Picoseconds> seen;
    for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(timing::pll_lock({n, true, 25e6, 2e9}, s));
    o.check(seen.size() == static_cast<std::size_t>(n), "R1=" + std::to_string(n) + ": " + std::to_string(seen.size()));
  }
  return o;
}

dsp::IQSampleStream tones(const std::vector<double>& freqs, const std::vector<Complex>& amps, std::size_t n) {
  std::vector<double> vi(n, 0.0), vq(n, 0.0);
  for (std::size_t c = 0; c < freqs.size(); ++c) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto v = amps[c] * std::polar(1.0, kTwoPi * freqs[c] * static_cast<double>(k) / 1e9);
      vi[k] += v.real();
      vq[k] += v.imag();
    }
  }
  dsp::IQSampleStream s;
  for (std::size_t k = 0; k < n; ++k) {
    s.i_codes.push_back(static_cast<std::int16_t>(round_half_even(vi[k])));
    s.q_codes.push_back(static_cast<std::int16_t>(round_half_even(vq[k])));
  }
  return s;
}

Outcome multi_channel() {
  Outcome o;
  constexpr std::int64_t w = 1024;
  const double bin = 1e9 / static_cast<double>(w);
  std::vector<double> f;
  for (int k = 0; k < 8; ++k) f.push_back(250e6 + (k - 4) * 24.0 * bin + 5 * bin);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> amp(50.0, 200.0), ph(-kPi, kPi);
  std::vector<Complex> a;
  for (std::size_t c = 0; c < f.size(); ++c) a.push_back(std::polar(amp(rng), ph(rng)));
  const auto s = tones(f, a, w);
  const auto dec = dsp::multi_channel_demod(s, f, w);
  const auto full = dsp::full_rate_demod(s, f, w);
  double err = 0.0, ref = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c) {
    err += std::norm(dec[c] - full[c]);
    ref += std::norm(full[c]);
  }
  const double rms = std::sqrt(err / ref);
  o.check(rms < 0.01, fmt("RMS error %.2e", rms));

  double worst = 1e9;
  for (std::size_t on = 0; on < f.size(); ++on) {
    std::vector<Complex> single(f.size(), 0.0);
    single[on] = 800.0;
    const auto out = dsp::multi_channel_demod(tones(f, single, w), f, w);
    for (std::size_t c = 0; c < f.size(); ++c) {
      if (c != on) worst = std::min(worst, 20.0 * std::log10(std::abs(out[on]) / std::max(std::abs(out[c]), 1e-12)));
    }
  }
  o.check(worst >= 40.0, fmt("isolation %.1f dB", worst));

  constexpr int reps = 24;
  bool circles = true;
  std::vector<std::vector<Complex>> traces(f.size());
  for (int r = 0; r < reps; ++r) {
    std::vector<Complex> rot;
    for (std::size_t c = 0; c < f.size(); ++c) rot.push_back(std::polar(150.0, kTwoPi * r / reps + 0.4 * static_cast<double>(c)));
    const auto out = dsp::multi_channel_demod(tones(f, rot, w), f, w);
    for (std::size_t c = 0; c < f.size(); ++c) traces[c].push_back(out[c]);
  }
  for (const auto& t : traces) {
    for (std::size_t r = 1; r < t.size(); ++r) {
      const double step = std::remainder(std::arg(t[r]) - std::arg(t[r - 1]), kTwoPi);
      circles = circles && step > 0.0 && std::abs(std::abs(t[r]) / std::abs(t[0]) - 1.0) < 0.01;
    }
  }
  o.check(circles, "rotating phase traces circles");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"demod fast path exactness", demod_exactness},
      {"fidelity numbers", fidelity_numbers},
      {"spurious drive worst case", spurious_drive},
      {"feedback latency", feedback_latency},
      {"jitter recovery", jitter_recovery},
      {"qubit experiments", qubit_experiments},
      {"mixer calibration", mixer_calibration},
      {"adc metrics", adc_metrics},
      {"pll determinism", pll_determinism},
      {"multi-channel demod", multi_channel},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.ok ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.ok ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
