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

#include <cmath>
#include <map>

#include "qctl/experiments.hpp"

namespace qctl::orchestrator {

namespace {

const std::map<std::string, std::string>& milestone_names() {
  static const std::map<std::string, std::string> names{
      {"analog_cabling", "adc_input"},
      {"adc_conversion", "adc_first_sample"},
      {"readout_window", "readout_complete"},
      {"daq_dsp", "discrimination"},
      {"daq_dsp.mixer", "mixer_out"},
      {"daq_dsp.accumulator", "accumulator_out"},
      {"daq_dsp.discriminator", "discrimination"},
      {"trigger_transport", "fb_trigger_at_awg"},
      {"awg_dsp", "awg_dsp_out"},
      {"dac_conversion", "fb_pulse_start"},
      {"feedback_pulse", "fb_pulse_end"},
  };
  return names;
}

std::string milestone(const std::string& key) {
  const auto& names = milestone_names();
  const auto it = names.find(key);
  return it != names.end() ? it->second : key + "_done";
}

// Index of the component after which the discrimination result is known.
std::ptrdiff_t decision_index(const std::vector<timing::LatencyComponent>& comps) {
  std::ptrdiff_t last_readout = -1;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    if (comps[k].name == "daq_dsp") return static_cast<std::ptrdiff_t>(k);
    if (comps[k].group == timing::LatencyGroup::kReadout) last_readout = static_cast<std::ptrdiff_t>(k);
  }
  return last_readout;
}

}  // namespace

FeedbackRun run_feedback_latency(const ExperimentConfig& cfg) {
  FeedbackRun run;
  const auto& comps = cfg.ledger.components();
  run.ledger_totals = timing::feedback_latency(cfg.ledger);

  device::ReadoutPulse pulse = cfg.readout.pulse;
  const auto* window = cfg.ledger.find("readout_window");
  const Picoseconds window_ps = window != nullptr && window->duration_ps > 0 ? window->duration_ps : timing::kReadoutWindowPs;
  pulse.duration_s = static_cast<double>(window_ps) * 1e-12;
  const auto samples = static_cast<std::int64_t>(std::llround(pulse.duration_s * pulse.sample_rate_hz));
  const double bias = cfg.drive.bias_volts;
  const auto cal = calibrate_readout(pulse, samples, cfg.device, bias);
  const device::Bloch input =
      cfg.feedback.input_state == dsp::QubitState::kExcited ? device::Bloch::excited() : device::Bloch::ground();
  const auto shot = read_out(input, pulse, cfg.adc, cal, cfg.device, bias, derive_seed(cfg.seed, 0));
  run.decided = shot.decision.state;

  Picoseconds t = 0;
  const auto emit = [&](const std::string& name, const std::string& component, timing::LatencyGroup group,
                        Picoseconds step) {
    t += step;
    run.timeline.push_back({name, t, component, group, step});
  };
  emit("measurement_pulse_start", "", timing::LatencyGroup::kElectronics, 0);

  const std::ptrdiff_t gate = decision_index(comps);
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const auto& c = comps[k];
    if (c.stages.empty()) {
      emit(milestone(c.name), c.name, c.group, c.duration_ps);
    } else {
      for (const auto& s : c.stages) emit(milestone(c.name + "." + s.name), c.name, c.group, s.duration_ps);
    }
    if (static_cast<std::ptrdiff_t>(k) != gate) continue;
    const auto d = dsp::discriminate(shot.point, cal.rotation_rad, cal.threshold, t);
    run.decided = d.state;
    if (!d.feedback) break;
    run.triggers.push_back(*d.feedback);
    run.feedback_issued = true;
    emit("fb_trigger", c.name, c.group, 0);
  }
  if (gate < 0) run.feedback_issued = true;

  run.measured_ps = run.timeline.back().t_ps - run.timeline.front().t_ps;
  for (const auto& e : run.timeline) {
    switch (e.group) {
      case timing::LatencyGroup::kElectronics: run.measured_electronics_ps += e.step_ps; break;
      case timing::LatencyGroup::kReadout: run.measured_readout_ps += e.step_ps; break;
      case timing::LatencyGroup::kControlPulse: run.measured_control_pulse_ps += e.step_ps; break;
    }
  }
  return run;
}

}  // namespace qctl::orchestrator
