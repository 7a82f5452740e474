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

#include "qctl/timing_fabric.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <tuple>
#include <unordered_map>

namespace qctl::timing {

void ClockTopology::validate() const {
  std::set<std::string> ids;
  for (const auto& n : nodes) {
    if (n.id.empty()) throw InvalidArgument("clock topology: empty node id");
    if (!ids.insert(n.id).second) throw InvalidArgument("clock topology: duplicate node '" + n.id + "'");
  }
  if (!ids.contains(root)) throw InvalidArgument("clock topology: root '" + root + "' is not a node");

  std::map<std::string, std::string> parent_of;
  for (const auto& e : edges) {
    if (!ids.contains(e.parent)) throw InvalidArgument("clock topology: edge from unknown node '" + e.parent + "'");
    if (!ids.contains(e.child)) throw InvalidArgument("clock topology: edge to unknown node '" + e.child + "'");
    if (!(e.jitter_sigma_ps >= 0.0) || !std::isfinite(e.jitter_sigma_ps)) {
      throw InvalidArgument("clock topology: edge " + e.parent + "->" + e.child + " has invalid jitter sigma");
    }
    if (e.child == root) throw InvalidArgument("clock topology: root '" + root + "' has a parent");
    if (!parent_of.emplace(e.child, e.parent).second) {
      throw InvalidArgument("clock topology: node '" + e.child + "' has more than one parent");
    }
  }

  std::set<std::string> reached{root};
  std::deque<std::string> frontier{root};
  while (!frontier.empty()) {
    const std::string cur = frontier.front();
    frontier.pop_front();
    for (const auto& e : edges) {
      if (e.parent == cur && reached.insert(e.child).second) frontier.push_back(e.child);
    }
  }
  for (const auto& n : nodes) {
    if (!reached.contains(n.id)) throw InvalidArgument("clock topology: node '" + n.id + "' is unreachable from root");
  }
}

ClockTopology star_topology(const std::string& root, const std::vector<std::string>& leaves,
                            Picoseconds skew_ps, double jitter_sigma_ps) {
  ClockTopology t;
  t.root = root;
  t.nodes.push_back({root, "chassis0"});
  for (const auto& leaf : leaves) {
    t.nodes.push_back({leaf, "chassis0"});
    t.edges.push_back({root, leaf, skew_ps, jitter_sigma_ps});
  }
  return t;
}

namespace {

bool is_integer_ratio(double a, double b) {
  const double r = a / b;
  return r >= 1.0 && std::abs(r - std::round(r)) <= 1e-9 * r;
}

Picoseconds period_ps(double hz) { return static_cast<Picoseconds>(std::llround(1e12 / hz)); }

}  // namespace

Picoseconds pll_lock(const PllConfig& config, std::uint64_t power_cycle_seed) {
  if (config.r1_divider <= 0) throw InvalidArgument("pll: r1_divider must be positive");
  if (!(config.input_frequency_hz > 0.0) || !(config.output_frequency_hz > 0.0)) {
    throw InvalidArgument("pll: frequencies must be positive");
  }
  const double fin = config.input_frequency_hz;
  const double fout = config.output_frequency_hz;
  const bool multiply = is_integer_ratio(fout, fin);
  const bool divide = is_integer_ratio(fin, fout);
  if (!multiply && !divide) throw InvalidArgument("pll: output is not an integer multiple or fraction of input");

  Rng rng(derive_seed(power_cycle_seed, 0x504c4cULL));
  const Picoseconds t_in = period_ps(fin);
  Picoseconds phase = 0;

  const int n = config.r1_divider;
  if (n > 1) {
    std::uniform_int_distribution<int> start_state(0, n - 1);
    const int k = start_state(rng);
    phase += static_cast<Picoseconds>(std::llround(static_cast<double>(t_in) * k / n));
  }
  if (!config.zero_delay) {
    if (multiply) {
      const auto m = static_cast<int>(std::llround(fout / fin));
      std::uniform_int_distribution<int> fb_state(0, m - 1);
      phase += fb_state(rng) * period_ps(fout);
    } else {
      const auto d = static_cast<int>(std::llround(fin / fout));
      std::uniform_int_distribution<int> out_state(0, d - 1);
      phase += out_state(rng) * t_in;
    }
  }
  return phase;
}

std::map<std::string, Picoseconds> distribute_clock(const ClockTopology& topology,
                                                    std::int64_t tick_index, std::uint64_t seed,
                                                    Picoseconds period_ps) {
  topology.validate();
  std::map<std::string, Picoseconds> stamp;
  stamp[topology.root] = tick_index * period_ps;

  std::unordered_map<std::string, std::vector<std::size_t>> children;
  for (std::size_t i = 0; i < topology.edges.size(); ++i) children[topology.edges[i].parent].push_back(i);

  std::deque<std::string> frontier{topology.root};
  while (!frontier.empty()) {
    const std::string cur = frontier.front();
    frontier.pop_front();
    for (const std::size_t ei : children[cur]) {
      const ClockEdge& e = topology.edges[ei];
      Picoseconds jitter = 0;
      if (e.jitter_sigma_ps > 0.0) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(tick_index), ei));
        std::normal_distribution<double> gauss(0.0, e.jitter_sigma_ps);
        jitter = static_cast<Picoseconds>(std::llround(gauss(rng)));
      }
      stamp[e.child] = stamp[cur] + e.skew_ps + jitter;
      frontier.push_back(e.child);
    }
  }
  return stamp;
}

std::map<std::string, Picoseconds> clock_errors(const ClockTopology& topology,
                                                std::int64_t tick_index, std::uint64_t seed,
                                                Picoseconds period_ps) {
  auto stamps = distribute_clock(topology, tick_index, seed, period_ps);
  for (auto& [id, t] : stamps) t -= tick_index * period_ps;
  return stamps;
}

void validate(const TriggerEvent& event) {
  if (event.level != 1 && event.level != 2) throw InvalidArgument("trigger: level must be 1 or 2");
  if (event.timestamp_ps < 0) throw InvalidArgument("trigger: negative timestamp");
}

std::vector<TriggerEvent> issue_trigger(Picoseconds level1_time_ps,
                                        const std::vector<ModuleSchedule>& schedules,
                                        const std::map<std::string, Picoseconds>& clock_error_ps,
                                        const std::string& level1_source) {
  std::vector<TriggerEvent> events;
  events.push_back({1, level1_time_ps, level1_source, "level1"});
  for (const auto& sched : schedules) {
    const auto it = clock_error_ps.find(sched.module);
    const Picoseconds err = it == clock_error_ps.end() ? 0 : it->second;
    for (const auto& trig : sched.triggers) {
      if (trig.offset_ps < 0) throw InvalidArgument("trigger: negative offset for module '" + sched.module + "'");
      events.push_back({2, level1_time_ps + trig.offset_ps + err, sched.module, trig.tag});
    }
  }
  for (const auto& e : events) validate(e);
  std::stable_sort(events.begin(), events.end(), [](const TriggerEvent& a, const TriggerEvent& b) {
    return std::tie(a.timestamp_ps, a.source, a.tag) < std::tie(b.timestamp_ps, b.source, b.tag);
  });
  return events;
}

const char* to_string(LatencyGroup group) {
  switch (group) {
    case LatencyGroup::kElectronics: return "electronics";
    case LatencyGroup::kReadout: return "readout";
    case LatencyGroup::kControlPulse: return "control_pulse";
  }
  return "?";
}

std::optional<LatencyGroup> latency_group_from_string(const std::string& s) {
  if (s == "electronics") return LatencyGroup::kElectronics;
  if (s == "readout") return LatencyGroup::kReadout;
  if (s == "control_pulse") return LatencyGroup::kControlPulse;
  return std::nullopt;
}

LatencyLedger::LatencyLedger(std::vector<LatencyComponent> components) {
  for (auto& c : components) add(std::move(c));
}

void LatencyLedger::add(LatencyComponent component) {
  if (component.duration_ps < 0) throw InvalidArgument("ledger: negative duration for '" + component.name + "'");
  if (!component.stages.empty()) {
    Picoseconds sum = 0;
    for (const auto& s : component.stages) sum += s.duration_ps;
    if (sum != component.duration_ps) {
      throw InvalidArgument("ledger: stages of '" + component.name + "' do not sum to its duration");
    }
  }
  components_.push_back(std::move(component));
}

const LatencyComponent* LatencyLedger::find(const std::string& name) const {
  for (const auto& c : components_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

FeedbackLatency feedback_latency(const LatencyLedger& ledger) {
  FeedbackLatency out;
  for (const auto& c : ledger.components()) {
    out.total_ps += c.duration_ps;
    switch (c.group) {
      case LatencyGroup::kElectronics: out.electronics_ps += c.duration_ps; break;
      case LatencyGroup::kReadout: out.readout_ps += c.duration_ps; break;
      case LatencyGroup::kControlPulse: out.control_pulse_ps += c.duration_ps; break;
    }
  }
  return out;
}

LatencyLedger default_ledger() {
  using G = LatencyGroup;
  return LatencyLedger({
      {"analog_cabling", G::kElectronics, kAnalogCablingPs, {}},
      {"adc_conversion", G::kElectronics, kAdcConversionPs, {}},
      {"readout_window", G::kReadout, kReadoutWindowPs, {}},
      {"daq_dsp", G::kElectronics, kDaqDspLatencyPs,
       {{"mixer", 4000}, {"accumulator", 12000}, {"discriminator", 4000}}},
      {"trigger_transport", G::kElectronics, kTriggerTransportPs, {}},
      {"awg_dsp", G::kElectronics, kAwgDspLatencyPs, {}},
      {"dac_conversion", G::kElectronics, kDacConversionPs, {}},
      {"feedback_pulse", G::kControlPulse, kFeedbackPulsePs, {}},
  });
}

}  // namespace qctl::timing
