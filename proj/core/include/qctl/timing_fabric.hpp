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

#ifndef QCTL_TIMING_FABRIC_HPP
#define QCTL_TIMING_FABRIC_HPP

// Clock tree, PLL lock model, two-level trigger generation and the feedback
// latency ledger.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qctl/common.hpp"

namespace qctl::timing {

struct ClockNode {
  std::string id;
  std::string chassis;
};

/// Parent to child clock link. Skew is fixed; jitter is a fresh zero-mean
/// Gaussian draw per edge per clock event.
struct ClockEdge {
  std::string parent;
  std::string child;
  Picoseconds skew_ps = 0;
  double jitter_sigma_ps = 0.0;
};

/// Clock distribution network. Chassis-to-chassis daisy chaining is expressed
/// as ordinary TCM to TCM edges.
struct ClockTopology {
  std::string root;
  std::vector<ClockNode> nodes;
  std::vector<ClockEdge> edges;

  /// Throws InvalidArgument naming the offending node if the graph is not a
  /// tree rooted at `root` (cycle, second parent, unknown or unreachable node,
  /// negative sigma).
  void validate() const;
};

/// Two-leaf star used by the jitter experiment and most tests.
ClockTopology star_topology(const std::string& root, const std::vector<std::string>& leaves,
                            Picoseconds skew_ps, double jitter_sigma_ps);

struct PllConfig {
  int r1_divider = 1;
  bool zero_delay = true;
  double input_frequency_hz = 25e6;
  double output_frequency_hz = 2e9;
};

/// Phase offset (ps) of the locked output against the reference after a
/// power cycle identified by `power_cycle_seed`.
///
/// With R1 = 1 and zero-delay mode the result is always 0. With R1 = N the
/// unknown start state of the reference divider places the output at one of
/// k * T_in / N, k in [0, N). Without zero-delay the feedback divider start
/// state adds one of the output-period multiples inside one input period.
Picoseconds pll_lock(const PllConfig& config, std::uint64_t power_cycle_seed);

/// Clock-edge timestamp per module for tick `tick_index`:
///   tick_index * period + sum(path skews) + sum(path jitter draws),
/// jitter rounded to the nearest ps. Deterministic in (topology, tick, seed).
std::map<std::string, Picoseconds> distribute_clock(const ClockTopology& topology,
                                                    std::int64_t tick_index, std::uint64_t seed,
                                                    Picoseconds period_ps = 4000);

struct TriggerEvent {
  int level = 1;
  Picoseconds timestamp_ps = 0;
  std::string source;
  std::string tag;

  friend bool operator==(const TriggerEvent&, const TriggerEvent&) = default;
};

/// Validates level and timestamp; throws InvalidArgument.
void validate(const TriggerEvent& event);

struct ScheduledTrigger {
  Picoseconds offset_ps = 0;
  std::string tag;
};

struct ModuleSchedule {
  std::string module;
  std::vector<ScheduledTrigger> triggers;
};

/// One level-1 event from `level1_source` plus each module's level-2 events at
/// level1 + offset + module clock error. `clock_error_ps` maps module id to its
/// clock edge deviation (missing modules are treated as 0). Sorted by
/// timestamp, ties broken by (source, tag).
std::vector<TriggerEvent> issue_trigger(Picoseconds level1_time_ps,
                                        const std::vector<ModuleSchedule>& schedules,
                                        const std::map<std::string, Picoseconds>& clock_error_ps = {},
                                        const std::string& level1_source = "TCM");

/// Clock error of every module relative to the ideal tick time, i.e.
/// distribute_clock minus tick_index * period.
std::map<std::string, Picoseconds> clock_errors(const ClockTopology& topology,
                                                std::int64_t tick_index, std::uint64_t seed,
                                                Picoseconds period_ps = 4000);

enum class LatencyGroup { kElectronics, kReadout, kControlPulse };

const char* to_string(LatencyGroup group);
std::optional<LatencyGroup> latency_group_from_string(const std::string& s);

struct LatencyStage {
  std::string name;
  Picoseconds duration_ps = 0;
};

struct LatencyComponent {
  std::string name;
  LatencyGroup group = LatencyGroup::kElectronics;
  Picoseconds duration_ps = 0;
  /// Optional finer breakdown; when non-empty the stage durations must sum to
  /// duration_ps.
  std::vector<LatencyStage> stages;
};

/// Ordered delay components along the feedback path.
class LatencyLedger {
 public:
  LatencyLedger() = default;
  explicit LatencyLedger(std::vector<LatencyComponent> components);

  void add(LatencyComponent component);
  const std::vector<LatencyComponent>& components() const { return components_; }
  const LatencyComponent* find(const std::string& name) const;

 private:
  std::vector<LatencyComponent> components_;
};

struct FeedbackLatency {
  Picoseconds total_ps = 0;          // tau_FB
  Picoseconds electronics_ps = 0;    // tau_EL
  Picoseconds readout_ps = 0;        // tau_RO
  Picoseconds control_pulse_ps = 0;  // tau_CP
};

FeedbackLatency feedback_latency(const LatencyLedger& ledger);

// Documented defaults for the electronics budget. Only the two DSP latencies
// are measured figures; the remaining split is a configurable assumption
// chosen so the electronics subtotal is 125 ns.
inline constexpr Picoseconds kAwgDspLatencyPs = 16000;
inline constexpr Picoseconds kDaqDspLatencyPs = 20000;
inline constexpr Picoseconds kAdcConversionPs = 30000;
inline constexpr Picoseconds kDacConversionPs = 25000;
inline constexpr Picoseconds kTriggerTransportPs = 10000;
inline constexpr Picoseconds kAnalogCablingPs = 24000;
inline constexpr Picoseconds kReadoutWindowPs = 48000;
inline constexpr Picoseconds kFeedbackPulsePs = 10000;

/// Loopback feedback ledger in signal-path order.
LatencyLedger default_ledger();

}  // namespace qctl::timing

#endif  // QCTL_TIMING_FABRIC_HPP
