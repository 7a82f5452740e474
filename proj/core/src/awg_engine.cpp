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

#include "qctl/awg_engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qctl/fft.hpp"

namespace qctl::awg {

void PulseEnvelope::validate() const {
  if (samples.empty()) throw InvalidArgument("envelope '" + name + "' is empty");
  for (const auto s : samples) {
    if (s < kDacMin || s > kDacMax) throw InvalidArgument("envelope '" + name + "' has a code outside 14-bit range");
  }
}

std::int64_t PulseSequence::stored_bits() const {
  std::int64_t bits = 0;
  for (const auto& e : envelopes) bits += static_cast<std::int64_t>(e.samples.size()) * kDacBits;
  bits += static_cast<std::int64_t>(schedule.size()) * kScheduleEntryBits;
  return bits;
}

MemoryBudgetExceeded::MemoryBudgetExceeded(std::int64_t required_bits, std::int64_t available_bits)
    : Error("waveform memory budget exceeded: requires " + std::to_string(required_bits) + " bits, " +
            std::to_string(available_bits) + " available"),
      required_(required_bits),
      available_(available_bits) {}

SequenceHandle AwgEngine::load_sequence(PulseSequence seq) {
  std::set<std::string> names;
  for (const auto& e : seq.envelopes) {
    e.validate();
    if (!names.insert(e.name).second) throw InvalidArgument("duplicate envelope '" + e.name + "'");
  }
  for (const auto& s : seq.schedule) {
    if (!names.contains(s.envelope)) throw InvalidArgument("schedule references unknown envelope '" + s.envelope + "'");
    if (s.offset_samples < 0) throw InvalidArgument("schedule offset must be >= 0");
    if (!(s.scale >= -1.0 && s.scale <= 1.0)) throw InvalidArgument("schedule scale must lie in [-1, 1]");
  }
  const std::int64_t required = seq.stored_bits();
  if (required > seq.memory_budget_bits) throw MemoryBudgetExceeded(required, seq.memory_budget_bits);

  const SequenceHandle h{next_id_++};
  sequences_.emplace(h.id, std::move(seq));
  return h;
}

const PulseSequence& AwgEngine::sequence(SequenceHandle h) const {
  const auto it = sequences_.find(h.id);
  if (it == sequences_.end()) throw InvalidArgument("unknown sequence handle " + std::to_string(h.id));
  return it->second;
}

std::int64_t AwgEngine::stored_bits(SequenceHandle h) const { return sequence(h).stored_bits(); }

RenderResult AwgEngine::render(SequenceHandle h, const timing::TriggerEvent& trigger,
                               std::int64_t duration_samples) const {
  const PulseSequence& seq = sequence(h);
  timing::validate(trigger);
  if (trigger.level != 2) throw InvalidArgument("render requires a level-2 trigger");
  if (duration_samples < 0) throw InvalidArgument("render duration must be >= 0");

  std::map<std::string, const PulseEnvelope*> by_name;
  for (const auto& e : seq.envelopes) by_name[e.name] = &e;

  std::vector<std::int64_t> acc(static_cast<std::size_t>(duration_samples), 0);
  for (const auto& entry : seq.schedule) {
    const auto& samples = by_name.at(entry.envelope)->samples;
    const std::int64_t n = static_cast<std::int64_t>(samples.size());
    const std::int64_t end = std::min(duration_samples, entry.offset_samples + n);
    for (std::int64_t t = entry.offset_samples; t < end; ++t) {
      const double scaled = entry.scale * samples[static_cast<std::size_t>(t - entry.offset_samples)];
      acc[static_cast<std::size_t>(t)] += static_cast<std::int64_t>(round_half_even(scaled));
    }
  }

  RenderResult out;
  out.trigger_ps = trigger.timestamp_ps;
  out.latency_ps = timing::kAwgDspLatencyPs;
  out.codes.resize(acc.size());
  std::transform(acc.begin(), acc.end(), out.codes.begin(),
                 [](std::int64_t v) { return static_cast<std::int16_t>(clamp_to_bits(v, kDacBits)); });
  return out;
}

std::vector<int> dac_power_up(std::uint64_t seed, std::size_t channels) {
  Rng rng(derive_seed(seed, 0xDACULL));
  std::uniform_int_distribution<int> offset(-2, 2);
  std::vector<int> out(channels);
  for (auto& o : out) o = offset(rng);
  return out;
}

std::vector<std::int16_t> apply_sample_offset(std::span<const std::int16_t> codes, int offset) {
  const auto n = static_cast<std::ptrdiff_t>(codes.size());
  std::vector<std::int16_t> out(codes.size(), 0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t src = i - offset;
    if (src >= 0 && src < n) out[static_cast<std::size_t>(i)] = codes[static_cast<std::size_t>(src)];
  }
  return out;
}

namespace {

std::vector<std::int64_t> first_difference(std::span<const std::int16_t> x) {
  std::vector<std::int64_t> d(x.size(), 0);
  for (std::size_t i = 1; i < x.size(); ++i) d[i] = std::int64_t{x[i]} - x[i - 1];
  return d;
}

int estimate_lag(const std::vector<std::int64_t>& ref, const std::vector<std::int64_t>& sig, int max_lag) {
  const auto n = static_cast<int>(ref.size());
  std::int64_t best = 0;
  int best_lag = 0;
  int count_best = 0;
  bool first = true;
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    std::int64_t c = 0;
    for (int i = 0; i < n; ++i) {
      const int j = i + lag;
      if (j >= 0 && j < static_cast<int>(sig.size())) c += ref[static_cast<std::size_t>(i)] * sig[static_cast<std::size_t>(j)];
    }
    if (first || c > best) {
      best = c;
      best_lag = lag;
      count_best = 1;
      first = false;
    } else if (c == best) {
      ++count_best;
    }
  }
  if (best <= 0 || count_best != 1) throw InvalidArgument("dac sync: ambiguous correlation (no unique edge)");
  return best_lag;
}

}  // namespace

std::vector<int> calibrate_dac_sync(std::span<const std::int16_t> reference,
                                    const std::vector<std::vector<std::int16_t>>& captured, int max_lag) {
  const auto ref = first_difference(reference);
  if (std::all_of(ref.begin(), ref.end(), [](std::int64_t v) { return v == 0; })) {
    throw InvalidArgument("dac sync: reference waveform is flat");
  }
  std::vector<int> corrections;
  corrections.reserve(captured.size());
  for (const auto& ch : captured) corrections.push_back(-estimate_lag(ref, first_difference(ch), max_lag));
  return corrections;
}

std::vector<double> reconstructed_spectrum(std::span<const std::int16_t> codes) {
  std::vector<double> x(codes.begin(), codes.end());
  const auto spec = fft_real(x);
  const std::size_t n = codes.size();
  std::vector<double> mag(n / 2 + 1, 0.0);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double f = kDacSampleRateHz * static_cast<double>(k) / static_cast<double>(n);
    if (f > kReconstructionCutoffHz) continue;
    const double u = kPi * f / kDacSampleRateHz;
    const double zoh = k == 0 ? 1.0 : std::sin(u) / u;
    mag[k] = std::abs(spec[k]) * zoh / static_cast<double>(n);
  }
  return mag;
}

}  // namespace qctl::awg
