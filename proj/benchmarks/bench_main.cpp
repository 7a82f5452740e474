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

#include <benchmark/benchmark.h>

#include <random>

#include "qctl/awg_engine.hpp"
#include "qctl/dsp_demod.hpp"
#include "qctl/fidelity_budget.hpp"

namespace {

using namespace qctl;

dsp::IQSampleStream random_stream(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> code(dsp::kAdcMin, dsp::kAdcMax);
  dsp::IQSampleStream s;
  for (std::size_t k = 0; k < n; ++k) {
    s.i_codes.push_back(static_cast<std::int16_t>(code(rng)));
    s.q_codes.push_back(static_cast<std::int16_t>(code(rng)));
  }
  return s;
}

void BM_MixFast(benchmark::State& state) {
  const auto s = random_stream(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dsp::digital_mix_fast(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MixFast)->Arg(512)->Arg(4096);

void BM_MixGeneral(benchmark::State& state) {
  const auto s = random_stream(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dsp::digital_mix_general(s, 250e6));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MixGeneral)->Arg(512)->Arg(4096);

void BM_Accumulate(benchmark::State& state) {
  const auto mixed = dsp::digital_mix_fast(random_stream(4096));
  for (auto _ : state) benchmark::DoNotOptimize(dsp::accumulate(mixed, state.range(0)));
}
BENCHMARK(BM_Accumulate)->Arg(64)->Arg(4096);

void BM_Render(benchmark::State& state) {
  awg::PulseSequence seq;
  awg::PulseEnvelope env{"g", {}};
  for (int k = 0; k < 64; ++k) env.samples.push_back(static_cast<std::int16_t>(100 * k));
  seq.envelopes.push_back(env);
  for (int k = 0; k < 32; ++k) seq.schedule.push_back({"g", 40LL * k, 0.5, ""});
  awg::AwgEngine engine;
  const auto h = engine.load_sequence(seq);
  const timing::TriggerEvent trig{2, 0, "TCM", ""};
  for (auto _ : state) benchmark::DoNotOptimize(engine.render(h, trig, 2048));
}
BENCHMARK(BM_Render);

void BM_SpuriousWorstCase(benchmark::State& state) {
  const auto spec = fidelity::SpuriousDriveSpec::from_sfdr_dbc(-40.0);
  for (auto _ : state) benchmark::DoNotOptimize(fidelity::spurious_fidelity_worst_case(spec));
}
BENCHMARK(BM_SpuriousWorstCase);

}  // namespace

BENCHMARK_MAIN();
