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
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "qctl/config.hpp"
#include "qctl/experiments.hpp"

namespace qctl::orchestrator {
namespace {

ExperimentConfig make(const std::string& json) {
  const auto r = validate_config(Json::parse(json));
  if (!r.ok()) throw std::runtime_error(r.errors.front().path + ": " + r.errors.front().message);
  return *r.config;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Replay, SameSeedSameBytes) {
  const auto cfg = make(R"({"experiment":"t1","seed":11,"shots":20,
      "sweep":{"name":"delay_s","start":0,"stop":3e-4,"points":8}})");
  const auto base = std::filesystem::temp_directory_path() / "qctl_replay";
  std::filesystem::remove_all(base);
  const auto a = write_outputs(run(cfg), base / "a", OutputFormat::kCsv);
  const auto b = write_outputs(run(cfg), base / "b", OutputFormat::kCsv);
  ASSERT_EQ(a.tables.size(), b.tables.size());
  for (std::size_t k = 0; k < a.tables.size(); ++k) {
    EXPECT_EQ(slurp(a.tables[k]), slurp(b.tables[k]));
    EXPECT_FALSE(slurp(a.tables[k]).empty());
  }
  EXPECT_EQ(slurp(a.summary), slurp(b.summary));

  auto other = cfg;
  other.seed = 12;
  const auto c = write_outputs(run(other), base / "c", OutputFormat::kCsv);
  EXPECT_NE(slurp(a.tables[0]), slurp(c.tables[0]));
  std::filesystem::remove_all(base);
}

TEST(Replay, JsonLinesCarrySeedAndHash) {
  const auto cfg = make(R"({"experiment":"budget_sweep","seed":1,"budget":"bias"})");
  const auto base = std::filesystem::temp_directory_path() / "qctl_jsonl";
  std::filesystem::remove_all(base);
  const auto files = write_outputs(run(cfg), base, OutputFormat::kJsonLines);
  std::ifstream in(files.tables.at(0));
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto j = Json::parse(line);
    EXPECT_EQ(j.at("seed"), 1);
    EXPECT_EQ(j.at("config_hash"), cfg.hash);
    ++rows;
  }
  EXPECT_GT(rows, 0);
  std::filesystem::remove_all(base);
}

TEST(Feedback, DefaultLedgerTimeline) {
  const auto cfg = make(R"({"experiment":"feedback_latency","seed":3})");
  const auto fb = run_feedback_latency(cfg);
  EXPECT_TRUE(fb.feedback_issued);
  EXPECT_EQ(fb.decided, dsp::QubitState::kExcited);
  EXPECT_EQ(fb.ledger_totals.electronics_ps, 125000);
  EXPECT_EQ(fb.measured_ps, fb.ledger_totals.total_ps);
  EXPECT_EQ(fb.measured_electronics_ps, 125000);
  EXPECT_EQ(fb.timeline.back().name, "fb_pulse_end");
  ASSERT_EQ(fb.triggers.size(), 1u);
}

TEST(Feedback, RandomLedgersMatchTotals) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> ns(0, 80);
  std::uniform_int_distribution<int> ro(16, 96);
  auto cfg = make(R"({"experiment":"feedback_latency","seed":3})");
  for (int c = 0; c < 1000; ++c) {
    std::vector<timing::LatencyComponent> comps;
    const auto defaults = timing::default_ledger();
    for (auto comp : defaults.components()) {
      if (comp.name == "readout_window") {
        comp.duration_ps = 1000LL * ro(rng);
      } else if (!comp.stages.empty()) {
        comp.duration_ps = 0;
        for (auto& s : comp.stages) {
          s.duration_ps = 1000LL * ns(rng) + ns(rng);
          comp.duration_ps += s.duration_ps;
        }
      } else {
        comp.duration_ps = 1000LL * ns(rng) + ns(rng);
      }
      comps.push_back(comp);
    }
    cfg.ledger = timing::LatencyLedger(comps);
    cfg.seed = static_cast<std::uint64_t>(c);
    const auto fb = run_feedback_latency(cfg);
    ASSERT_TRUE(fb.feedback_issued) << c;
    const auto want = timing::feedback_latency(cfg.ledger);
    ASSERT_EQ(fb.measured_ps, want.total_ps);
    ASSERT_EQ(fb.measured_electronics_ps, want.electronics_ps);
    ASSERT_EQ(fb.measured_readout_ps, want.readout_ps);
    ASSERT_EQ(fb.measured_control_pulse_ps, want.control_pulse_ps);
    ASSERT_EQ(want.total_ps, want.electronics_ps + want.readout_ps + want.control_pulse_ps);
  }
}

TEST(Feedback, GroundInputStopsAtDiscrimination) {
  const auto cfg = make(R"({"experiment":"feedback_latency","seed":3,"feedback":{"input_state":"ground"}})");
  const auto fb = run_feedback_latency(cfg);
  EXPECT_FALSE(fb.feedback_issued);
  EXPECT_EQ(fb.decided, dsp::QubitState::kGround);
  EXPECT_EQ(fb.timeline.back().name, "discrimination");
  EXPECT_TRUE(fb.triggers.empty());
  const auto r = run(cfg);
  EXPECT_EQ(r.metrics.at("outcome"), "no feedback");
}

TEST(Feedback, ZeroElectronics) {
  auto cfg = make(R"({"experiment":"feedback_latency","seed":3})");
  std::vector<timing::LatencyComponent> comps;
  const auto defaults = timing::default_ledger();
  for (auto comp : defaults.components()) {
    if (comp.group == timing::LatencyGroup::kElectronics) {
      comp.duration_ps = 0;
      for (auto& s : comp.stages) s.duration_ps = 0;
    }
    comps.push_back(comp);
  }
  cfg.ledger = timing::LatencyLedger(comps);
  const auto fb = run_feedback_latency(cfg);
  EXPECT_EQ(fb.measured_ps, timing::kReadoutWindowPs + timing::kFeedbackPulsePs);
  EXPECT_EQ(fb.measured_electronics_ps, 0);
}

ExperimentConfig jitter_config(double sigma_ps, int shots) {
  auto cfg = make(R"({"experiment":"jitter_histogram","seed":8})");
  cfg.topology = default_topology(sigma_ps);
  cfg.shots = shots;
  return cfg;
}

TEST(Jitter, RecoversConfiguredSpread) {
  const auto h = run_jitter_histogram(jitter_config(3.0, 2000));
  EXPECT_NEAR(h.std_ps, 3.0, 0.3);
  EXPECT_NEAR(h.mean_ps, 0.0, 0.3);
  std::int64_t total = 0;
  for (const auto n : h.counts) total += n;
  EXPECT_EQ(total, 2000);
}

TEST(Jitter, ZeroJitterFloor) {
  const auto h = run_jitter_histogram(jitter_config(0.0, 500));
  EXPECT_LT(h.std_ps, 0.1);
}

TEST(Jitter, WeakToneRejected) {
  auto cfg = jitter_config(3.0, 10);
  cfg.jitter.amplitude_volts = 1e-4;
  EXPECT_THROW(run_jitter_histogram(cfg), Error);
}

TEST(Jitter, BinPhaseOracle) {
  const std::size_t n = 256;
  std::vector<std::int16_t> codes(n);
  for (std::size_t k = 0; k < n; ++k) {
    codes[k] = static_cast<std::int16_t>(std::lround(2000.0 * std::cos(kTwoPi * 5.0 * k / n + 0.7)));
  }
  double mag = 0.0;
  EXPECT_NEAR(fixed_point_bin_phase(codes, 5, &mag), 0.7, 1e-3);
  EXPECT_NEAR(mag, 2000.0 * n / 2.0, 2000.0 * n * 1e-3);
  EXPECT_THROW(fixed_point_bin_phase(codes, n), InvalidArgument);
}

TEST(Readout, AssignmentFidelityMatchesGaussianOverlap) {
  device::QubitParams p;
  device::ReadoutPulse pulse;
  pulse.duration_s = 16e-9;
  pulse.amplitude_volts = 0.05;
  pulse.noise_sigma_volts = 0.06;
  const double bias = p.sweet_spot_volts;
  const auto cal = calibrate_readout(pulse, 0, p, bias);
  const dsp::AdcModel adc;
  const int shots = 4000;
  std::vector<double> g, e;
  int err_g = 0, err_e = 0;
  for (int s = 0; s < shots; ++s) {
    const auto sg = read_out(device::Bloch::ground(), pulse, adc, cal, p, bias, derive_seed(1, s));
    const auto se = read_out(device::Bloch::excited(), pulse, adc, cal, p, bias, derive_seed(2, s));
    g.push_back(sg.decision.rotated_i);
    e.push_back(se.decision.rotated_i);
    err_g += sg.decision.state == dsp::QubitState::kExcited;
    err_e += se.decision.state == dsp::QubitState::kGround;
  }
  const auto stats = [](const std::vector<double>& v) {
    double m = 0.0, s2 = 0.0;
    for (const double x : v) m += x / static_cast<double>(v.size());
    for (const double x : v) s2 += (x - m) * (x - m) / static_cast<double>(v.size() - 1);
    return std::pair{m, std::sqrt(s2)};
  };
  const auto [mg, sgm] = stats(g);
  const auto [me, sem] = stats(e);
  const auto phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  const double thr = static_cast<double>(cal.threshold);
  const double pred = 1.0 - 0.5 * ((1.0 - phi((thr - mg) / sgm)) + phi((thr - me) / sem));
  const double got = 1.0 - 0.5 * (err_g + err_e) / static_cast<double>(shots);
  EXPECT_GT(got, 0.6);
  EXPECT_LT(got, 0.99);
  EXPECT_NEAR(got, pred, 0.015);
}

TEST(Run, BudgetTableMatchesCalculators) {
  const auto t = budget_table(BudgetKind::kJitter, SweepAxis{"jitter_ps", 0.0, 10.0, 3});
  ASSERT_EQ(t.rows.size(), 3u);
  const double phi = std::get<double>(t.rows[1][2]);
  EXPECT_NEAR(phi, kTwoPi * 100e6 * 5e-12, 1e-15);
  const double c = std::cos(phi);
  EXPECT_NEAR(std::get<double>(t.rows[1][3]), (2 + 4 * c * c) / 6, 1e-14);
}

TEST(Run, FlagsDoNotHideTables) {
  const auto r = run(make(R"({"experiment":"demod_selftest","seed":2,"shots":50})"));
  EXPECT_FALSE(r.tables.empty());
  EXPECT_FALSE(r.flagged);
}

}  // namespace
}  // namespace qctl::orchestrator
