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

#include <filesystem>
#include <fstream>

#include "qctl/config.hpp"

namespace qctl::orchestrator {
namespace {

bool has_error(const ValidationResult& r, const std::string& path, const std::string& fragment = "") {
  for (const auto& e : r.errors) {
    if (e.path == path && e.message.find(fragment) != std::string::npos) return true;
  }
  return false;
}

TEST(Config, MinimalT1FillsDefaults) {
  const auto r = validate_config(Json::parse(R"({"experiment":"t1","seed":1})"));
  ASSERT_TRUE(r.ok());
  const auto& c = *r.config;
  EXPECT_EQ(c.kind, ExperimentKind::kT1);
  EXPECT_EQ(c.seed, 1u);
  ASSERT_TRUE(c.sweep.has_value());
  EXPECT_EQ(c.sweep->name, "delay_s");
  EXPECT_EQ(c.device.f_min_hz, 1.82e9);
  EXPECT_EQ(c.device.t1_s, 90e-6);
  EXPECT_EQ(c.ledger.components().size(), timing::default_ledger().components().size());
  ASSERT_EQ(c.sequence.envelopes.size(), 1u);
  EXPECT_EQ(c.sequence.envelopes[0].name, "pi_pulse");
  EXPECT_TRUE(c.normalized.contains("device"));
  EXPECT_EQ(c.hash.size(), 16u);
}

TEST(Config, NormalizedIsStable) {
  const auto a = validate_config(Json::parse(R"({"experiment":"t1","seed":1})"));
  const auto b = validate_config(a.config->normalized);
  ASSERT_TRUE(b.ok());
  EXPECT_EQ(a.config->hash, b.config->hash);
  const auto c = validate_config(Json::parse(R"({"experiment":"t1","seed":2})"));
  EXPECT_NE(a.config->hash, c.config->hash);
}

TEST(Config, MissingSeedIsSingleError) {
  const auto r = validate_config(Json::parse(R"({"experiment":"t1","shots":10})"));
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].path, "/seed");
}

TEST(Config, DanglingEnvelopeReference) {
  const auto doc = Json::parse(R"({"experiment":"ramsey","seed":1,
    "sequence":{"envelopes":[{"name":"x90","codes":[100,200,100]}],
                "schedule":[{"envelope":"pi_pulse","offset_samples":0}]}})");
  const auto r = validate_config(doc);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_error(r, "/sequence/schedule/0/envelope", "pi_pulse"));
  EXPECT_TRUE(has_error(r, "/drive/pi_envelope", "pi_pulse"));
}

TEST(Config, UnknownKeyRejected) {
  const auto r = validate_config(Json::parse(R"({"experiment":"t1","seed":1,"device":{"t1":5}})"));
  EXPECT_TRUE(has_error(r, "/device/t1", "unknown key"));
}

TEST(Config, RangeChecks) {
  EXPECT_TRUE(has_error(validate_config(Json::parse(R"({"experiment":"t1","seed":1,"shots":0})")), "/shots"));
  EXPECT_TRUE(has_error(validate_config(Json::parse(R"({"experiment":"warp","seed":1})")), "/experiment"));
  EXPECT_TRUE(has_error(validate_config(Json::parse(R"({"experiment":"t1","seed":1,"format":"xml"})")), "/format"));
  EXPECT_FALSE(validate_config(Json::parse(R"({"experiment":"t1","seed":1,"device":{"t1_s":-1}})")).ok());
  EXPECT_FALSE(validate_config(Json::parse(R"({"experiment":"t1","seed":1,
      "sequence":{"envelopes":[{"name":"pi_pulse","codes":[9000]}],"schedule":[]}})")).ok());
}

TEST(Config, SweepMustMatchExperiment) {
  const auto bad = validate_config(Json::parse(R"({"experiment":"t1","seed":1,
      "sweep":{"name":"probe_hz","start":0,"stop":1,"points":3}})"));
  EXPECT_TRUE(has_error(bad, "/sweep/name"));
  const auto good = validate_config(Json::parse(R"({"experiment":"t1","seed":1,
      "sweep":{"name":"delay_s","start":0,"stop":1e-4,"points":5}})"));
  ASSERT_TRUE(good.ok());
  const auto v = good.config->sweep->values();
  ASSERT_EQ(v.size(), 5u);
  EXPECT_DOUBLE_EQ(v[4], 1e-4);
}

TEST(Config, JitterModulesMustExist) {
  const auto r = validate_config(Json::parse(R"({"experiment":"jitter_histogram","seed":1,
      "jitter":{"channels":["AWG1","AWG9"]}})"));
  EXPECT_TRUE(has_error(r, "/jitter/channels/1", "AWG9"));
}

TEST(Config, SequenceFromFile) {
  const auto dir = std::filesystem::temp_directory_path() / "qctl_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "seq.json");
    out << R"({"envelopes":[{"name":"pi_pulse","codes":[0,4000,8000,4000,0]}],
               "schedule":[{"envelope":"pi_pulse","offset_samples":4}]})";
  }
  const auto r = validate_config(Json::parse(R"({"experiment":"t1","seed":1,"sequence":"seq.json"})"), dir);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.config->sequence.envelopes[0].samples.size(), 5u);
  const auto missing = validate_config(Json::parse(R"({"experiment":"t1","seed":1,"sequence":"nope.json"})"), dir);
  EXPECT_TRUE(has_error(missing, "/sequence", "cannot open"));
  std::filesystem::remove_all(dir);
}

TEST(Config, FileErrors) {
  const auto r = validate_config_file("/nonexistent/qctl.json");
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_NE(r.errors[0].message.find("cannot open"), std::string::npos);
}

TEST(Config, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

}  // namespace
}  // namespace qctl::orchestrator
