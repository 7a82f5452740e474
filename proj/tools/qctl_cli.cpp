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

// qctl: run and validate control-system experiments, print budget tables.
//
//   qctl run <config> [--seed N] [--out-dir DIR] [--format csv|json-lines]
//   qctl validate <config>
//   qctl budget <jitter|sfdr|bias> [--sweep start:stop:points]
//   qctl selftest
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qctl/experiments.hpp"
#include "qctl/fidelity_budget.hpp"

namespace {

namespace orc = qctl::orchestrator;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int print_errors(const std::vector<orc::ConfigError>& errors) {
  for (const auto& e : errors) std::cerr << (e.path.empty() ? "/" : e.path) << ": " << e.message << '\n';
  return kExitValidation;
}

orc::ValidationResult load(const std::string& path, std::optional<std::uint64_t> seed,
                           const std::optional<std::string>& format) {
  std::ifstream in(path);
  if (!in) return {std::nullopt, {{"", "cannot open config file '" + path + "'"}}};
  orc::Json doc;
  try {
    doc = orc::Json::parse(in);
  } catch (const orc::Json::parse_error& e) {
    return {std::nullopt, {{"", std::string("invalid JSON: ") + e.what()}}};
  }
  if (doc.is_object()) {
    if (seed) doc["seed"] = *seed;
    if (format) doc["format"] = *format;
  }
  return orc::validate_config(doc, std::filesystem::path(path).parent_path());
}

std::optional<orc::SweepAxis> parse_sweep(const std::string& s, const std::string& name) {
  orc::SweepAxis a;
  a.name = name;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> a.start >> c1 >> a.stop >> c2 >> a.points) || c1 != ':' || c2 != ':' || a.points < 1) return std::nullopt;
  return a;
}

void print_table(const orc::Table& t) {
  for (std::size_t k = 0; k < t.columns.size(); ++k) std::cout << (k ? "," : "") << t.columns[k];
  std::cout << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) std::cout << (k ? "," : "") << orc::format_cell(row[k]);
    std::cout << '\n';
  }
}

bool check(const char* name, bool ok, const std::string& detail) {
  std::printf("%-28s %s  %s\n", name, ok ? "PASS" : "FAIL", detail.c_str());
  return ok;
}

int selftest() {
  using namespace qctl;
  bool ok = true;
  char buf[160];

  dsp::IQSampleStream ex;
  ex.i_codes = {100, 100, 100, 100};
  ex.q_codes = {0, 0, 0, 0};
  const auto m = dsp::digital_mix_fast(ex);
  ok &= check("fs/4 worked example", m.i == std::vector<std::int32_t>{100, 0, -100, 0} &&
                                          m.q == std::vector<std::int32_t>{0, -100, 0, 100}, "");

  const double f = fidelity::gate_fidelity(fidelity::rotation_unitary(kPi, 0.0), fidelity::rotation_unitary(kPi, 0.00387));
  std::snprintf(buf, sizeof buf, "F = %.8f", f);
  ok &= check("phase error 0.00387 rad", std::abs(f - 0.99999) <= 1e-6, buf);

  const double j = fidelity::jitter_for_fidelity(0.99999, 100e6) * 1e12;
  std::snprintf(buf, sizeof buf, "jitter = %.4f ps", j);
  ok &= check("jitter at F = 0.99999", std::abs(j - 6.2) <= 0.05, buf);

  const double dv = fidelity::bias_precision({}) * 1e6;
  std::snprintf(buf, sizeof buf, "dV = %.4f uV", dv);
  ok &= check("bias precision", std::abs(dv - 10.34) <= 0.01, buf);

  const auto lat = timing::feedback_latency(timing::default_ledger());
  std::snprintf(buf, sizeof buf, "tau_EL = %lld ps", static_cast<long long>(lat.electronics_ps));
  ok &= check("feedback electronics", lat.electronics_ps == 125000, buf);

  return ok ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qctl: quantum control system simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", orc::tool_version());

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::optional<std::string> format;
  auto* run = app.add_subcommand("run", "Run an experiment and write its tables and summary");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out-dir", out_dir, "Output directory");
  run->add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "json-lines"}));

  auto* validate = app.add_subcommand("validate", "Check a config and print it normalized");
  validate->add_option("config", config_path, "Experiment config (JSON)")->required();

  std::string budget_kind;
  std::optional<std::string> sweep;
  auto* budget = app.add_subcommand("budget", "Print a fidelity budget table");
  budget->add_option("kind", budget_kind, "jitter, sfdr or bias")->required()->check(CLI::IsMember({"jitter", "sfdr", "bias"}));
  budget->add_option("--sweep", sweep, "start:stop:points");

  auto* self = app.add_subcommand("selftest", "Check the headline numbers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*run) {
      const auto v = load(config_path, seed, format);
      if (!v.ok()) return print_errors(v.errors);
      const auto result = orc::run(*v.config);
      const auto files = orc::write_outputs(result, out_dir, v.config->format);
      for (const auto& p : files.tables) std::cout << p.string() << '\n';
      std::cout << files.summary.string() << '\n';
      for (const auto& f : result.flags) std::cerr << "flagged: " << f << '\n';
      return 0;
    }
    if (*validate) {
      const auto v = load(config_path, std::nullopt, std::nullopt);
      if (!v.ok()) return print_errors(v.errors);
      std::cout << v.config->normalized.dump(2) << '\n';
      return 0;
    }
    if (*budget) {
      const auto kind = *orc::budget_kind_from_string(budget_kind);
      auto axis = orc::default_budget_axis(kind);
      if (sweep) {
        const auto parsed = parse_sweep(*sweep, axis.name);
        if (!parsed) {
          std::cerr << "--sweep: expected start:stop:points with points >= 1\n";
          return kExitValidation;
        }
        axis = *parsed;
      }
      print_table(orc::budget_table(kind, axis));
      return 0;
    }
    if (*self) return selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
