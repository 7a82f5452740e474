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
#include <cstdio>
#include <fstream>

#include "qctl/experiments.hpp"
#include "qctl/fidelity_budget.hpp"

#ifndef QCTL_VERSION
#define QCTL_VERSION "0.0.0"
#endif

namespace qctl::orchestrator {

const char* tool_version() { return QCTL_VERSION; }

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw InvalidArgument("table '" + name + "': row width does not match columns");
  rows.push_back(std::move(row));
}

void RunResult::flag(std::string why) {
  flagged = true;
  flags.push_back(std::move(why));
}

std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (const char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

namespace {

Json cell_json(const Cell& c) {
  return std::visit([](const auto& v) { return Json(v); }, c);
}

Json fit_json(const fit::FitResult& f) {
  Json j{{"model", f.model}, {"rss", f.rss}, {"iterations", f.iterations}, {"converged", f.converged}};
  Json params = Json::object();
  for (std::size_t k = 0; k < f.names.size(); ++k) {
    const double se = k < f.std_errors.size() ? f.std_errors[k] : 0.0;
    params[f.names[k]] = {{"value", f.params[k]}, {"std_error", se}, {"ci95", {f.params[k] - 1.96 * se, f.params[k] + 1.96 * se}}};
  }
  j["params"] = params;
  return j;
}

std::string table_file_stem(const RunResult& r, const Table& t) {
  std::string stem = to_string(r.kind);
  if (r.tables.size() > 1) stem += "_" + t.name;
  return stem;
}

}  // namespace

Json summary_json(const RunResult& r) {
  Json j;
  j["experiment"] = to_string(r.kind);
  j["seed"] = r.seed;
  j["config_hash"] = r.config_hash;
  j["tool_version"] = r.tool_version;
  j["flagged"] = r.flagged;
  j["flags"] = r.flags;
  j["fits"] = Json::array();
  for (const auto& f : r.fits) j["fits"].push_back(fit_json(f));
  j["metrics"] = r.metrics;
  j["ledger"] = r.ledger;
  j["tables"] = Json::array();
  for (const auto& t : r.tables) j["tables"].push_back({{"name", t.name}, {"columns", t.columns}, {"rows", t.rows.size()}});
  j["config"] = r.normalized_config;
  return j;
}

WrittenFiles write_outputs(const RunResult& r, const std::filesystem::path& out_dir, OutputFormat format) {
  std::filesystem::create_directories(out_dir);
  WrittenFiles files;
  const std::string seed = std::to_string(r.seed);
  for (const auto& t : r.tables) {
    const auto path = out_dir / (table_file_stem(r, t) + (format == OutputFormat::kCsv ? ".csv" : ".jsonl"));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    if (format == OutputFormat::kCsv) {
      out << "seed,config_hash";
      for (const auto& c : t.columns) out << ',' << c;
      out << '\n';
      for (const auto& row : t.rows) {
        out << seed << ',' << r.config_hash;
        for (const auto& c : row) out << ',' << format_cell(c);
        out << '\n';
      }
    } else {
      for (const auto& row : t.rows) {
        Json j{{"seed", r.seed}, {"config_hash", r.config_hash}};
        for (std::size_t k = 0; k < row.size(); ++k) j[t.columns[k]] = cell_json(row[k]);
        out << j.dump() << '\n';
      }
    }
    files.tables.push_back(path);
  }
  files.summary = out_dir / (std::string(to_string(r.kind)) + "_summary.json");
  std::ofstream out(files.summary, std::ios::binary);
  if (!out) throw Error("cannot write '" + files.summary.string() + "'");
  out << summary_json(r).dump(2) << '\n';
  return files;
}

SweepAxis default_budget_axis(BudgetKind kind) {
  switch (kind) {
    case BudgetKind::kJitter: return {"jitter_ps", 0.0, 20.0, 41};
    case BudgetKind::kSfdr: return {"sfdr_dbc", -80.0, -20.0, 61};
    case BudgetKind::kBias: return {"flux_precision", 1e-6, 1e-4, 41};
  }
  return {};
}

Table budget_table(BudgetKind kind, const SweepAxis& axis) {
  if (axis.points < 1) throw InvalidArgument("budget sweep needs at least one point");
  Table t;
  t.name = to_string(kind);
  switch (kind) {
    case BudgetKind::kJitter: {
      constexpr double f_if = 100e6;
      t.columns = {"jitter_ps", "if_hz", "phase_error_rad", "fidelity"};
      for (const double j : axis.values()) {
        const auto r = fidelity::jitter_to_fidelity(j * 1e-12, f_if);
        t.add_row({j, f_if, r.phase_error_rad, r.fidelity});
      }
      break;
    }
    case BudgetKind::kSfdr: {
      t.columns = {"sfdr_dbc", "m", "worst_case_fidelity", "worst_if_phase_rad", "commensurate_fidelity"};
      for (const double s : axis.values()) {
        const auto spec = fidelity::SpuriousDriveSpec::from_sfdr_dbc(s);
        const auto wc = fidelity::spurious_fidelity_worst_case(spec);
        t.add_row({s, spec.m, wc.fidelity, wc.if_phase_rad, fidelity::spurious_fidelity(spec)});
      }
      break;
    }
    case BudgetKind::kBias: {
      const fidelity::BiasBudget base;
      t.columns = {"flux_precision", "r_ohm", "m_henry", "delta_v_volts"};
      for (const double fp : axis.values()) {
        fidelity::BiasBudget b = base;
        b.flux_precision = fp;
        t.add_row({fp, b.r_ohm, b.m_henry, fidelity::bias_precision(b)});
      }
      break;
    }
  }
  return t;
}

}  // namespace qctl::orchestrator
