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

#include "qctl/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace qctl::orchestrator {

namespace {

struct KindInfo {
  ExperimentKind kind;
  const char* name;
};

constexpr KindInfo kKinds[] = {
    {ExperimentKind::kOneTone, "one_tone"},
    {ExperimentKind::kTwoTone, "two_tone"},
    {ExperimentKind::kT1, "t1"},
    {ExperimentKind::kRamsey, "ramsey"},
    {ExperimentKind::kJitterHistogram, "jitter_histogram"},
    {ExperimentKind::kFeedbackLatency, "feedback_latency"},
    {ExperimentKind::kMixerCalibration, "mixer_calibration"},
    {ExperimentKind::kBudgetSweep, "budget_sweep"},
    {ExperimentKind::kDemodSelftest, "demod_selftest"},
};

}  // namespace

const char* to_string(ExperimentKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "?";
}

std::optional<ExperimentKind> experiment_kind_from_string(const std::string& s) {
  for (const auto& k : kKinds) {
    if (s == k.name) return k.kind;
  }
  return std::nullopt;
}

const char* to_string(BudgetKind kind) {
  switch (kind) {
    case BudgetKind::kJitter: return "jitter";
    case BudgetKind::kSfdr: return "sfdr";
    case BudgetKind::kBias: return "bias";
  }
  return "?";
}

std::optional<BudgetKind> budget_kind_from_string(const std::string& s) {
  if (s == "jitter") return BudgetKind::kJitter;
  if (s == "sfdr") return BudgetKind::kSfdr;
  if (s == "bias") return BudgetKind::kBias;
  return std::nullopt;
}

std::vector<double> SweepAxis::values() const {
  std::vector<double> v(static_cast<std::size_t>(std::max(points, 0)));
  for (int k = 0; k < points; ++k) {
    v[static_cast<std::size_t>(k)] = points == 1 ? start : start + (stop - start) * k / (points - 1);
  }
  return v;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

awg::PulseEnvelope default_pi_envelope(const std::string& name) {
  awg::PulseEnvelope e{name, {}};
  constexpr int n = 40;
  constexpr double sigma = 8.0;
  for (int k = 0; k < n; ++k) {
    const double u = (k - (n - 1) / 2.0) / sigma;
    e.samples.push_back(static_cast<std::int16_t>(round_half_even(8000.0 * std::exp(-0.5 * u * u))));
  }
  return e;
}

timing::ClockTopology default_topology(double differential_sigma_ps) {
  auto t = timing::star_topology("TCM", {"AWG1", "AWG2"}, 0, differential_sigma_ps / std::sqrt(2.0));
  t.nodes.push_back({"DAQ", "chassis0"});
  t.edges.push_back({"TCM", "DAQ", 0, 0.0});
  return t;
}

namespace {

// Reads keys of one JSON object, records defaults into a normalized mirror and
// reports type errors and unknown keys.
class ObjectReader {
 public:
  ObjectReader(const Json* obj, std::string path, std::vector<ConfigError>& errors, Json& out)
      : obj_(obj), path_(std::move(path)), errors_(errors), out_(out) {
    out_ = Json::object();
    if (obj_ != nullptr && !obj_->is_object()) {
      error("", "expected an object");
      obj_ = nullptr;
    }
  }

  bool has(const char* key) const { return obj_ != nullptr && obj_->contains(key); }

  const Json* child(const char* key) {
    known_.insert(key);
    return has(key) ? &obj_->at(key) : nullptr;
  }

  std::string at(const std::string& key) const { return path_ + "/" + key; }

  void error(const std::string& key, const std::string& msg) {
    errors_.push_back({key.empty() ? (path_.empty() ? "/" : path_) : at(key), msg});
  }

  void number(const char* key, double& v, bool positive = false) {
    known_.insert(key);
    if (has(key)) {
      const Json& j = obj_->at(key);
      if (!j.is_number()) {
        error(key, "expected a number");
      } else {
        v = j.get<double>();
        if (positive && !(v > 0.0)) error(key, "must be positive");
      }
    }
    out_[key] = v;
  }

  template <typename Int>
  void integer(const char* key, Int& v) {
    known_.insert(key);
    if (has(key)) {
      const Json& j = obj_->at(key);
      if (!j.is_number_integer()) {
        error(key, "expected an integer");
      } else if constexpr (std::is_unsigned_v<Int>) {
        if (j.is_number_unsigned() || j.get<std::int64_t>() >= 0) {
          v = j.get<Int>();
        } else {
          error(key, "must be non-negative");
        }
      } else {
        v = j.get<Int>();
      }
    }
    out_[key] = v;
  }

  void boolean(const char* key, bool& v) {
    known_.insert(key);
    if (has(key)) {
      if (!obj_->at(key).is_boolean()) {
        error(key, "expected true or false");
      } else {
        v = obj_->at(key).get<bool>();
      }
    }
    out_[key] = v;
  }

  void string(const char* key, std::string& v) {
    known_.insert(key);
    if (has(key)) {
      if (!obj_->at(key).is_string()) {
        error(key, "expected a string");
      } else {
        v = obj_->at(key).get<std::string>();
      }
    }
    out_[key] = v;
  }

  void finish() {
    if (obj_ == nullptr) return;
    for (const auto& [key, value] : obj_->items()) {
      if (!known_.contains(key)) error(key, "unknown key");
    }
  }

  Json& out() { return out_; }

 private:
  const Json* obj_;
  std::string path_;
  std::vector<ConfigError>& errors_;
  Json& out_;
  std::set<std::string> known_;
};

void read_device(const Json* j, std::vector<ConfigError>& errs, Json& out, device::QubitParams& d) {
  ObjectReader r(j, "/device", errs, out);
  r.number("f_min_hz", d.f_min_hz, true);
  r.number("f_max_hz", d.f_max_hz, true);
  r.number("r_ohm", d.r_ohm, true);
  r.number("m_henry", d.m_henry, true);
  // Flux period and sweet spot follow R and M unless given explicitly.
  d.flux_period_volts = fidelity::kFluxQuantumWb * d.r_ohm / d.m_henry;
  d.sweet_spot_volts = 0.5 * d.flux_period_volts;
  r.number("flux_period_volts", d.flux_period_volts, true);
  r.number("sweet_spot_volts", d.sweet_spot_volts);
  r.number("t1_s", d.t1_s, true);
  r.number("t2_star_s", d.t2_star_s, true);
  r.number("readout_frequency_hz", d.readout_frequency_hz, true);
  r.number("kappa_hz", d.kappa_hz, true);
  r.number("chi_hz", d.chi_hz, true);
  r.number("flux_pull_hz", d.flux_pull_hz);
  r.number("rabi_rad_s_per_unit", d.rabi_rad_s_per_unit, true);
  r.number("qnd_fidelity", d.qnd_fidelity);
  r.finish();
  try {
    d.validate();
  } catch (const InvalidArgument& e) {
    errs.push_back({"/device", e.what()});
  }
}

void read_bvg(const Json* j, std::vector<ConfigError>& errs, Json& out, device::BvgModel& b) {
  ObjectReader r(j, "/bvg", errs, out);
  r.number("set_voltage", b.set_voltage);
  r.number("noise_pp_volts", b.noise_pp_volts);
  r.number("drift_pp_volts_per_10h", b.drift_pp_volts_per_10h);
  r.integer("resolution_bits", b.resolution_bits);
  r.number("range_volts", b.range_volts, true);
  r.number("temp_coefficient_v_per_c", b.temp_coefficient_v_per_c);
  r.number("temp_swing_c", b.temp_swing_c);
  r.finish();
  try {
    b.validate();
  } catch (const InvalidArgument& e) {
    errs.push_back({"/bvg", e.what()});
  }
}

void read_readout(const Json* j, std::vector<ConfigError>& errs, Json& out, ReadoutSettings& s,
                  const device::QubitParams& d) {
  ObjectReader r(j, "/readout", errs, out);
  s.pulse.probe_hz = d.readout_frequency_hz - d.chi_hz;
  r.number("duration_s", s.pulse.duration_s, true);
  r.number("probe_hz", s.pulse.probe_hz, true);
  r.number("if_hz", s.pulse.if_hz, true);
  r.number("amplitude_volts", s.pulse.amplitude_volts, true);
  r.number("noise_sigma_volts", s.pulse.noise_sigma_volts);
  r.integer("window_samples", s.window_samples);
  r.finish();
  if (s.window_samples < 0 || s.window_samples > dsp::kMaxWindowSamples) {
    r.error("window_samples", "must be in [0, 2^18]");
  }
}

void read_drive(const Json* j, std::vector<ConfigError>& errs, Json& out, DriveSettings& s, ExperimentKind kind,
                const device::QubitParams& d) {
  ObjectReader r(j, "/drive", errs, out);
  if (kind == ExperimentKind::kRamsey) s.detuning_hz = 0.25e6;
  s.bias_volts = d.sweet_spot_volts;
  r.string("pi_envelope", s.pi_envelope);
  r.number("detuning_hz", s.detuning_hz);
  r.number("bias_volts", s.bias_volts);
  r.number("saturation_amplitude", s.saturation_amplitude);
  r.number("saturation_duration_s", s.saturation_duration_s, true);
  r.boolean("use_bvg_noise", s.use_bvg_noise);
  r.finish();
}

void read_adc(const Json* j, std::vector<ConfigError>& errs, Json& out, dsp::AdcModel& a) {
  ObjectReader r(j, "/adc", errs, out);
  bool noiseless = false;
  r.number("full_scale_volts", a.full_scale_volts, true);
  r.number("band_low_hz", a.band_low_hz);
  r.number("band_high_hz", a.band_high_hz, true);
  r.boolean("noiseless", noiseless);
  r.finish();
  if (noiseless) a.snr_table.clear();
  try {
    a.validate();
  } catch (const InvalidArgument& e) {
    errs.push_back({"/adc", e.what()});
  }
}

void read_mixer(const Json* j, std::vector<ConfigError>& errs, Json& out, awg::MixerParams& m) {
  ObjectReader r(j, "/mixer", errs, out);
  m = {awg::MixerParams{}.lo_frequency_hz, 0.003, 0.003, 0.02, 0.02};
  r.number("lo_frequency_hz", m.lo_frequency_hz, true);
  r.number("dc_offset_i", m.dc_offset_i);
  r.number("dc_offset_q", m.dc_offset_q);
  r.number("gain_imbalance", m.gain_imbalance);
  r.number("phase_skew_rad", m.phase_skew_rad);
  r.finish();
  try {
    m.validate();
  } catch (const InvalidArgument& e) {
    errs.push_back({"/mixer", e.what()});
  }
}

void read_jitter(const Json* j, std::vector<ConfigError>& errs, Json& out, JitterSettings& s) {
  ObjectReader r(j, "/jitter", errs, out);
  if (const Json* ch = r.child("channels")) {
    if (!ch->is_array() || ch->size() != 2 || !(*ch)[0].is_string() || !(*ch)[1].is_string()) {
      r.error("channels", "expected an array of two module ids");
    } else {
      s.channels = {(*ch)[0].get<std::string>(), (*ch)[1].get<std::string>()};
    }
  }
  r.out()["channels"] = s.channels;
  r.string("daq", s.daq);
  r.number("tone_hz", s.tone_hz, true);
  r.integer("capture_samples", s.capture_samples);
  r.number("amplitude_volts", s.amplitude_volts, true);
  r.number("interval_s", s.interval_s, true);
  r.number("histogram_bin_ps", s.histogram_bin_ps, true);
  r.finish();
  if (s.capture_samples < 64) r.error("capture_samples", "must be >= 64");
}

timing::ClockTopology read_topology(const Json& j, std::vector<ConfigError>& errs) {
  timing::ClockTopology t;
  Json sink;
  ObjectReader r(&j, "/topology", errs, sink);
  r.string("root", t.root);
  if (const Json* nodes = r.child("nodes"); nodes != nullptr && nodes->is_array()) {
    for (std::size_t k = 0; k < nodes->size(); ++k) {
      Json ns;
      ObjectReader nr(&(*nodes)[k], "/topology/nodes/" + std::to_string(k), errs, ns);
      timing::ClockNode n;
      nr.string("id", n.id);
      nr.string("chassis", n.chassis);
      nr.finish();
      t.nodes.push_back(n);
    }
  } else {
    r.error("nodes", "expected an array");
  }
  if (const Json* edges = r.child("edges"); edges != nullptr && edges->is_array()) {
    for (std::size_t k = 0; k < edges->size(); ++k) {
      Json es;
      ObjectReader er(&(*edges)[k], "/topology/edges/" + std::to_string(k), errs, es);
      timing::ClockEdge e;
      er.string("parent", e.parent);
      er.string("child", e.child);
      er.integer("skew_ps", e.skew_ps);
      er.number("jitter_sigma_ps", e.jitter_sigma_ps);
      er.finish();
      t.edges.push_back(e);
    }
  } else if (r.has("edges")) {
    r.error("edges", "expected an array");
  }
  r.finish();
  try {
    t.validate();
  } catch (const InvalidArgument& e) {
    errs.push_back({"/topology", e.what()});
  }
  return t;
}

timing::LatencyLedger read_ledger(const Json& j, std::vector<ConfigError>& errs) {
  timing::LatencyLedger ledger;
  if (!j.is_array()) {
    errs.push_back({"/ledger", "expected an array of components"});
    return ledger;
  }
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string at = "/ledger/" + std::to_string(k);
    Json sink;
    ObjectReader r(&j[k], at, errs, sink);
    timing::LatencyComponent c;
    std::string group = "electronics";
    r.string("name", c.name);
    r.string("group", group);
    r.integer("duration_ps", c.duration_ps);
    if (const Json* stages = r.child("stages"); stages != nullptr) {
      if (!stages->is_array()) {
        r.error("stages", "expected an array");
      } else {
        for (std::size_t s = 0; s < stages->size(); ++s) {
          Json ss;
          ObjectReader sr(&(*stages)[s], at + "/stages/" + std::to_string(s), errs, ss);
          timing::LatencyStage st;
          sr.string("name", st.name);
          sr.integer("duration_ps", st.duration_ps);
          sr.finish();
          c.stages.push_back(st);
        }
      }
    }
    r.finish();
    const auto g = timing::latency_group_from_string(group);
    if (!g) {
      r.error("group", "must be electronics, readout or control_pulse");
      continue;
    }
    c.group = *g;
    try {
      ledger.add(c);
    } catch (const InvalidArgument& e) {
      errs.push_back({at, e.what()});
    }
  }
  return ledger;
}

Json topology_to_json(const timing::ClockTopology& t) {
  Json j;
  j["root"] = t.root;
  j["nodes"] = Json::array();
  for (const auto& n : t.nodes) j["nodes"].push_back({{"id", n.id}, {"chassis", n.chassis}});
  j["edges"] = Json::array();
  for (const auto& e : t.edges) {
    j["edges"].push_back(
        {{"parent", e.parent}, {"child", e.child}, {"skew_ps", e.skew_ps}, {"jitter_sigma_ps", e.jitter_sigma_ps}});
  }
  return j;
}

Json ledger_to_json(const timing::LatencyLedger& l) {
  Json j = Json::array();
  for (const auto& c : l.components()) {
    Json cj{{"name", c.name}, {"group", timing::to_string(c.group)}, {"duration_ps", c.duration_ps}};
    if (!c.stages.empty()) {
      cj["stages"] = Json::array();
      for (const auto& s : c.stages) cj["stages"].push_back({{"name", s.name}, {"duration_ps", s.duration_ps}});
    }
    j.push_back(cj);
  }
  return j;
}

struct SweepDefault {
  const char* name;
  double start;
  double stop;
  int points;
  int shots;
};

SweepDefault sweep_default(ExperimentKind kind, BudgetKind budget, const device::QubitParams& d) {
  switch (kind) {
    case ExperimentKind::kOneTone:
      return {"probe_hz", d.readout_frequency_hz - 3e6, d.readout_frequency_hz + 3e6, 61, 20};
    case ExperimentKind::kTwoTone: return {"drive_hz", d.f_min_hz - 2e6, d.f_min_hz + 2e6, 41, 200};
    case ExperimentKind::kT1: return {"delay_s", 0.0, 4e-4, 40, 500};
    case ExperimentKind::kRamsey: return {"delay_s", 0.0, 5e-5, 101, 500};
    case ExperimentKind::kBudgetSweep:
      switch (budget) {
        case BudgetKind::kJitter: return {"jitter_ps", 0.0, 20.0, 41, 1};
        case BudgetKind::kSfdr: return {"sfdr_dbc", -80.0, -20.0, 61, 1};
        case BudgetKind::kBias: return {"flux_precision", 1e-6, 1e-4, 41, 1};
      }
      break;
    case ExperimentKind::kJitterHistogram: return {"", 0, 0, 0, 5000};
    case ExperimentKind::kDemodSelftest: return {"", 0, 0, 0, 10000};
    default: break;
  }
  return {"", 0, 0, 0, 1};
}

}  // namespace

awg::PulseSequence parse_sequence(const Json& doc, const std::string& at, std::vector<ConfigError>& errors) {
  awg::PulseSequence seq;
  Json sink;
  ObjectReader r(&doc, at, errors, sink);
  r.integer("memory_budget_bits", seq.memory_budget_bits);
  if (const Json* envs = r.child("envelopes"); envs != nullptr) {
    if (!envs->is_array()) {
      r.error("envelopes", "expected an array");
    } else {
      for (std::size_t k = 0; k < envs->size(); ++k) {
        const std::string eat = at + "/envelopes/" + std::to_string(k);
        Json es;
        ObjectReader er(&(*envs)[k], eat, errors, es);
        awg::PulseEnvelope e;
        er.string("name", e.name);
        if (const Json* codes = er.child("codes"); codes != nullptr && codes->is_array()) {
          for (const auto& c : *codes) {
            if (!c.is_number_integer() || c.get<std::int64_t>() < awg::kDacMin || c.get<std::int64_t>() > awg::kDacMax) {
              er.error("codes", "codes must be integers in [-8192, 8191]");
              break;
            }
            e.samples.push_back(static_cast<std::int16_t>(c.get<std::int64_t>()));
          }
          if (codes->empty()) er.error("codes", "envelope must have at least one code");
        } else {
          er.error("codes", "expected an array of integer codes");
        }
        er.finish();
        seq.envelopes.push_back(std::move(e));
      }
    }
  }
  std::set<std::string> names;
  for (const auto& e : seq.envelopes) names.insert(e.name);
  if (const Json* sched = r.child("schedule"); sched != nullptr) {
    if (!sched->is_array()) {
      r.error("schedule", "expected an array");
    } else {
      for (std::size_t k = 0; k < sched->size(); ++k) {
        const std::string sat = at + "/schedule/" + std::to_string(k);
        Json ss;
        ObjectReader sr(&(*sched)[k], sat, errors, ss);
        awg::ScheduleEntry s;
        sr.string("envelope", s.envelope);
        sr.integer("offset_samples", s.offset_samples);
        sr.number("scale", s.scale);
        sr.string("phase_tag", s.phase_tag);
        sr.finish();
        if (!names.contains(s.envelope)) sr.error("envelope", "dangling reference to undefined envelope '" + s.envelope + "'");
        if (s.offset_samples < 0) sr.error("offset_samples", "must be >= 0");
        if (!(s.scale >= -1.0 && s.scale <= 1.0)) sr.error("scale", "must lie in [-1, 1]");
        seq.schedule.push_back(std::move(s));
      }
    }
  }
  r.finish();
  return seq;
}

Json sequence_to_json(const awg::PulseSequence& seq) {
  Json j;
  j["memory_budget_bits"] = seq.memory_budget_bits;
  j["envelopes"] = Json::array();
  for (const auto& e : seq.envelopes) {
    Json codes = Json::array();
    for (const auto c : e.samples) codes.push_back(c);
    j["envelopes"].push_back({{"name", e.name}, {"codes", codes}});
  }
  j["schedule"] = Json::array();
  for (const auto& s : seq.schedule) {
    j["schedule"].push_back(
        {{"envelope", s.envelope}, {"offset_samples", s.offset_samples}, {"scale", s.scale}, {"phase_tag", s.phase_tag}});
  }
  return j;
}

ValidationResult validate_config(const Json& doc, const std::filesystem::path& base_dir) {
  ValidationResult res;
  auto& errs = res.errors;
  ExperimentConfig cfg;
  Json norm;
  ObjectReader root(&doc, "", errs, norm);
  if (!doc.is_object()) return res;

  std::string kind_name;
  if (!doc.contains("experiment")) errs.push_back({"/experiment", "missing required field"});
  root.string("experiment", kind_name);
  if (const auto k = experiment_kind_from_string(kind_name)) {
    cfg.kind = *k;
  } else if (doc.contains("experiment")) {
    root.error("experiment", "unknown experiment kind '" + kind_name + "'");
  }

  if (!doc.contains("seed")) errs.push_back({"/seed", "missing required field (seed is mandatory)"});
  root.integer("seed", cfg.seed);

  std::string budget = "jitter";
  root.string("budget", budget);
  if (const auto b = budget_kind_from_string(budget)) {
    cfg.budget = *b;
  } else {
    root.error("budget", "must be jitter, sfdr or bias");
  }

  std::string format = "csv";
  root.string("format", format);
  if (format == "csv") {
    cfg.format = OutputFormat::kCsv;
  } else if (format == "json-lines") {
    cfg.format = OutputFormat::kJsonLines;
  } else {
    root.error("format", "must be csv or json-lines");
  }

  read_device(root.child("device"), errs, norm["device"], cfg.device);
  read_bvg(root.child("bvg"), errs, norm["bvg"], cfg.bvg);
  read_readout(root.child("readout"), errs, norm["readout"], cfg.readout, cfg.device);
  read_drive(root.child("drive"), errs, norm["drive"], cfg.drive, cfg.kind, cfg.device);
  cfg.drive.bias_set = true;
  read_adc(root.child("adc"), errs, norm["adc"], cfg.adc);
  read_mixer(root.child("mixer"), errs, norm["mixer"], cfg.mixer);
  read_jitter(root.child("jitter"), errs, norm["jitter"], cfg.jitter);

  {
    Json fb;
    ObjectReader r(root.child("feedback"), "/feedback", errs, fb);
    std::string state = "excited";
    r.string("input_state", state);
    r.finish();
    if (state == "excited") {
      cfg.feedback.input_state = dsp::QubitState::kExcited;
    } else if (state == "ground") {
      cfg.feedback.input_state = dsp::QubitState::kGround;
    } else {
      r.error("input_state", "must be ground or excited");
    }
    norm["feedback"] = fb;
  }

  const SweepDefault sd = sweep_default(cfg.kind, cfg.budget, cfg.device);
  cfg.shots = sd.shots;
  root.integer("shots", cfg.shots);
  if (cfg.shots < 1) root.error("shots", "must be >= 1");

  if (sd.name[0] != '\0' || root.has("sweep")) {
    SweepAxis axis{sd.name, sd.start, sd.stop, sd.points};
    Json sj;
    ObjectReader r(root.child("sweep"), "/sweep", errs, sj);
    r.string("name", axis.name);
    r.number("start", axis.start);
    r.number("stop", axis.stop);
    r.integer("points", axis.points);
    r.finish();
    if (axis.points < 1) r.error("points", "must be >= 1");
    if (sd.name[0] == '\0') {
      r.error("", std::string("experiment '") + to_string(cfg.kind) + "' takes no sweep");
    } else if (axis.name != sd.name) {
      r.error("name", std::string("sweep axis for '") + to_string(cfg.kind) + "' must be '" + sd.name + "'");
    }
    cfg.sweep = axis;
    norm["sweep"] = sj;
  }

  if (const Json* t = root.child("topology")) {
    cfg.topology = read_topology(*t, errs);
  } else {
    cfg.topology = default_topology();
  }
  norm["topology"] = topology_to_json(cfg.topology);

  if (const Json* l = root.child("ledger")) cfg.ledger = read_ledger(*l, errs);
  norm["ledger"] = ledger_to_json(cfg.ledger);

  if (const Json* s = root.child("sequence")) {
    if (s->is_string()) {
      const auto path = base_dir / s->get<std::string>();
      std::ifstream in(path);
      if (!in) {
        root.error("sequence", "cannot open sequence file '" + path.string() + "'");
      } else {
        try {
          cfg.sequence = parse_sequence(Json::parse(in), "/sequence", errs);
        } catch (const Json::parse_error& e) {
          root.error("sequence", std::string("sequence file is not valid JSON: ") + e.what());
        }
      }
    } else {
      cfg.sequence = parse_sequence(*s, "/sequence", errs);
    }
  } else {
    cfg.sequence.envelopes.push_back(default_pi_envelope(cfg.drive.pi_envelope));
  }
  norm["sequence"] = sequence_to_json(cfg.sequence);

  const bool needs_pi = cfg.kind == ExperimentKind::kT1 || cfg.kind == ExperimentKind::kRamsey;
  if (needs_pi) {
    bool found = false;
    for (const auto& e : cfg.sequence.envelopes) found = found || e.name == cfg.drive.pi_envelope;
    if (!found) {
      errs.push_back({"/drive/pi_envelope", "dangling reference to undefined envelope '" + cfg.drive.pi_envelope + "'"});
    }
  }
  if (cfg.kind == ExperimentKind::kJitterHistogram) {
    std::set<std::string> ids;
    for (const auto& n : cfg.topology.nodes) ids.insert(n.id);
    for (std::size_t k = 0; k < cfg.jitter.channels.size(); ++k) {
      if (!ids.contains(cfg.jitter.channels[k])) {
        errs.push_back({"/jitter/channels/" + std::to_string(k),
                        "dangling reference to undefined module '" + cfg.jitter.channels[k] + "'"});
      }
    }
    if (!ids.contains(cfg.jitter.daq)) {
      errs.push_back({"/jitter/daq", "dangling reference to undefined module '" + cfg.jitter.daq + "'"});
    }
  }

  root.finish();
  if (!errs.empty()) return res;

  cfg.normalized = norm;
  cfg.hash = fnv1a_hex(norm.dump());
  res.config = std::move(cfg);
  return res;
}

ValidationResult validate_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    ValidationResult r;
    r.errors.push_back({"", "cannot open config file '" + path.string() + "'"});
    return r;
  }
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    ValidationResult r;
    r.errors.push_back({"", std::string("invalid JSON: ") + e.what()});
    return r;
  }
  return validate_config(doc, path.parent_path());
}

}  // namespace qctl::orchestrator
