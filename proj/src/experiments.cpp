// Copyright 2026 The zipalab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zipa/experiments.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "zipa/attack.hpp"
#include "zipa/error.hpp"
#include "zipa/rng.hpp"

namespace zipa {
namespace {

enum Stream : std::uint64_t {
  kSessionContext = 1,
  kSessionChannel = 2,
  kSessionStarts = 3,
  kTrialPhase = 4,
  kRoomIr = 5,
  kAdversaryIr = 6,
  kTrialBase = 1000,
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& value,
                      const std::string& why) {
  fail(Errc::kConfig, key + " = '" + value + "': " + why);
}

double as_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size() || std::isnan(d)) bad(key, v, "not a number");
    return d;
  } catch (const std::logic_error&) {
    bad(key, v, "not a number");
  }
}

long as_long(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    long long d = std::stoll(v, &used);
    if (used != v.size()) bad(key, v, "not an integer");
    return static_cast<long>(d);
  } catch (const std::logic_error&) {
    bad(key, v, "not an integer");
  }
}

std::size_t as_count(const std::string& key, const std::string& v) {
  long d = as_long(key, v);
  if (d < 0) bad(key, v, "must be non-negative");
  return static_cast<std::size_t>(d);
}

std::uint64_t as_seed(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    unsigned long long d = std::stoull(v, &used);
    if (used != v.size() || v.find('-') != std::string::npos) {
      bad(key, v, "not an unsigned integer");
    }
    return d;
  } catch (const std::logic_error&) {
    bad(key, v, "not an unsigned integer");
  }
}

bool as_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, v, "not a boolean");
}

Level as_level(const std::string& key, const std::string& v) {
  if (v == "none") return Level{};
  return Level{as_double(key, v)};
}

Experiment as_experiment(const std::string& key, const std::string& v) {
  for (Experiment e : {Experiment::kBerVsGain, Experiment::kShiftSweep,
                       Experiment::kEntropy, Experiment::kMitigation,
                       Experiment::kPipelineDemo}) {
    if (v == experiment_name(e)) return e;
  }
  bad(key, v, "unknown experiment");
}

std::vector<long> as_shifts(const std::string& key, const std::string& v) {
  std::vector<long> out;
  if (v.find(':') != std::string::npos) {
    std::vector<std::string> p = split(v, ':');
    if (p.size() != 3) bad(key, v, "range is start:stop:step");
    long start = as_long(key, p[0]), stop = as_long(key, p[1]),
         step = as_long(key, p[2]);
    if (step <= 0 || stop < start) bad(key, v, "empty range");
    for (long s = start; s <= stop; s += step) out.push_back(s);
  } else {
    for (const std::string& item : split(v, ',')) out.push_back(as_long(key, item));
  }
  return out;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string levels_text(const std::vector<Level>& levels) {
  std::string out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    out += (i ? ", " : "") + levels[i].label();
  }
  return out;
}

std::string shifts_text(const std::vector<long>& shifts) {
  std::string out;
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    out += (i ? ", " : "") + std::to_string(shifts[i]);
  }
  return out;
}

// Every recognised key with its effective value, in a fixed order.
std::vector<std::pair<std::string, std::string>> effective(const ExperimentConfig& c) {
  const MitigationParams& m = c.mitigation;
  return {
      {"experiment", experiment_name(c.experiment)},
      {"seed", std::to_string(c.seed)},
      {"trials", std::to_string(c.trials)},
      {"output", c.output},
      {"sample_rate", std::to_string(c.sample_rate)},
      {"duration_s", fmt(c.duration_s)},
      {"context", c.context},
      {"context_rms", fmt(c.context_rms)},
      {"grid.frame_len", std::to_string(c.grid.frame_len)},
      {"grid.num_bands", std::to_string(c.grid.num_bands)},
      {"grid.band_lo", fmt(c.grid.band_lo)},
      {"grid.band_hi", fmt(c.grid.band_hi)},
      {"scenario.noise_db", fmt(c.noise_db)},
      {"scenario.wall_db", fmt(c.wall_db)},
      {"scenario.wall_lowpass_hz", fmt(c.wall_lowpass_hz)},
      {"scenario.perturbation_db", fmt(c.perturbation_db)},
      {"scenario.perturbation_len", std::to_string(c.perturbation_len)},
      {"attack.a_h", fmt(c.a_h)},
      {"attack.a_l", fmt(c.a_l)},
      {"attack.frames", std::to_string(c.attack_frames)},
      {"attack.phase_continuous", c.phase_continuous ? "true" : "false"},
      {"attack.random_phase", c.random_phase ? "true" : "false"},
      {"attack.level", c.attack_level.label()},
      {"sync.snippet", std::to_string(c.snippet)},
      {"sync.max_lag", std::to_string(c.max_lag)},
      {"sync.floor", fmt(c.sync_floor)},
      {"key.bits", std::to_string(c.key_bits)},
      {"key.threshold", std::to_string(c.key_threshold)},
      {"levels", levels_text(c.levels)},
      {"calibration", c.calibration.to_string()},
      {"shifts", shifts_text(c.shifts)},
      {"entropy.min_bits", std::to_string(c.entropy_min_bits)},
      {"mitigation.eps", fmt(m.eps)},
      {"mitigation.ir_len", std::to_string(m.ir_len)},
      {"mitigation.compare_lo_hz", fmt(m.compare_lo_hz)},
      {"mitigation.compare_hi_hz", fmt(m.compare_hi_hz)},
      {"mitigation.legit_snr_db", fmt(m.legit_snr_db)},
      {"mitigation.adversary_snr_db", fmt(m.adversary_snr_db)},
      {"mitigation.room_ir_len", std::to_string(c.room_ir_len)},
      {"mitigation.room_rt60_s", fmt(c.room_rt60_s)},
      {"mitigation.adversary_rt60_s", fmt(c.adversary_rt60_s)},
      {"mitigation.min_amplification", fmt(c.min_amplification)},
      {"sweep.f_start", fmt(m.sweep.f_start)},
      {"sweep.f_end", fmt(m.sweep.f_end)},
      {"sweep.duration_s", fmt(m.sweep.duration_s)},
      {"sweep.amplitude", fmt(m.sweep.amplitude)},
      {"sweep.fade_s", fmt(m.sweep.fade_s)},
  };
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"experiment", [](auto& c, auto& k, auto& v) { c.experiment = as_experiment(k, v); }},
      {"seed", [](auto& c, auto& k, auto& v) { c.seed = as_seed(k, v); }},
      {"trials", [](auto& c, auto& k, auto& v) { c.trials = as_count(k, v); }},
      {"output", [](auto& c, auto&, auto& v) { c.output = v; }},
      {"sample_rate", [](auto& c, auto& k, auto& v) { c.sample_rate = static_cast<int>(as_long(k, v)); }},
      {"duration_s", [](auto& c, auto& k, auto& v) { c.duration_s = as_double(k, v); }},
      {"context", [](auto& c, auto&, auto& v) { c.context = v; }},
      {"context_rms", [](auto& c, auto& k, auto& v) { c.context_rms = as_double(k, v); }},
      {"grid.frame_len", [](auto& c, auto& k, auto& v) { c.grid.frame_len = as_count(k, v); }},
      {"grid.num_bands", [](auto& c, auto& k, auto& v) { c.grid.num_bands = as_count(k, v); }},
      {"grid.band_lo", [](auto& c, auto& k, auto& v) { c.grid.band_lo = as_double(k, v); }},
      {"grid.band_hi", [](auto& c, auto& k, auto& v) { c.grid.band_hi = as_double(k, v); }},
      {"scenario.noise_db", [](auto& c, auto& k, auto& v) { c.noise_db = as_double(k, v); }},
      {"scenario.wall_db", [](auto& c, auto& k, auto& v) { c.wall_db = as_double(k, v); }},
      {"scenario.wall_lowpass_hz", [](auto& c, auto& k, auto& v) { c.wall_lowpass_hz = as_double(k, v); }},
      {"scenario.perturbation_db", [](auto& c, auto& k, auto& v) { c.perturbation_db = as_double(k, v); }},
      {"scenario.perturbation_len", [](auto& c, auto& k, auto& v) { c.perturbation_len = as_count(k, v); }},
      {"attack.a_h", [](auto& c, auto& k, auto& v) { c.a_h = as_double(k, v); }},
      {"attack.a_l", [](auto& c, auto& k, auto& v) { c.a_l = as_double(k, v); }},
      {"attack.frames", [](auto& c, auto& k, auto& v) { c.attack_frames = as_count(k, v); }},
      {"attack.phase_continuous", [](auto& c, auto& k, auto& v) { c.phase_continuous = as_bool(k, v); }},
      {"attack.random_phase", [](auto& c, auto& k, auto& v) { c.random_phase = as_bool(k, v); }},
      {"attack.level", [](auto& c, auto& k, auto& v) { c.attack_level = as_level(k, v); }},
      {"sync.snippet", [](auto& c, auto& k, auto& v) { c.snippet = as_count(k, v); }},
      {"sync.max_lag", [](auto& c, auto& k, auto& v) { c.max_lag = as_count(k, v); }},
      {"sync.floor", [](auto& c, auto& k, auto& v) { c.sync_floor = as_double(k, v); }},
      {"key.bits", [](auto& c, auto& k, auto& v) { c.key_bits = as_count(k, v); }},
      {"key.threshold", [](auto& c, auto& k, auto& v) { c.key_threshold = as_count(k, v); }},
      {"levels", [](auto& c, auto& k, auto& v) {
         c.levels.clear();
         for (const std::string& item : split(v, ',')) c.levels.push_back(as_level(k, item));
       }},
      {"calibration", [](auto& c, auto& k, auto& v) {
         try {
           c.calibration = CalibrationTable::parse(v);
         } catch (const Error& e) {
           bad(k, v, e.what());
         }
       }},
      {"shifts", [](auto& c, auto& k, auto& v) { c.shifts = as_shifts(k, v); }},
      {"entropy.min_bits", [](auto& c, auto& k, auto& v) { c.entropy_min_bits = as_count(k, v); }},
      {"mitigation.eps", [](auto& c, auto& k, auto& v) { c.mitigation.eps = as_double(k, v); }},
      {"mitigation.ir_len", [](auto& c, auto& k, auto& v) { c.mitigation.ir_len = as_count(k, v); }},
      {"mitigation.compare_lo_hz", [](auto& c, auto& k, auto& v) { c.mitigation.compare_lo_hz = as_double(k, v); }},
      {"mitigation.compare_hi_hz", [](auto& c, auto& k, auto& v) { c.mitigation.compare_hi_hz = as_double(k, v); }},
      {"mitigation.legit_snr_db", [](auto& c, auto& k, auto& v) { c.mitigation.legit_snr_db = as_double(k, v); }},
      {"mitigation.adversary_snr_db", [](auto& c, auto& k, auto& v) { c.mitigation.adversary_snr_db = as_double(k, v); }},
      {"mitigation.room_ir_len", [](auto& c, auto& k, auto& v) { c.room_ir_len = as_count(k, v); }},
      {"mitigation.room_rt60_s", [](auto& c, auto& k, auto& v) { c.room_rt60_s = as_double(k, v); }},
      {"mitigation.adversary_rt60_s", [](auto& c, auto& k, auto& v) { c.adversary_rt60_s = as_double(k, v); }},
      {"mitigation.min_amplification", [](auto& c, auto& k, auto& v) { c.min_amplification = as_double(k, v); }},
      {"sweep.f_start", [](auto& c, auto& k, auto& v) { c.mitigation.sweep.f_start = as_double(k, v); }},
      {"sweep.f_end", [](auto& c, auto& k, auto& v) { c.mitigation.sweep.f_end = as_double(k, v); }},
      {"sweep.duration_s", [](auto& c, auto& k, auto& v) { c.mitigation.sweep.duration_s = as_double(k, v); }},
      {"sweep.amplitude", [](auto& c, auto& k, auto& v) { c.mitigation.sweep.amplitude = as_double(k, v); }},
      {"sweep.fade_s", [](auto& c, auto& k, auto& v) { c.mitigation.sweep.fade_s = as_double(k, v); }},
  };
  return table;
}

void config_require(bool cond, const std::string& what) {
  if (!cond) fail(Errc::kConfig, what);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

// Appends mean and stderr rows built from the trial rows in [begin, end).
void aggregate(std::vector<ResultRow>& rows, std::size_t begin) {
  const std::size_t end = rows.size();
  if (end == begin) return;
  using Field = std::optional<double> ResultRow::*;
  const Field fields[] = {&ResultRow::ber_adversary, &ResultRow::ber_legit,
                          &ResultRow::entropy_bits, &ResultRow::raw_ratio,
                          &ResultRow::deconvolved_ratio};
  ResultRow mean = rows[begin], err = rows[begin];
  mean.stat = "mean";
  err.stat = "stderr";
  mean.trial.reset();
  err.trial.reset();
  for (Field f : fields) {
    std::vector<double> vals;
    for (std::size_t i = begin; i < end; ++i) {
      if ((rows[i].*f).has_value()) vals.push_back(*(rows[i].*f));
    }
    if (vals.empty()) {
      mean.*f = std::nullopt;
      err.*f = std::nullopt;
    } else {
      mean.*f = mean_of(vals);
      err.*f = stderr_of(vals);
    }
  }
  rows.push_back(mean);
  rows.push_back(err);
}

std::uint64_t trial_seed(const ExperimentConfig& c, std::size_t trial) {
  return derive_seed(c.seed, kTrialBase + trial);
}

std::size_t key_frames(const ExperimentConfig& c) {
  return static_cast<std::size_t>(c.duration_s * c.sample_rate) / c.grid.frame_len;
}

}  // namespace

std::vector<long> default_shifts() {
  std::vector<long> out;
  for (long s = 0; s <= 1024; s += 64) out.push_back(s);
  return out;
}

const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::kBerVsGain: return "ber_vs_gain";
    case Experiment::kShiftSweep: return "shift_sweep";
    case Experiment::kEntropy: return "entropy";
    case Experiment::kMitigation: return "mitigation";
    case Experiment::kPipelineDemo: return "pipeline_demo";
  }
  return "unknown";
}

std::string Level::label() const { return dba ? fmt(*dba) : "none"; }

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  bool have_seed = false;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(Errc::kConfig, "line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end()) {
      fail(Errc::kConfig, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (seen[key]++) {
      fail(Errc::kConfig, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    if (value.empty()) {
      fail(Errc::kConfig, "line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    }
    it->second(c, key, value);
    if (key == "seed") have_seed = true;
  }
  config_require(have_seed, "seed is mandatory");
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::kConfig, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
  config_require(c.trials >= 1, "trials must be at least 1");
  config_require(c.sample_rate > 0, "sample_rate must be positive");
  try {
    validate(c.grid, c.sample_rate);
  } catch (const Error& e) {
    fail(Errc::kConfig, std::string("grid: ") + e.what());
  }
  config_require(c.duration_s > 0.0, "duration_s must be positive");
  config_require(c.context_rms > 0.0, "context_rms must be positive");
  config_require(c.a_h > c.a_l && c.a_l >= 0.0, "need a_h > a_l >= 0");
  config_require(c.attack_frames >= 2, "attack.frames must be at least 2");
  config_require(c.snippet >= 256, "sync.snippet must be at least 256");
  config_require(c.key_bits >= 1, "key.bits must be positive");
  config_require(c.perturbation_len != 1, "scenario.perturbation_len must be 0 or >= 2");
  config_require(std::isfinite(c.wall_db), "scenario.wall_db must be finite");
  auto check_level = [&](const Level& l) {
    if (!l.dba) return;
    try {
      gain_for_level(*l.dba, c.calibration);
    } catch (const Error& e) {
      fail(Errc::kConfig, e.what());
    }
  };
  switch (c.experiment) {
    case Experiment::kBerVsGain:
      config_require(!c.levels.empty(), "levels must not be empty");
      for (const Level& l : c.levels) check_level(l);
      break;
    case Experiment::kShiftSweep: {
      check_level(c.attack_level);
      config_require(c.attack_level.dba.has_value(), "shift_sweep needs an attack level");
      std::vector<long> s = c.shifts;
      std::sort(s.begin(), s.end());
      const long n = static_cast<long>(c.grid.frame_len);
      config_require(!s.empty() && s.front() <= 0 && s.back() >= n - n / 16,
                     "shifts must cover [0, frame_len)");
      for (std::size_t i = 1; i < s.size(); ++i) {
        config_require(s[i] - s[i - 1] <= n / 16, "shift step exceeds frame_len / 16");
      }
      break;
    }
    case Experiment::kEntropy:
      check_level(c.attack_level);
      config_require((key_frames(c) - 1) * (c.grid.num_bands - 1) >= c.entropy_min_bits,
                     "duration too short for entropy.min_bits");
      break;
    case Experiment::kMitigation:
      config_require(c.mitigation.eps > 0.0, "mitigation.eps must be positive");
      config_require(c.mitigation.sweep.f_start <= c.mitigation.compare_lo_hz &&
                         c.mitigation.compare_lo_hz < c.mitigation.compare_hi_hz &&
                         c.mitigation.compare_hi_hz <= c.mitigation.sweep.f_end,
                     "comparison band must lie inside the sweep band");
      config_require(c.room_ir_len >= 1, "mitigation.room_ir_len must be positive");
      config_require(c.room_rt60_s > 0.0 && c.adversary_rt60_s > 0.0,
                     "RT60 values must be positive");
      break;
    case Experiment::kPipelineDemo:
      check_level(c.attack_level);
      break;
  }
}

std::optional<double> level_gain_db(const ExperimentConfig& c, const Level& level) {
  if (!level.dba) return std::nullopt;
  return gain_for_level(*level.dba, c.calibration);
}

void validate(const ResultRow& r) {
  auto rate = [](const std::optional<double>& v, const char* name) {
    if (v && !(*v >= 0.0 && *v <= 1.0)) {
      fail(Errc::kInvalidArgument, std::string(name) + " outside [0, 1]");
    }
  };
  rate(r.ber_adversary, "ber_adversary");
  rate(r.ber_legit, "ber_legit");
  if (r.entropy_bits && !(*r.entropy_bits >= 0.0 && *r.entropy_bits <= 8.0)) {
    fail(Errc::kInvalidArgument, "entropy_bits outside [0, 8]");
  }
  for (const auto& v : {r.raw_ratio, r.deconvolved_ratio}) {
    if (v && !(std::isfinite(*v) && *v >= 0.0)) {
      fail(Errc::kInvalidArgument, "ratio must be finite and non-negative");
    }
  }
  if (r.stat != "trial" && r.stat != "mean" && r.stat != "stderr") {
    fail(Errc::kInvalidArgument, "unknown stat '" + r.stat + "'");
  }
  if (r.experiment.empty()) fail(Errc::kInvalidArgument, "missing experiment id");
}

std::string csv_header() {
  return "experiment,stat,trial,variable,gain_db,ber_adversary,ber_legit,"
         "entropy_bits,raw_ratio,deconvolved_ratio\n";
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header();
  auto num = [](const std::optional<double>& v) {
    if (!v) return std::string();
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", *v);
    return std::string(buf);
  };
  for (const ResultRow& r : rows) {
    validate(r);
    out += r.experiment + "," + r.stat + "," +
           (r.trial ? std::to_string(*r.trial) : "") + "," + r.variable + "," +
           num(r.gain_db) + "," + num(r.ber_adversary) + "," + num(r.ber_legit) +
           "," + num(r.entropy_bits) + "," + num(r.raw_ratio) + "," +
           num(r.deconvolved_ratio) + "\n";
  }
  return out;
}

long trial_phase(const ExperimentConfig& c, std::size_t trial) {
  if (!c.random_phase) return 0;
  Rng rng(derive_seed(c.seed, kTrialPhase));
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  // Stratified over the frame so few trials still cover every offset.
  const double n = static_cast<double>(c.grid.frame_len);
  long p = static_cast<long>(std::floor((trial + u) * n / c.trials));
  return p % static_cast<long>(c.grid.frame_len);
}

SessionKeys run_session(const ExperimentConfig& c, std::optional<double> gain_db,
                        long phase, std::uint64_t seed) {
  const std::size_t n = c.grid.frame_len;
  const std::size_t frames = key_frames(c);
  if (frames < 2) fail(Errc::kInsufficientFrames, "duration shorter than two frames");
  const std::size_t key_len = frames * n;
  const std::size_t lag = c.max_lag;
  const std::size_t view = std::max(key_len, c.snippet) + lag;
  const std::size_t lead = lag;
  const std::size_t total = lead + view;

  ChannelScenario s;
  s.context = synth_context(c.context, static_cast<double>(total) / c.sample_rate,
                            derive_seed(seed, kSessionContext), c.sample_rate,
                            c.context_rms);
  if (s.context.size() < total) {
    fail(Errc::kInsufficientData, "context shorter than the session");
  }
  s.context.samples.resize(total);
  s.legit_ir = ImpulseResponse::unit(s.context.sample_rate);
  s.adversary_ir = ImpulseResponse::unit(s.context.sample_rate);
  s.noise_db = c.noise_db;
  s.wall_db = c.wall_db;
  s.wall_lowpass_hz = c.wall_lowpass_hz;
  s.perturbation_db = c.perturbation_db;
  s.perturbation_len = c.perturbation_len;
  s.seed = derive_seed(seed, kSessionChannel);

  if (gain_db) {
    InjectionSpec spec;
    spec.grid = c.grid;
    spec.a_h = c.a_h;
    spec.a_l = c.a_l;
    spec.duration_frames = c.attack_frames;
    spec.cell_plan = checkerboard_plan(c.attack_frames, c.grid.num_bands);
    spec.phase_continuous = c.phase_continuous;
    // Rotate so that legit_a, whose view starts at lead, sees the cells
    // phase samples late.
    const long period = static_cast<long>(c.attack_frames * n);
    long k = (static_cast<long>(lead) + phase) % period;
    if (k < 0) k += period;
    spec.phase_shift = k;
    s.injection = synthesize(spec, c.sample_rate);
    s.injection_gain_db = *gain_db;
  }
  const DeviceRecording rec = simulate(s);

  Rng rng(derive_seed(seed, kSessionStarts));
  std::uniform_int_distribution<std::size_t> start(0, lag);
  const std::size_t d_b = start(rng), d_c = start(rng);
  const SampleBuffer a = slice(rec.legit_a, lead, view);
  const SampleBuffer b = slice(rec.legit_b, lead - d_b, view);
  const SampleBuffer adv = slice(rec.adversary, lead - d_c, view);
  const SampleBuffer snippet = slice(a, 0, c.snippet);

  SessionKeys out;
  out.frames = frames;
  out.sync_b = synchronize(b, snippet, lag, c.sync_floor);
  // The adversary keeps its best guess even when correlation is poor.
  out.sync_adversary = synchronize(adv, snippet, lag, -1.0);
  out.legit_a = quantize(energy_matrix(slice(a, 0, key_len), c.grid));
  out.legit_b = quantize(energy_matrix(
      slice(b, static_cast<std::size_t>(out.sync_b.offset), key_len), c.grid));
  out.adversary = quantize(energy_matrix(
      slice(adv, static_cast<std::size_t>(out.sync_adversary.offset), key_len), c.grid));
  return out;
}

BitSequence window_keys(const BitSequence& bits, std::size_t bands,
                        std::size_t key_bits) {
  require(bands >= 2 && key_bits >= 1, "bad window geometry");
  const std::size_t row = bands - 1;
  const std::size_t rows_per_window = (key_bits + row - 1) / row;
  // A window of W frames yields W - 1 rows; the row linking two windows is
  // not part of either key.
  const std::size_t stride = rows_per_window + 1;
  const std::size_t total_rows = bits.size() / row;
  BitSequence out;
  for (std::size_t w = 0; (w + 1) * stride <= total_rows + 1; ++w) {
    std::size_t first = w * stride * row;
    out.bits.insert(out.bits.end(), bits.bits.begin() + first,
                    bits.bits.begin() + first + key_bits);
  }
  return out;
}

std::vector<ResultRow> run_ber_vs_gain(const ExperimentConfig& c) {
  validate(c);
  config_require(!c.levels.empty(), "levels must not be empty");
  std::vector<ResultRow> rows;
  for (const Level& level : c.levels) {
    const std::optional<double> g = level_gain_db(c, level);
    const std::size_t begin = rows.size();
    for (std::size_t t = 0; t < c.trials; ++t) {
      SessionKeys k = run_session(c, g, trial_phase(c, t), trial_seed(c, t));
      ResultRow r;
      r.experiment = experiment_name(Experiment::kBerVsGain);
      r.trial = static_cast<long>(t);
      r.variable = level.label();
      r.gain_db = g;
      r.ber_adversary = bit_error_rate(k.adversary, k.legit_a);
      r.ber_legit = bit_error_rate(k.legit_b, k.legit_a);
      rows.push_back(r);
    }
    aggregate(rows, begin);
  }
  return rows;
}

std::vector<ResultRow> run_shift_sweep(const ExperimentConfig& c) {
  validate(c);
  const std::optional<double> g = level_gain_db(c, c.attack_level);
  config_require(g.has_value(), "shift_sweep needs an attack level");
  const CellPlan plan = checkerboard_plan(c.attack_frames, c.grid.num_bands);
  std::vector<ResultRow> rows;
  for (long s : c.shifts) {
    const std::size_t begin = rows.size();
    for (std::size_t t = 0; t < c.trials; ++t) {
      SessionKeys k = run_session(c, g, s, trial_seed(c, t));
      BitSequence expected = predicted_bits(plan, k.frames, s, c.grid.frame_len);
      ResultRow r;
      r.experiment = experiment_name(Experiment::kShiftSweep);
      r.trial = static_cast<long>(t);
      r.variable = std::to_string(s);
      r.gain_db = g;
      r.ber_adversary = bit_error_rate(expected, k.legit_a);
      r.ber_legit = bit_error_rate(k.legit_b, k.legit_a);
      rows.push_back(r);
    }
    aggregate(rows, begin);
  }
  return rows;
}

std::vector<ResultRow> run_entropy(const ExperimentConfig& c) {
  validate(c);
  const std::optional<double> g = level_gain_db(c, c.attack_level);
  std::vector<ResultRow> rows;
  for (std::size_t t = 0; t < c.trials; ++t) {
    SessionKeys k = run_session(c, g, trial_phase(c, t), trial_seed(c, t));
    BitSequence keys = window_keys(k.legit_a, c.grid.num_bands, c.key_bits);
    if (keys.size() < c.entropy_min_bits) {
      fail(Errc::kInsufficientData, std::to_string(keys.size()) + " key bits, need " +
                                        std::to_string(c.entropy_min_bits));
    }
    ResultRow r;
    r.experiment = experiment_name(Experiment::kEntropy);
    r.trial = static_cast<long>(t);
    r.variable = c.attack_level.label();
    r.gain_db = g;
    r.ber_adversary = bit_error_rate(k.adversary, k.legit_a);
    r.ber_legit = bit_error_rate(k.legit_b, k.legit_a);
    r.entropy_bits = entropy_per_symbol(keys, 8);
    rows.push_back(r);
  }
  aggregate(rows, 0);
  return rows;
}

ChannelScenario mitigation_scenario(const ExperimentConfig& c, std::uint64_t seed) {
  ChannelScenario s;
  s.context = synth_context(c.context, c.duration_s, derive_seed(seed, kSessionContext),
                            c.sample_rate, c.context_rms);
  s.legit_ir = synth_room_ir(c.room_ir_len, c.room_rt60_s, derive_seed(seed, kRoomIr),
                             c.sample_rate);
  s.adversary_ir = synth_room_ir(c.room_ir_len, c.adversary_rt60_s,
                                 derive_seed(seed, kAdversaryIr), c.sample_rate);
  s.noise_db = c.noise_db;
  s.wall_db = c.wall_db;
  s.wall_lowpass_hz = c.wall_lowpass_hz;
  s.perturbation_db = c.perturbation_db;
  s.perturbation_len = c.perturbation_len;
  s.seed = derive_seed(seed, kSessionChannel);
  return s;
}

std::vector<ResultRow> run_mitigation(const ExperimentConfig& c) {
  validate(c);
  std::vector<ResultRow> rows;
  for (std::size_t t = 0; t < c.trials; ++t) {
    MitigationResult m = mitigation_experiment(mitigation_scenario(c, trial_seed(c, t)),
                                               c.mitigation);
    ResultRow r;
    r.experiment = experiment_name(Experiment::kMitigation);
    r.trial = static_cast<long>(t);
    r.variable = "adversary_snr_db=" + fmt(c.mitigation.adversary_snr_db);
    r.raw_ratio = m.raw_ratio;
    r.deconvolved_ratio = m.deconvolved_ratio;
    rows.push_back(r);
  }
  aggregate(rows, 0);
  return rows;
}

PipelineReport run_pipeline_demo(const ExperimentConfig& c) {
  validate(c);
  const std::optional<double> g = level_gain_db(c, c.attack_level);
  PipelineReport rep;
  rep.keys = run_session(c, g, trial_phase(c, 0), trial_seed(c, 0));
  const SessionKeys& k = rep.keys;
  rep.ber_legit = bit_error_rate(k.legit_b, k.legit_a);
  rep.ber_adversary = bit_error_rate(k.adversary, k.legit_a);
  // The session threshold scales the per-key threshold to the session length.
  const std::size_t threshold =
      k.legit_a.size() * c.key_threshold / c.key_bits;
  rep.legit = reconcile(k.legit_a, k.legit_b, threshold);
  rep.adversary = reconcile(k.legit_a, k.adversary, threshold);

  const BitSequence wa = window_keys(k.legit_a, c.grid.num_bands, c.key_bits);
  const BitSequence wb = window_keys(k.legit_b, c.grid.num_bands, c.key_bits);
  const BitSequence wc = window_keys(k.adversary, c.grid.num_bands, c.key_bits);
  rep.windows = wa.size() / c.key_bits;
  for (std::size_t w = 0; w < rep.windows; ++w) {
    auto cut = [&](const BitSequence& s) {
      BitSequence out;
      out.bits.assign(s.bits.begin() + w * c.key_bits,
                      s.bits.begin() + (w + 1) * c.key_bits);
      return out;
    };
    rep.windows_accepted_legit += reconcile(cut(wa), cut(wb), c.key_threshold).accepted;
    rep.windows_accepted_adversary += reconcile(cut(wa), cut(wc), c.key_threshold).accepted;
  }

  std::ostringstream out;
  out << "harvest      : " << fmt(c.duration_s) << " s of " << c.context << " context, attack "
      << c.attack_level.label();
  if (g) out << " (" << fmt(*g) << " dB)";
  out << "\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf), "synchronize  : legit_b offset %ld r=%.4f, adversary offset %ld r=%.4f\n",
                k.sync_b.offset, k.sync_b.correlation, k.sync_adversary.offset,
                k.sync_adversary.correlation);
  out << buf;
  std::snprintf(buf, sizeof(buf), "quantize     : %zu frames -> %zu bits, legit BER %.4f, adversary BER %.4f\n",
                k.frames, k.legit_a.size(), rep.ber_legit, rep.ber_adversary);
  out << buf;
  out << "key legit_a  : " << to_hex(k.legit_a).substr(0, 32) << "...\n";
  auto verdict = [](const ReconciliationOutcome& o) {
    return std::string(o.accepted ? "accepted" : "rejected") + " (" +
           std::to_string(o.mismatched_bits) + " mismatches, threshold " +
           std::to_string(o.threshold) + ")";
  };
  out << "reconcile    : legit_b " << verdict(rep.legit) << "\n";
  out << "reconcile    : adversary " << verdict(rep.adversary) << "\n";
  out << "windows      : " << rep.windows << " keys of " << c.key_bits << " bits, legit_b accepted "
      << rep.windows_accepted_legit << ", adversary accepted " << rep.windows_accepted_adversary
      << " (threshold " << c.key_threshold << ")\n";
  rep.text = out.str();
  return rep;
}

std::vector<ResultRow> pipeline_rows(const PipelineReport& rep, const ExperimentConfig& c) {
  ResultRow r;
  r.experiment = experiment_name(Experiment::kPipelineDemo);
  r.trial = 0;
  r.variable = c.attack_level.label();
  r.gain_db = level_gain_db(c, c.attack_level);
  r.ber_adversary = rep.ber_adversary;
  r.ber_legit = rep.ber_legit;
  return {r};
}

std::string config_hash(const ExperimentConfig& c) {
  std::string text;
  for (const auto& [k, v] : effective(c)) text += k + "=" + v + "\n";
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

void write_results(const ExperimentConfig& c, const std::vector<ResultRow>& rows) {
  config_require(!c.output.empty(), "output path is empty");
  const std::string csv = to_csv(rows);
  {
    std::ofstream f(c.output, std::ios::binary);
    if (!f) fail(Errc::kIo, "cannot write " + c.output);
    f << csv;
  }
  nlohmann::ordered_json meta;
  meta["experiment"] = experiment_name(c.experiment);
  meta["config_hash"] = config_hash(c);
  meta["seed"] = c.seed;
  meta["rows"] = rows.size();
  nlohmann::ordered_json cfg;
  for (const auto& [k, v] : effective(c)) cfg[k] = v;
  meta["config"] = cfg;
  std::ofstream f(c.output + ".meta.json", std::ios::binary);
  if (!f) fail(Errc::kIo, "cannot write " + c.output + ".meta.json");
  f << meta.dump(2) << "\n";
}

}  // namespace zipa
