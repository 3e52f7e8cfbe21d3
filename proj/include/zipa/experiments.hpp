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

#ifndef ZIPA_EXPERIMENTS_HPP_
#define ZIPA_EXPERIMENTS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zipa/channel.hpp"
#include "zipa/dsp.hpp"
#include "zipa/mitigation.hpp"
#include "zipa/protocol.hpp"
#include "zipa/quantizer.hpp"

namespace zipa {

enum class Experiment { kBerVsGain, kShiftSweep, kEntropy, kMitigation,
                        kPipelineDemo };

const char* experiment_name(Experiment e);

// One entry of a level list: a calibrated dBA level, or "none".
struct Level {
  std::optional<double> dba;
  std::string label() const;
};

// 0, 64, ..., 1024.
std::vector<long> default_shifts();

struct ExperimentConfig {
  Experiment experiment = Experiment::kPipelineDemo;
  std::uint64_t seed = 0;
  std::size_t trials = 1;
  std::string output;

  int sample_rate = 48000;
  GridParams grid;
  double duration_s = 60.0;
  std::string context = "speech_like";
  double context_rms = 0.1;

  double noise_db = -35.0;
  double wall_db = -40.0;
  double wall_lowpass_hz = 2000.0;
  double perturbation_db = -25.0;
  std::size_t perturbation_len = 32;

  double a_h = 0.5;
  double a_l = 0.0;
  std::size_t attack_frames = 64;
  bool phase_continuous = false;
  // Draw the injection's grid offset per trial; off means aligned.
  bool random_phase = true;

  std::size_t snippet = 48000;
  std::size_t max_lag = 96000;
  double sync_floor = 0.5;

  std::size_t key_bits = 128;
  std::size_t key_threshold = 20;

  std::vector<Level> levels{Level{}, Level{50.0}, Level{70.0}, Level{85.0},
                            Level{95.0}};
  CalibrationTable calibration = CalibrationTable::shipped();
  // The attack level used by shift_sweep, entropy and pipeline_demo.
  Level attack_level{95.0};
  std::vector<long> shifts = default_shifts();
  std::size_t entropy_min_bits = 12300;

  MitigationParams mitigation;
  std::size_t room_ir_len = 2048;
  double room_rt60_s = 0.1;
  double adversary_rt60_s = 0.15;
  double min_amplification = 1.5;

};

// Parses "key = value" lines; '#' starts a comment. Unknown keys, bad
// values and missing seed throw kConfig before any computation.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Re-validates after programmatic edits.
void validate(const ExperimentConfig& config);

std::optional<double> level_gain_db(const ExperimentConfig& config,
                                    const Level& level);

struct ResultRow {
  std::string experiment;
  std::string stat = "trial";  // trial, mean or stderr
  std::optional<long> trial;
  std::string variable;
  std::optional<double> gain_db;
  std::optional<double> ber_adversary;
  std::optional<double> ber_legit;
  std::optional<double> entropy_bits;
  std::optional<double> raw_ratio;
  std::optional<double> deconvolved_ratio;
};

void validate(const ResultRow& row);
std::string csv_header();
std::string to_csv(const std::vector<ResultRow>& rows);

struct SessionKeys {
  BitSequence legit_a;
  BitSequence legit_b;
  BitSequence adversary;
  SyncResult sync_b;
  SyncResult sync_adversary;
  std::size_t frames = 0;
};

// One simulated session: the context, an optional checkerboard injection
// whose cells sit phase samples late on legit_a's grid, random device start
// offsets, then synchronization and quantization of all three devices.
SessionKeys run_session(const ExperimentConfig& config,
                        std::optional<double> gain_db, long phase,
                        std::uint64_t seed);

// Injection phase of a trial.
long trial_phase(const ExperimentConfig& config, std::size_t trial);

// Consecutive key_bits-wide keys cut from windows of whole frames.
BitSequence window_keys(const BitSequence& bits, std::size_t bands,
                        std::size_t key_bits);

std::vector<ResultRow> run_ber_vs_gain(const ExperimentConfig& config);
std::vector<ResultRow> run_shift_sweep(const ExperimentConfig& config);
std::vector<ResultRow> run_entropy(const ExperimentConfig& config);
std::vector<ResultRow> run_mitigation(const ExperimentConfig& config);

struct PipelineReport {
  SessionKeys keys;
  double ber_legit = 0.0;
  double ber_adversary = 0.0;
  ReconciliationOutcome legit;
  ReconciliationOutcome adversary;
  std::size_t windows = 0;
  std::size_t windows_accepted_legit = 0;
  std::size_t windows_accepted_adversary = 0;
  std::string text;
};

PipelineReport run_pipeline_demo(const ExperimentConfig& config);
std::vector<ResultRow> pipeline_rows(const PipelineReport& report,
                                     const ExperimentConfig& config);

// Mitigation scenario for one trial seed.
ChannelScenario mitigation_scenario(const ExperimentConfig& config,
                                    std::uint64_t seed);

std::string config_hash(const ExperimentConfig& config);
// Writes the CSV and a <output>.meta.json sidecar.
void write_results(const ExperimentConfig& config,
                   const std::vector<ResultRow>& rows);

}  // namespace zipa

#endif  // ZIPA_EXPERIMENTS_HPP_
