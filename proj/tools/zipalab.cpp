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

// Command line front end for the zipalab experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zipa/attack.hpp"
#include "zipa/channel.hpp"
#include "zipa/error.hpp"
#include "zipa/experiments.hpp"
#include "zipa/mitigation.hpp"
#include "zipa/wav.hpp"

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) zipa::fail(zipa::Errc::kConfig, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Later settings win: drop any earlier line for the same key.
std::string apply_override(const std::string& text, const std::string& set) {
  auto eq = set.find('=');
  if (eq == std::string::npos) {
    zipa::fail(zipa::Errc::kConfig, "--set expects key=value, got '" + set + "'");
  }
  auto strip = [](std::string s) {
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    return s;
  };
  const std::string key = strip(set.substr(0, eq));
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    std::string body = line.substr(0, line.find('#'));
    auto e = body.find('=');
    if (e != std::string::npos && strip(body.substr(0, e)) == key) continue;
    out += line + "\n";
  }
  return out + key + " = " + strip(set.substr(eq + 1)) + "\n";
}

zipa::ExperimentConfig build_config(const Options& opt, const char* experiment,
                                    bool need_file) {
  std::string text;
  if (!opt.config_path.empty()) {
    text = read_file(opt.config_path);
  } else if (need_file) {
    zipa::fail(zipa::Errc::kConfig, "--config is required");
  } else {
    text = "seed = 0\n";
  }
  if (experiment != nullptr) {
    text = apply_override(text, std::string("experiment=") + experiment);
  }
  for (const std::string& s : opt.overrides) text = apply_override(text, s);
  if (!opt.output.empty()) text = apply_override(text, "output=" + opt.output);
  return zipa::parse_config(text);
}

void print_summary(const std::vector<zipa::ResultRow>& rows) {
  for (const zipa::ResultRow& r : rows) {
    if (r.stat != "mean") continue;
    std::cout << r.experiment << " " << r.variable;
    auto show = [](const char* name, const std::optional<double>& v) {
      if (v) std::printf(" %s=%.4f", name, *v);
    };
    std::cout << std::flush;
    show("ber_adversary", r.ber_adversary);
    show("ber_legit", r.ber_legit);
    show("entropy_bits", r.entropy_bits);
    show("raw_ratio", r.raw_ratio);
    show("deconvolved_ratio", r.deconvolved_ratio);
    std::printf("\n");
    std::fflush(stdout);
  }
}

void emit(const zipa::ExperimentConfig& cfg, const std::vector<zipa::ResultRow>& rows) {
  print_summary(rows);
  if (cfg.output.empty()) {
    std::cout << zipa::to_csv(rows);
  } else {
    zipa::write_results(cfg, rows);
    std::cerr << "wrote " << cfg.output << " and " << cfg.output << ".meta.json\n";
  }
}

void run_synth(const Options& opt, const std::string& what, const std::string& out,
               long phase, double seconds) {
  const zipa::ExperimentConfig cfg = build_config(opt, nullptr, false);
  if (what == "injection" || what == "plan") {
    zipa::InjectionSpec spec;
    spec.grid = cfg.grid;
    spec.a_h = cfg.a_h;
    spec.a_l = cfg.a_l;
    spec.duration_frames = cfg.attack_frames;
    spec.cell_plan = zipa::checkerboard_plan(cfg.attack_frames, cfg.grid.num_bands);
    spec.phase_shift = phase;
    spec.phase_continuous = cfg.phase_continuous;
    if (what == "plan") {
      std::ofstream f(out);
      if (!f) zipa::fail(zipa::Errc::kIo, "cannot write " + out);
      f << zipa::plan_to_text(spec.cell_plan);
      return;
    }
    zipa::write_wav(out, zipa::synthesize(spec, cfg.sample_rate));
  } else if (what == "sweep" || what == "inverse") {
    zipa::SweepPair p = zipa::exp_sweep(cfg.mitigation.sweep, cfg.sample_rate);
    zipa::write_wav(out, what == "sweep" ? p.sweep : p.inverse,
                    zipa::WavEncoding::kFloat32);
  } else if (what == "context") {
    zipa::write_wav(out, zipa::synth_context(cfg.context, seconds, cfg.seed,
                                             cfg.sample_rate, cfg.context_rms));
  } else {
    zipa::fail(zipa::Errc::kInvalidArgument, "unknown synth target '" + what + "'");
  }
  std::cerr << "wrote " << out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ZIPA key generation, injection attack and mitigation laboratory"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config_path, "Experiment config file (key = value)");
  app.add_option("--set", opt.overrides, "Override a config key, key=value")
      ->take_all();
  app.add_option("-o,--output", opt.output, "CSV output path (overrides config)");

  auto* pipeline = app.add_subcommand("pipeline", "Harvest, sync, quantize, reconcile once");
  auto* ber = app.add_subcommand("ber-vs-gain", "Adversary and legit BER per injection level");
  auto* sweep = app.add_subcommand("shift-sweep", "Attack BER as a function of grid offset");
  auto* entropy = app.add_subcommand("entropy", "Entropy of key bits under attack");
  auto* mitig = app.add_subcommand("mitigation", "IR deconvolution separation ratios");
  auto* synth = app.add_subcommand("synth", "Export injection, plan, sweep or context");
  std::string what = "injection", out;
  long phase = 0;
  double seconds = 10.0;
  synth->add_option("what", what, "injection | plan | sweep | inverse | context")
      ->check(CLI::IsMember({"injection", "plan", "sweep", "inverse", "context"}));
  synth->add_option("--out", out, "Output file")->required();
  synth->add_option("--phase", phase, "Injection phase shift in samples");
  synth->add_option("--seconds", seconds, "Context duration");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*pipeline) {
      zipa::ExperimentConfig cfg = build_config(opt, "pipeline_demo", true);
      zipa::PipelineReport rep = zipa::run_pipeline_demo(cfg);
      std::cout << rep.text;
      if (!cfg.output.empty()) zipa::write_results(cfg, zipa::pipeline_rows(rep, cfg));
    } else if (*ber) {
      zipa::ExperimentConfig cfg = build_config(opt, "ber_vs_gain", true);
      emit(cfg, zipa::run_ber_vs_gain(cfg));
    } else if (*sweep) {
      zipa::ExperimentConfig cfg = build_config(opt, "shift_sweep", true);
      emit(cfg, zipa::run_shift_sweep(cfg));
    } else if (*entropy) {
      zipa::ExperimentConfig cfg = build_config(opt, "entropy", true);
      emit(cfg, zipa::run_entropy(cfg));
    } else if (*mitig) {
      zipa::ExperimentConfig cfg = build_config(opt, "mitigation", true);
      emit(cfg, zipa::run_mitigation(cfg));
    } else if (*synth) {
      run_synth(opt, what, out, phase, seconds);
    }
  } catch (const zipa::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
