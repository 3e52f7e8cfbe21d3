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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "zipa/attack.hpp"
#include "zipa/channel.hpp"
#include "zipa/dsp.hpp"
#include "zipa/error.hpp"
#include "zipa/experiments.hpp"
#include "zipa/mitigation.hpp"
#include "zipa/protocol.hpp"
#include "zipa/quantizer.hpp"
#include "zipa/wav.hpp"

namespace py = pybind11;

namespace {

using Doubles = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Bits = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using Cells = py::array_t<bool, py::array::c_style | py::array::forcecast>;

zipa::SampleBuffer to_buffer(const Doubles& a, int rate) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
  zipa::SampleBuffer b(std::vector<double>(a.data(), a.data() + a.size()), rate);
  zipa::validate(b);
  return b;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

zipa::BitSequence to_bits(const Bits& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D bit array");
  zipa::BitSequence b;
  b.bits.assign(a.data(), a.data() + a.size());
  for (auto& v : b.bits) v = v ? 1 : 0;
  return b;
}

py::array_t<std::uint8_t> from_bits(const zipa::BitSequence& b) {
  return py::array_t<std::uint8_t>(static_cast<py::ssize_t>(b.size()), b.bits.data());
}

zipa::GridParams grid(std::size_t frame_len, std::size_t num_bands, double lo, double hi) {
  zipa::GridParams g;
  g.frame_len = frame_len;
  g.num_bands = num_bands;
  g.band_lo = lo;
  g.band_hi = hi;
  return g;
}

zipa::CellPlan to_plan(const Cells& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D plan");
  zipa::CellPlan p(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    for (py::ssize_t j = 0; j < a.shape(1); ++j) p.set(i, j, r(i, j));
  }
  return p;
}

py::array_t<bool> from_plan(const zipa::CellPlan& p) {
  py::array_t<bool> out({p.frames(), p.bands()});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < p.frames(); ++i) {
    for (std::size_t j = 0; j < p.bands(); ++j) w(i, j) = p(i, j);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "ZIPA key generation, injection attack and mitigation laboratory";
  py::register_exception<zipa::Error>(m, "ZipaError", PyExc_ValueError);

  m.def("energy_matrix",
        [](const Doubles& x, int sample_rate, std::size_t frame_len, std::size_t num_bands,
           double band_lo, double band_hi) {
          zipa::EnergyMatrix e = zipa::energy_matrix(
              to_buffer(x, sample_rate), grid(frame_len, num_bands, band_lo, band_hi));
          py::array_t<double> out({e.frames(), e.bands()});
          std::copy(e.values().begin(), e.values().end(), out.mutable_data());
          return out;
        },
        py::arg("samples"), py::arg("sample_rate") = 48000, py::arg("frame_len") = 1024,
        py::arg("num_bands") = 16, py::arg("band_lo") = 1000.0, py::arg("band_hi") = 9000.0);

  m.def("quantize",
        [](const Doubles& e) {
          if (e.ndim() != 2) throw py::value_error("expected a 2-D energy matrix");
          zipa::EnergyMatrix mat(e.shape(0), e.shape(1),
                                 std::vector<double>(e.data(), e.data() + e.size()));
          return from_bits(zipa::quantize(mat));
        },
        py::arg("energy"));

  m.def("bit_error_rate",
        [](const Bits& a, const Bits& b) { return zipa::bit_error_rate(to_bits(a), to_bits(b)); });
  m.def("to_hex", [](const Bits& a) { return zipa::to_hex(to_bits(a)); });
  m.def("from_hex", [](const std::string& h, std::size_t n) { return from_bits(zipa::from_hex(h, n)); });

  m.def("synchronize",
        [](const Doubles& local, const Doubles& snippet, std::size_t max_lag, double floor,
           int sample_rate) {
          zipa::SyncResult r = zipa::synchronize(to_buffer(local, sample_rate),
                                                 to_buffer(snippet, sample_rate), max_lag, floor);
          return py::make_tuple(r.offset, r.correlation);
        },
        py::arg("local"), py::arg("snippet"), py::arg("max_lag"), py::arg("floor") = 0.5,
        py::arg("sample_rate") = 48000);

  m.def("reconcile",
        [](const Bits& a, const Bits& b, std::size_t threshold) {
          zipa::ReconciliationOutcome o = zipa::reconcile(to_bits(a), to_bits(b), threshold);
          py::dict d;
          d["accepted"] = o.accepted;
          d["mismatched_bits"] = o.mismatched_bits;
          d["threshold"] = o.threshold;
          return d;
        });
  m.def("entropy_per_symbol",
        [](const Bits& a, std::size_t symbol_bits) {
          return zipa::entropy_per_symbol(to_bits(a), symbol_bits);
        },
        py::arg("bits"), py::arg("symbol_bits") = 8);

  m.def("checkerboard_plan",
        [](std::size_t f, std::size_t b) { return from_plan(zipa::checkerboard_plan(f, b)); });
  m.def("plan_for_target",
        [](const Bits& t, std::size_t f, std::size_t b) {
          return from_plan(zipa::plan_for_target(to_bits(t), f, b));
        });
  m.def("predicted_bits",
        [](const Cells& plan, std::size_t frames, long shift, std::size_t frame_len) {
          return from_bits(zipa::predicted_bits(to_plan(plan), frames, shift, frame_len));
        },
        py::arg("plan"), py::arg("frames"), py::arg("shift") = 0, py::arg("frame_len") = 1024);
  m.def("synthesize",
        [](const Cells& plan, double a_h, double a_l, long phase_shift, bool phase_continuous,
           int sample_rate, std::size_t frame_len, double band_lo, double band_hi) {
          zipa::InjectionSpec s;
          s.cell_plan = to_plan(plan);
          s.grid = grid(frame_len, s.cell_plan.bands(), band_lo, band_hi);
          s.a_h = a_h;
          s.a_l = a_l;
          s.duration_frames = s.cell_plan.frames();
          s.phase_shift = phase_shift;
          s.phase_continuous = phase_continuous;
          return to_array(zipa::synthesize(s, sample_rate).samples);
        },
        py::arg("plan"), py::arg("a_h") = 0.5, py::arg("a_l") = 0.0, py::arg("phase_shift") = 0,
        py::arg("phase_continuous") = false, py::arg("sample_rate") = 48000,
        py::arg("frame_len") = 1024, py::arg("band_lo") = 1000.0, py::arg("band_hi") = 9000.0);
  m.def("shift", [](const Doubles& x, long k) {
    return to_array(zipa::shift(to_buffer(x, 48000), k).samples);
  });

  m.def("convolve",
        [](const Doubles& x, const Doubles& h) {
          zipa::ImpulseResponse ir{to_buffer(h, 48000).samples, 48000};
          return to_array(zipa::convolve(to_buffer(x, 48000), ir).samples);
        });
  m.def("synth_context",
        [](const std::string& kind, double duration_s, std::uint64_t seed, int sample_rate,
           double level_rms) {
          return to_array(zipa::synth_context(kind, duration_s, seed, sample_rate, level_rms).samples);
        },
        py::arg("kind"), py::arg("duration_s"), py::arg("seed"), py::arg("sample_rate") = 48000,
        py::arg("level_rms") = 0.1);
  m.def("gain_for_level",
        [](double level, const std::optional<std::map<double, double>>& table) {
          return zipa::gain_for_level(level, table ? zipa::CalibrationTable(*table)
                                                   : zipa::CalibrationTable::shipped());
        },
        py::arg("level_dba"), py::arg("table") = py::none());

  m.def("exp_sweep",
        [](double f_start, double f_end, double duration_s, double amplitude, int sample_rate) {
          zipa::SweepSpec s;
          s.f_start = f_start;
          s.f_end = f_end;
          s.duration_s = duration_s;
          s.amplitude = amplitude;
          zipa::SweepPair p = zipa::exp_sweep(s, sample_rate);
          return py::make_tuple(to_array(p.sweep.samples), to_array(p.inverse.samples));
        },
        py::arg("f_start") = 20.0, py::arg("f_end") = 23900.0, py::arg("duration_s") = 2.0,
        py::arg("amplitude") = 0.5, py::arg("sample_rate") = 48000);
  m.def("estimate_ir",
        [](const Doubles& rec, const Doubles& inv, std::size_t ir_len) {
          return to_array(zipa::estimate_ir(to_buffer(rec, 48000), to_buffer(inv, 48000), ir_len).taps);
        },
        py::arg("recorded"), py::arg("inverse"), py::arg("ir_len") = 4096);
  m.def("deconvolve",
        [](const Doubles& rec, const Doubles& h, double eps) {
          zipa::ImpulseResponse ir{to_buffer(h, 48000).samples, 48000};
          return to_array(zipa::deconvolve(to_buffer(rec, 48000), ir, eps).samples);
        },
        py::arg("recording"), py::arg("ir"), py::arg("eps"));
  m.def("rms_distance", [](const Doubles& a, const Doubles& b) {
    return zipa::rms_distance(to_buffer(a, 48000), to_buffer(b, 48000));
  });

  m.def("read_wav", [](const std::string& path) {
    zipa::SampleBuffer b = zipa::read_wav(path);
    return py::make_tuple(to_array(b.samples), b.sample_rate);
  });
  m.def("write_wav",
        [](const std::string& path, const Doubles& x, int sample_rate, bool float32) {
          zipa::write_wav(path, to_buffer(x, sample_rate),
                          float32 ? zipa::WavEncoding::kFloat32 : zipa::WavEncoding::kPcm16);
        },
        py::arg("path"), py::arg("samples"), py::arg("sample_rate") = 48000,
        py::arg("float32") = false);

  m.def("run_experiment",
        [](const std::string& config_text) {
          zipa::ExperimentConfig c = zipa::parse_config(config_text);
          std::vector<zipa::ResultRow> rows;
          py::gil_scoped_release release;
          switch (c.experiment) {
            case zipa::Experiment::kBerVsGain: rows = zipa::run_ber_vs_gain(c); break;
            case zipa::Experiment::kShiftSweep: rows = zipa::run_shift_sweep(c); break;
            case zipa::Experiment::kEntropy: rows = zipa::run_entropy(c); break;
            case zipa::Experiment::kMitigation: rows = zipa::run_mitigation(c); break;
            case zipa::Experiment::kPipelineDemo:
              rows = zipa::pipeline_rows(zipa::run_pipeline_demo(c), c);
              break;
          }
          return zipa::to_csv(rows);
        },
        py::arg("config_text"), "Runs the configured experiment and returns its CSV.");
  m.def("pipeline_report",
        [](const std::string& config_text) {
          return zipa::run_pipeline_demo(zipa::parse_config(config_text)).text;
        },
        py::arg("config_text"));
}
