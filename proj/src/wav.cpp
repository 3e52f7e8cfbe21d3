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

#include "zipa/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>

#include "zipa/error.hpp"

namespace zipa {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

}  // namespace

SampleBuffer read_wav(const std::string& path,
                      std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kIo, "cannot open " + path);
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0) {
    fail(Errc::kParseError, path + ": not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* payload = nullptr;
  std::size_t payload_len = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const unsigned char* chunk = data.data() + pos;
    std::uint32_t len = get_u32(chunk + 4);
    std::size_t body = pos + 8;
    if (body + len > data.size()) {
      // Tolerate a truncated data chunk, reject anything else.
      if (std::memcmp(chunk, "data", 4) != 0) {
        fail(Errc::kParseError, path + ": chunk overruns file");
      }
      len = static_cast<std::uint32_t>(data.size() - body);
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16) fail(Errc::kParseError, path + ": short fmt chunk");
      const unsigned char* f = data.data() + body;
      format = get_u16(f);
      channels = get_u16(f + 2);
      rate = get_u32(f + 4);
      bits = get_u16(f + 14);
      if (format == kFormatExtensible) {
        if (len < 40) fail(Errc::kParseError, path + ": short extensible fmt");
        format = get_u16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      payload = data.data() + body;
      payload_len = len;
    }
    pos = body + len + (len & 1);
  }
  if (!have_fmt || payload == nullptr) {
    fail(Errc::kParseError, path + ": missing fmt or data chunk");
  }
  if (channels == 0 || rate == 0) {
    fail(Errc::kParseError, path + ": zero channels or sample rate");
  }
  bool pcm16 = format == kFormatPcm && bits == 16;
  bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32) {
    fail(Errc::kUnsupportedFormat,
         path + ": format " + std::to_string(format) + " with " +
             std::to_string(bits) + " bits");
  }
  if (channels > 1) {
    std::string msg = path + ": " + std::to_string(channels) +
                      " channels, keeping channel 0";
    if (warnings != nullptr) {
      warnings->push_back(msg);
    } else {
      std::cerr << "warning: " << msg << "\n";
    }
  }

  const std::size_t width = bits / 8;
  const std::size_t stride = width * channels;
  const std::size_t count = payload_len / stride;
  SampleBuffer out;
  out.sample_rate = static_cast<int>(rate);
  out.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned char* p = payload + i * stride;
    if (pcm16) {
      auto v = static_cast<std::int16_t>(get_u16(p));
      out.samples[i] = v / 32768.0;
    } else {
      std::uint32_t raw = get_u32(p);
      float v;
      std::memcpy(&v, &raw, sizeof(v));
      out.samples[i] = v;
    }
  }
  validate(out);
  return out;
}

void write_wav(const std::string& path, const SampleBuffer& buffer,
               WavEncoding encoding) {
  validate(buffer);
  const bool pcm = encoding == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint32_t data_len =
      static_cast<std::uint32_t>(buffer.size() * (bits / 8));
  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  put_u32(out, 36 + data_len);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, pcm ? kFormatPcm : kFormatFloat);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate) * (bits / 8));
  put_u16(out, bits / 8);
  put_u16(out, bits);
  out += "data";
  put_u32(out, data_len);
  for (double v : buffer.samples) {
    if (pcm) {
      double s = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(s)));
    } else {
      float f = static_cast<float>(v);
      std::uint32_t raw;
      std::memcpy(&raw, &f, sizeof(raw));
      put_u32(out, raw);
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(Errc::kIo, "cannot write " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) fail(Errc::kIo, "write failed for " + path);
}

}  // namespace zipa
