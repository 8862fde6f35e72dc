// Copyright 2026 The beamsteer authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "beamsteer/wav_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace beamsteer {
namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t read_u32(const uint8_t *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const uint8_t *p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void append_u32(std::vector<uint8_t> &out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xFF));
  out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
  out.push_back(static_cast<uint8_t>((v >> 16) & 0xFF));
  out.push_back(static_cast<uint8_t>((v >> 24) & 0xFF));
}

void append_u16(std::vector<uint8_t> &out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xFF));
  out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
}

void append_tag(std::vector<uint8_t> &out, const char *tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

MultichannelSignal read_wav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("read_wav: cannot open " + path);
  }
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw std::runtime_error("read_wav: not a RIFF/WAVE file: " + path);
  }

  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits = 0;
  bool have_fmt = false;
  const uint8_t *data = nullptr;
  uint32_t data_size = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char *tag = reinterpret_cast<const char *>(bytes.data() + pos);
    const uint32_t chunk_size = read_u32(bytes.data() + pos + 4);
    const size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) {
      throw std::runtime_error("read_wav: truncated chunk in " + path);
    }
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (chunk_size < 16) {
        throw std::runtime_error("read_wav: fmt chunk too small in " + path);
      }
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      sample_rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      if (format == kFormatExtensible && chunk_size >= 40) {
        // Sub-format GUID starts with the effective format code.
        format = read_u16(bytes.data() + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr) {
    throw std::runtime_error("read_wav: missing fmt or data chunk in " + path);
  }
  if (channels == 0 || sample_rate == 0) {
    throw std::runtime_error("read_wav: invalid fmt chunk in " + path);
  }

  const uint32_t bytes_per_sample = bits / 8;
  if (bytes_per_sample == 0) {
    throw std::runtime_error("read_wav: invalid bit depth in " + path);
  }
  const Eigen::Index frames =
      static_cast<Eigen::Index>(data_size / (bytes_per_sample * channels));

  MultichannelSignal signal;
  signal.sample_rate_hz = static_cast<double>(sample_rate);
  signal.samples.resize(frames, channels);

  if (format == kFormatPcm && bits == 16) {
    for (Eigen::Index i = 0; i < frames; ++i) {
      for (int ch = 0; ch < channels; ++ch) {
        const uint8_t *p = data + (static_cast<size_t>(i) * channels + ch) * 2;
        const int16_t raw = static_cast<int16_t>(p[0] | (p[1] << 8));
        signal.samples(i, ch) = static_cast<double>(raw) / 32768.0;
      }
    }
  } else if (format == kFormatFloat && bits == 32) {
    for (Eigen::Index i = 0; i < frames; ++i) {
      for (int ch = 0; ch < channels; ++ch) {
        const uint8_t *p = data + (static_cast<size_t>(i) * channels + ch) * 4;
        float value;
        std::memcpy(&value, p, 4);
        signal.samples(i, ch) = static_cast<double>(value);
      }
    }
  } else {
    throw std::runtime_error("read_wav: unsupported format (want PCM16 or float32) in " +
                             path);
  }
  return signal;
}

void write_wav(const std::string &path, const MultichannelSignal &signal) {
  signal.validate();
  const int channels = signal.num_channels();
  const Eigen::Index frames = signal.num_samples();
  const uint32_t sample_rate = static_cast<uint32_t>(signal.sample_rate_hz);
  const uint32_t data_size = static_cast<uint32_t>(frames) * channels * 4;

  std::vector<uint8_t> out;
  out.reserve(44 + data_size);
  append_tag(out, "RIFF");
  append_u32(out, 36 + data_size);
  append_tag(out, "WAVE");
  append_tag(out, "fmt ");
  append_u32(out, 16);
  append_u16(out, kFormatFloat);
  append_u16(out, static_cast<uint16_t>(channels));
  append_u32(out, sample_rate);
  append_u32(out, sample_rate * channels * 4);
  append_u16(out, static_cast<uint16_t>(channels * 4));
  append_u16(out, 32);
  append_tag(out, "data");
  append_u32(out, data_size);
  for (Eigen::Index i = 0; i < frames; ++i) {
    for (int ch = 0; ch < channels; ++ch) {
      const float value = static_cast<float>(signal.samples(i, ch));
      uint8_t raw[4];
      std::memcpy(raw, &value, 4);
      out.insert(out.end(), raw, raw + 4);
    }
  }

  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("write_wav: cannot open " + path);
  }
  file.write(reinterpret_cast<const char *>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) {
    throw std::runtime_error("write_wav: write failed for " + path);
  }
}

}  // namespace beamsteer
