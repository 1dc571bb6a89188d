// Copyright 2026 The gmmdiar Authors
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

#include "gmmdiar/audio_io.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

namespace gmmdiar {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t ReadU16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t ReadU32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void PutTag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

std::string ChunkId(const std::uint8_t* p) {
  std::string id(reinterpret_cast<const char*>(p), 4);
  for (char& c : id) {
    if (c < 32 || c > 126) c = '?';
  }
  return id;
}

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

FormatChunk ParseFormat(const std::uint8_t* p, std::uint32_t size) {
  if (size < 16) {
    throw Error(ErrorCode::kMalformedHeader, "chunk 'fmt ' shorter than 16 bytes");
  }
  FormatChunk fmt;
  fmt.format = ReadU16(p);
  fmt.channels = ReadU16(p + 2);
  fmt.sample_rate = ReadU32(p + 4);
  fmt.block_align = ReadU16(p + 12);
  fmt.bits = ReadU16(p + 14);
  if (fmt.format == kFormatExtensible) {
    // cbSize(2) validBits(2) channelMask(4) then the subformat GUID, whose
    // first two bytes carry the actual format code.
    if (size < 40) {
      throw Error(ErrorCode::kMalformedHeader, "chunk 'fmt ' extensible form shorter than 40 bytes");
    }
    fmt.format = ReadU16(p + 24);
  }
  if (fmt.format != kFormatPcm && fmt.format != kFormatFloat) {
    throw Error(ErrorCode::kUnsupportedFormat,
                "chunk 'fmt ' has compression code " + std::to_string(fmt.format));
  }
  if ((fmt.format == kFormatPcm && fmt.bits != 16) || (fmt.format == kFormatFloat && fmt.bits != 32)) {
    throw Error(ErrorCode::kUnsupportedFormat,
                "chunk 'fmt ' has unsupported bit depth " + std::to_string(fmt.bits));
  }
  if (fmt.channels != 1 && fmt.channels != 2) {
    throw Error(ErrorCode::kUnsupportedFormat,
                "chunk 'fmt ' has " + std::to_string(fmt.channels) + " channels");
  }
  if (fmt.sample_rate == 0) {
    throw Error(ErrorCode::kMalformedHeader, "chunk 'fmt ' has zero sample rate");
  }
  if (fmt.block_align != fmt.channels * (fmt.bits / 8)) {
    throw Error(ErrorCode::kMalformedHeader, "chunk 'fmt ' block align inconsistent with channels/bits");
  }
  return fmt;
}

}  // namespace

AudioBuffer::AudioBuffer(VectorXd samples, int sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (sample_rate_hz_ <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }
  if (samples_.size() > 0 && samples_.cwiseAbs().maxCoeff() > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "samples must lie in [-1, 1]");
  }
}

AudioBuffer decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kMalformedHeader, "missing RIFF/WAVE signature");
  }
  const std::uint8_t* base = bytes.data();
  std::size_t pos = 12;
  bool have_fmt = false;
  FormatChunk fmt;
  const std::uint8_t* data = nullptr;
  std::uint32_t data_size = 0;

  while (pos + 8 <= bytes.size()) {
    const std::string id = ChunkId(base + pos);
    const std::uint32_t size = ReadU32(base + pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      // Some writers leave a stale size on a trailing data chunk.
      if (id == "data" && have_fmt) {
        data = base + body;
        data_size = static_cast<std::uint32_t>(bytes.size() - body);
        break;
      }
      throw Error(ErrorCode::kMalformedHeader, "chunk '" + id + "' extends past end of file");
    }
    if (id == "fmt ") {
      fmt = ParseFormat(base + body, size);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw Error(ErrorCode::kMalformedHeader, "chunk 'data' precedes 'fmt '");
      data = base + body;
      data_size = size;
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw Error(ErrorCode::kMalformedHeader, "no 'fmt ' chunk");
  if (data == nullptr) throw Error(ErrorCode::kMalformedHeader, "no 'data' chunk");

  const std::size_t n = data_size / fmt.block_align;
  const std::size_t bytes_per_sample = fmt.bits / 8;
  VectorXd samples(static_cast<Eigen::Index>(n));
  bool clipped = false;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < fmt.channels; ++c) {
      const std::uint8_t* p = data + i * fmt.block_align + c * bytes_per_sample;
      double v;
      if (fmt.format == kFormatPcm) {
        v = static_cast<std::int16_t>(ReadU16(p)) / 32768.0;
      } else {
        const std::uint32_t bits = ReadU32(p);
        float f;
        std::memcpy(&f, &bits, sizeof f);
        v = f;
      }
      acc += v;
    }
    double s = acc / fmt.channels;
    if (!std::isfinite(s)) s = 0.0;
    if (std::abs(s) > 1.0) {
      clipped = true;
      s = std::clamp(s, -1.0, 1.0);
    }
    samples[static_cast<Eigen::Index>(i)] = s;
  }
  if (clipped) Warn("float samples outside [-1, 1] were clipped");
  return AudioBuffer(std::move(samples), static_cast<int>(fmt.sample_rate));
}

AudioBuffer load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

std::vector<std::uint8_t> encode_wav16(const AudioBuffer& audio) {
  const auto n = static_cast<std::uint32_t>(audio.size());
  std::vector<std::uint8_t> out;
  out.reserve(44 + 2 * static_cast<std::size_t>(n));
  PutTag(out, "RIFF");
  PutU32(out, 36 + 2 * n);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, kFormatPcm);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(audio.sample_rate_hz()));
  PutU32(out, static_cast<std::uint32_t>(audio.sample_rate_hz()) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  PutTag(out, "data");
  PutU32(out, 2 * n);
  for (Eigen::Index i = 0; i < audio.size(); ++i) {
    const double scaled = std::nearbyint(audio.samples()[i] * 32768.0);
    const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    PutU16(out, static_cast<std::uint16_t>(v));
  }
  return out;
}

void write_wav16(const std::string& path, const AudioBuffer& audio) {
  const auto bytes = encode_wav16(audio);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

VectorXd frame_rms(const AudioBuffer& audio, Eigen::Index frame_len, Eigen::Index hop) {
  if (audio.size() == 0) throw Error(ErrorCode::kEmptyInput, "frame_rms of empty buffer");
  if (frame_len < 1 || hop < 1) throw Error(ErrorCode::kInvalidArgument, "frame_len and hop must be >= 1");
  if (frame_len > audio.size()) {
    throw Error(ErrorCode::kInvalidArgument, "frame_len exceeds signal length");
  }
  const Eigen::Index n_frames = frame_count(audio.size(), frame_len, hop);
  VectorXd out(n_frames);
  for (Eigen::Index t = 0; t < n_frames; ++t) {
    out[t] = rms(audio.samples().segment(t * hop, frame_len));
  }
  return out;
}

}  // namespace gmmdiar
