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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gmmdiar/audio_io.h"

using namespace gmmdiar;

namespace {

void PutU16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(v & 0xFF);
  b.push_back(v >> 8);
}
void PutU32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xFF);
}
void PutTag(std::vector<std::uint8_t>& b, const char* t) { b.insert(b.end(), t, t + 4); }

// Hand-built RIFF file; `extra` is an unknown chunk inserted before data.
std::vector<std::uint8_t> MakeWav(std::uint16_t format, std::uint16_t channels, std::uint16_t bits,
                                  const std::vector<std::uint8_t>& payload, bool extra_chunk = false) {
  std::vector<std::uint8_t> b;
  PutTag(b, "RIFF");
  PutU32(b, 0);
  PutTag(b, "WAVE");
  PutTag(b, "fmt ");
  PutU32(b, 16);
  PutU16(b, format);
  PutU16(b, channels);
  PutU32(b, 16000);
  PutU32(b, 16000u * channels * bits / 8);
  PutU16(b, static_cast<std::uint16_t>(channels * bits / 8));
  PutU16(b, bits);
  if (extra_chunk) {
    PutTag(b, "LIST");
    PutU32(b, 3);
    b.insert(b.end(), {'a', 'b', 'c', 0});  // odd size plus pad byte
  }
  PutTag(b, "data");
  PutU32(b, static_cast<std::uint32_t>(payload.size()));
  b.insert(b.end(), payload.begin(), payload.end());
  return b;
}

std::vector<std::uint8_t> Pcm16(std::initializer_list<std::int16_t> v) {
  std::vector<std::uint8_t> out;
  for (auto s : v) PutU16(out, static_cast<std::uint16_t>(s));
  return out;
}

std::vector<std::uint8_t> Float32(std::initializer_list<float> v) {
  std::vector<std::uint8_t> out;
  for (float f : v) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    PutU32(out, bits);
  }
  return out;
}

}  // namespace

TEST_CASE("16-bit sample 32767 maps to 32767/32768") {
  const AudioBuffer a = decode_wav(MakeWav(1, 1, 16, Pcm16({32767})));
  REQUIRE(a.size() == 1);
  CHECK(a.samples()[0] == doctest::Approx(0.99997).epsilon(1e-5));
  CHECK(a.samples()[0] == 32767.0 / 32768.0);
  CHECK(a.sample_rate_hz() == 16000);
}

TEST_CASE("stereo frames are downmixed by channel mean") {
  const AudioBuffer a = decode_wav(MakeWav(3, 2, 32, Float32({0.5f, -0.5f, 0.25f, 0.75f})));
  REQUIRE(a.size() == 2);
  CHECK(a.samples()[0] == 0.0);
  CHECK(a.samples()[1] == 0.5);
}

TEST_CASE("unknown chunks are skipped") {
  const AudioBuffer a = decode_wav(MakeWav(1, 1, 16, Pcm16({-32768, 16384}), true));
  REQUIRE(a.size() == 2);
  CHECK(a.samples()[0] == -1.0);
  CHECK(a.samples()[1] == 0.5);
}

TEST_CASE("unsupported and malformed inputs") {
  SUBCASE("8-bit PCM") {
    try {
      decode_wav(MakeWav(1, 1, 8, {0x80, 0x80}));
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnsupportedFormat);
      CHECK(std::string(e.what()).find("fmt ") != std::string::npos);
    }
  }
  SUBCASE("compressed format code") {
    try {
      decode_wav(MakeWav(6, 1, 16, Pcm16({0})));
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnsupportedFormat);
    }
  }
  SUBCASE("not RIFF") {
    const std::vector<std::uint8_t> junk(64, 7);
    CHECK_THROWS_AS(decode_wav(junk), Error);
  }
  SUBCASE("missing file") {
    try {
      load_wav("/nonexistent/path.wav");
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kFileNotFound);
    }
  }
}

TEST_CASE("16-bit encode/decode is bit exact") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> dist(-32768, 32767);
  VectorXd s(500);
  for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = dist(rng) / 32768.0;
  const AudioBuffer a(s, 22050);
  const AudioBuffer b = decode_wav(encode_wav16(a));
  CHECK(b.sample_rate_hz() == 22050);
  CHECK(b.samples() == a.samples());
  const AudioBuffer c = decode_wav(encode_wav16(b));
  CHECK(c.samples() == b.samples());

  const auto path = (std::filesystem::temp_directory_path() / "gmmdiar_audio_io_test.wav").string();
  write_wav16(path, a);
  CHECK(load_wav(path).samples() == a.samples());
  std::filesystem::remove(path);
}

TEST_CASE("AudioBuffer invariants") {
  CHECK_THROWS_AS(AudioBuffer(VectorXd::Constant(3, 1.5), 16000), Error);
  CHECK_THROWS_AS(AudioBuffer(VectorXd::Zero(3), 0), Error);
  const AudioBuffer a(VectorXd::Zero(8000), 16000);
  CHECK(a.duration_seconds() == 0.5);
}

TEST_CASE("rms") {
  CHECK(rms(VectorXd::Zero(4)) == 0.0);
  CHECK(rms(VectorXd::Constant(7, -0.3)) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(rms(VectorXd()), Error);

  // One period of a sine: mean square by independent compensated summation.
  const int n = 1000;
  const double amp = 0.7;
  VectorXd x(n);
  long double acc = 0.0L;
  for (int i = 0; i < n; ++i) {
    x[i] = amp * std::sin(2.0 * std::numbers::pi * i / n);
    acc += static_cast<long double>(x[i]) * x[i];
  }
  const double oracle = std::sqrt(static_cast<double>(acc / n));
  CHECK(rms(x) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(std::abs(rms(x) - amp / std::sqrt(2.0)) < 1e-3);
}

TEST_CASE("rms is scale equivariant") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd x(1 + trial * 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = g(rng);
    const double c = g(rng) * 10.0;
    const double lhs = rms((c * x).eval());
    const double rhs = std::abs(c) * rms(x);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("frame_rms framing") {
  const AudioBuffer a(VectorXd::Zero(100), 1000);
  // Enumerate frame starts 0, 10, ..., while start + 25 <= 100.
  int enumerated = 0;
  for (int start = 0; start + 25 <= 100; start += 10) ++enumerated;
  const VectorXd e = frame_rms(a, 25, 10);
  CHECK(e.size() == enumerated);
  CHECK(e.size() == 8);
  CHECK((e.array() == 0.0).all());

  VectorXd s = VectorXd::LinSpaced(100, -1.0, 1.0);
  const AudioBuffer b(s, 1000);
  const VectorXd whole = frame_rms(b, 100, 1);
  REQUIRE(whole.size() == 1);
  CHECK(whole[0] == rms(s));

  CHECK_THROWS_AS(frame_rms(b, 101, 1), Error);
  CHECK_THROWS_AS(frame_rms(b, 10, 0), Error);

  for (Eigen::Index len = 1; len <= 40; ++len)
    for (Eigen::Index fl = 1; fl <= len; fl += 3)
      for (Eigen::Index hop = 1; hop <= 7; ++hop) {
        const AudioBuffer c(VectorXd::Zero(len), 100);
        CHECK(frame_rms(c, fl, hop).size() == (len - fl) / hop + 1);
      }
}
