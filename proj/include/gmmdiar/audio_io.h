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

#ifndef GMMDIAR_AUDIO_IO_H_
#define GMMDIAR_AUDIO_IO_H_

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gmmdiar/common.h"

namespace gmmdiar {

// Mono audio with samples in [-1, 1]. Immutable once constructed.
class AudioBuffer {
 public:
  AudioBuffer(VectorXd samples, int sample_rate_hz);

  const VectorXd& samples() const { return samples_; }
  int sample_rate_hz() const { return sample_rate_hz_; }
  Eigen::Index size() const { return samples_.size(); }
  double duration_seconds() const { return static_cast<double>(samples_.size()) / sample_rate_hz_; }

 private:
  VectorXd samples_;
  int sample_rate_hz_;
};

// RIFF/WAVE decoding. Accepts PCM 16-bit and IEEE float 32-bit, mono or
// stereo (downmixed by channel mean), including WAVE_FORMAT_EXTENSIBLE.
// Unknown chunks are skipped.
AudioBuffer load_wav(const std::string& path);
AudioBuffer decode_wav(std::span<const std::uint8_t> bytes);

// 16-bit PCM mono encoding; samples are scaled by 32768 and rounded.
std::vector<std::uint8_t> encode_wav16(const AudioBuffer& audio);
void write_wav16(const std::string& path, const AudioBuffer& audio);

template <typename Derived>
typename Derived::Scalar rms(const Eigen::DenseBase<Derived>& x) {
  if (x.size() == 0) throw Error(ErrorCode::kEmptyInput, "rms of empty sequence");
  using std::sqrt;
  return sqrt(x.derived().array().square().mean());
}

// One RMS value per full frame; a trailing partial frame is dropped.
VectorXd frame_rms(const AudioBuffer& audio, Eigen::Index frame_len, Eigen::Index hop);

// floor((n - frame_len) / hop) + 1, or 0 when frame_len > n.
inline Eigen::Index frame_count(Eigen::Index n, Eigen::Index frame_len, Eigen::Index hop) {
  return frame_len > n ? 0 : (n - frame_len) / hop + 1;
}

}  // namespace gmmdiar

#endif  // GMMDIAR_AUDIO_IO_H_
