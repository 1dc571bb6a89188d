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

#ifndef GMMDIAR_SPECTRAL_H_
#define GMMDIAR_SPECTRAL_H_

#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>

#include "gmmdiar/audio_io.h"
#include "gmmdiar/common.h"

namespace gmmdiar {

struct FrameMatrix {
  MatrixXd frames;  // n_frames x frame_len
  Eigen::Index frame_len = 0;
  Eigen::Index hop = 0;
  int sample_rate_hz = 0;

  Eigen::Index n_frames() const { return frames.rows(); }
};

// One-sided spectrogram. Phases are kept for inspection only; nothing
// downstream reads them.
struct Spectrogram {
  MatrixXd power;      // n_frames x (n_fft/2 + 1)
  MatrixXd magnitude;
  MatrixXd phase;
  Eigen::Index n_fft = 0;
  Eigen::Index frame_len = 0;
  Eigen::Index hop = 0;
  int sample_rate_hz = 0;

  Eigen::Index n_frames() const { return power.rows(); }
  Eigen::Index n_bins() const { return power.cols(); }
  double bin_hz() const { return static_cast<double>(sample_rate_hz) / static_cast<double>(n_fft); }
};

struct StftConfig {
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  Eigen::Index n_fft = 0;  // 0 selects the smallest power of two >= frame_len
  int jobs = 1;
};

Eigen::Index ms_to_samples(double ms, int sample_rate_hz);
Eigen::Index default_n_fft(Eigen::Index frame_len);
inline bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

// Raw (unwindowed) frames. Frame lengths outside 10..100 ms only warn.
FrameMatrix frame_signal(const AudioBuffer& audio, double frame_ms, double hop_ms);

// Symmetric Hamming window, w[i] = 0.54 - 0.46 cos(2 pi i / (n - 1)).
template <typename Scalar = double>
Vector<Scalar> hamming_window(Eigen::Index n) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "hamming window needs n >= 2");
  Vector<Scalar> w(n);
  const Scalar denom = static_cast<Scalar>(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Same as 0.54 - 0.46 cos(.), arranged so the ends land on 0.08 exactly.
    w[i] = Scalar(0.08) +
           Scalar(0.46) * (Scalar(1) - std::cos(Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(i) / denom));
  }
  return w;
}

FrameMatrix apply_window(const FrameMatrix& frames, const VectorXd& window);

// One-sided DFT of a zero-padded real frame: bins 0..n_fft/2.
Eigen::VectorXcd real_dft(const VectorXd& frame, Eigen::Index n_fft);

struct MagnitudePhase {
  VectorXd magnitude;
  VectorXd phase;
};
MagnitudePhase real_dft_polar(const VectorXd& frame, Eigen::Index n_fft);

// frame -> Hamming -> DFT per row; power = magnitude^2.
Spectrogram stft(const AudioBuffer& audio, const StftConfig& cfg);

// CSV: frame_index,time_s,bin_hz_<f0>,bin_hz_<f1>,...
void write_spectrogram_csv(std::ostream& os, const Spectrogram& spec);

}  // namespace gmmdiar

#endif  // GMMDIAR_SPECTRAL_H_
