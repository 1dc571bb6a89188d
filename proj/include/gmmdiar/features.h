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

#ifndef GMMDIAR_FEATURES_H_
#define GMMDIAR_FEATURES_H_

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "gmmdiar/audio_io.h"
#include "gmmdiar/common.h"
#include "gmmdiar/spectral.h"

namespace gmmdiar {

inline constexpr double kLogEnergyFloor = 1e-10;

template <typename Scalar>
Scalar hz_to_mel(Scalar hz) {
  if (hz < Scalar(0)) throw Error(ErrorCode::kInvalidArgument, "negative frequency");
  return Scalar(2595) * std::log10(Scalar(1) + hz / Scalar(700));
}

template <typename Scalar>
Scalar mel_to_hz(Scalar mel) {
  return Scalar(700) * (std::pow(Scalar(10), mel / Scalar(2595)) - Scalar(1));
}

struct MelFilterbank {
  MatrixXd weights;            // n_filters x n_bins, triangles peaking at 1.0
  VectorXd edge_freqs_hz;      // n_filters + 2 edges, uniform in mel
  Eigen::VectorXi edge_bins;   // edges snapped to FFT bins
  int n_filters = 0;
};

MelFilterbank build_filterbank(int n_filters, Eigen::Index n_fft, int sample_rate_hz, double f_min,
                               double f_max);

// ln(max(fb * power, 1e-10)) per frame.
MatrixXd log_mel_energies(const Spectrogram& spec, const MelFilterbank& fb);

// Orthonormal DCT-II basis, n_out x n.
MatrixXd dct_ii_matrix(Eigen::Index n, Eigen::Index n_out);

template <typename Derived>
Vector<typename Derived::Scalar> dct_ii(const Eigen::MatrixBase<Derived>& values, Eigen::Index n_out) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = values.size();
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "dct of empty sequence");
  if (n_out > n || n_out < 0) throw Error(ErrorCode::kInvalidArgument, "n_out exceeds input length");
  Vector<Scalar> out(n_out);
  const Scalar s0 = std::sqrt(Scalar(1) / Scalar(n));
  const Scalar sk = std::sqrt(Scalar(2) / Scalar(n));
  for (Eigen::Index k = 0; k < n_out; ++k) {
    Scalar acc(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      acc += values.derived()(i) *
             std::cos(std::numbers::pi_v<Scalar> * Scalar(k) * Scalar(2 * i + 1) / Scalar(2 * n));
    }
    out[k] = (k == 0 ? s0 : sk) * acc;
  }
  return out;
}

struct FeatureMatrix {
  MatrixXd vectors;       // n_frames x dim
  VectorXd frame_times_s; // frame centres
  double frame_ms = 0.0;
  double hop_ms = 0.0;
  std::string source_id;

  Eigen::Index n_frames() const { return vectors.rows(); }
  Eigen::Index dim() const { return vectors.cols(); }
};

struct MfccConfig {
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  Eigen::Index n_fft = 0;  // 0: smallest power of two >= frame length
  int n_filters = 26;
  int n_coeffs = 13;
  double f_min = 0.0;
  double f_max = 0.0;  // 0: Nyquist
  int jobs = 1;
};

FeatureMatrix mfcc(const AudioBuffer& audio, const MfccConfig& cfg, const std::string& source_id = "");

// Regression deltas over +-width frames with edge replication.
MatrixXd delta(const MatrixXd& x, int width);
FeatureMatrix delta(const FeatureMatrix& features, int width);

// [x, delta(x), delta(delta(x))] per frame.
FeatureMatrix stack_deltas(const FeatureMatrix& features, int width);

enum class FeatureBlocks { kBase, kDelta, kDeltaDelta, kAll };

// CSV: frame_index,time_s,c<j>... for the columns of the selected block.
// `base_dim` is the width of one block inside a stacked matrix.
void write_features_csv(std::ostream& os, const FeatureMatrix& features, Eigen::Index base_dim,
                        FeatureBlocks blocks);

}  // namespace gmmdiar

#endif  // GMMDIAR_FEATURES_H_
