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

#include "gmmdiar/features.h"

#include <algorithm>
#include <iomanip>

namespace gmmdiar {

MelFilterbank build_filterbank(int n_filters, Eigen::Index n_fft, int sample_rate_hz, double f_min,
                               double f_max) {
  if (n_filters < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 mel filters");
  if (!is_power_of_two(n_fft)) throw Error(ErrorCode::kInvalidArgument, "n_fft must be a power of two");
  if (sample_rate_hz <= 0) throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  const double nyquist = sample_rate_hz / 2.0;
  if (f_min < 0.0 || !(f_min < f_max)) throw Error(ErrorCode::kInvalidArgument, "need 0 <= f_min < f_max");
  if (f_max > nyquist) throw Error(ErrorCode::kInvalidArgument, "f_max exceeds Nyquist frequency");

  MelFilterbank fb;
  fb.n_filters = n_filters;
  const Eigen::Index n_edges = n_filters + 2;
  const double mel_lo = hz_to_mel(f_min);
  const double mel_hi = hz_to_mel(f_max);
  fb.edge_freqs_hz.resize(n_edges);
  fb.edge_bins.resize(n_edges);
  for (Eigen::Index i = 0; i < n_edges; ++i) {
    const double mel = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / static_cast<double>(n_edges - 1);
    fb.edge_freqs_hz[i] = i == n_edges - 1 ? f_max : (i == 0 ? f_min : mel_to_hz(mel));
    fb.edge_bins[i] = static_cast<int>(std::floor(static_cast<double>(n_fft + 1) * fb.edge_freqs_hz[i] /
                                                  sample_rate_hz));
  }
  for (Eigen::Index i = 1; i < n_edges; ++i) {
    if (fb.edge_bins[i] <= fb.edge_bins[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "too many mel filters for n_fft " + std::to_string(n_fft) + ": edges " +
                      std::to_string(i - 1) + " and " + std::to_string(i) + " share a bin");
    }
  }

  const Eigen::Index n_bins = n_fft / 2 + 1;
  fb.weights = MatrixXd::Zero(n_filters, n_bins);
  for (int j = 0; j < n_filters; ++j) {
    const int left = fb.edge_bins[j];
    const int centre = fb.edge_bins[j + 1];
    const int right = fb.edge_bins[j + 2];
    for (int k = left; k <= right && k < n_bins; ++k) {
      if (k <= centre) {
        fb.weights(j, k) = static_cast<double>(k - left) / (centre - left);
      } else {
        fb.weights(j, k) = static_cast<double>(right - k) / (right - centre);
      }
    }
  }
  return fb;
}

MatrixXd log_mel_energies(const Spectrogram& spec, const MelFilterbank& fb) {
  if (fb.weights.cols() != spec.n_bins()) {
    throw Error(ErrorCode::kShapeMismatch, "filterbank bin count differs from spectrogram");
  }
  MatrixXd energies = spec.power * fb.weights.transpose();
  return energies.array().max(kLogEnergyFloor).log().matrix();
}

MatrixXd dct_ii_matrix(Eigen::Index n, Eigen::Index n_out) {
  if (n_out > n) throw Error(ErrorCode::kInvalidArgument, "n_out exceeds input length");
  MatrixXd basis(n_out, n);
  for (Eigen::Index k = 0; k < n_out; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      basis(k, i) = scale * std::cos(std::numbers::pi * static_cast<double>(k) *
                                     static_cast<double>(2 * i + 1) / static_cast<double>(2 * n));
    }
  }
  return basis;
}

FeatureMatrix mfcc(const AudioBuffer& audio, const MfccConfig& cfg, const std::string& source_id) {
  if (cfg.n_coeffs < 1 || cfg.n_coeffs > cfg.n_filters) {
    throw Error(ErrorCode::kInvalidArgument, "n_coeffs must lie in [1, n_filters]");
  }
  const Spectrogram spec = stft(audio, StftConfig{cfg.frame_ms, cfg.hop_ms, cfg.n_fft, cfg.jobs});
  const double f_max = cfg.f_max > 0.0 ? cfg.f_max : audio.sample_rate_hz() / 2.0;
  const MelFilterbank fb = build_filterbank(cfg.n_filters, spec.n_fft, audio.sample_rate_hz(), cfg.f_min, f_max);
  const MatrixXd log_energies = log_mel_energies(spec, fb);

  FeatureMatrix out;
  out.vectors = log_energies * dct_ii_matrix(cfg.n_filters, cfg.n_coeffs).transpose();
  out.frame_ms = cfg.frame_ms;
  out.hop_ms = cfg.hop_ms;
  out.source_id = source_id;
  const double hop_s = static_cast<double>(spec.hop) / audio.sample_rate_hz();
  const double half_frame_s = 0.5 * static_cast<double>(spec.frame_len) / audio.sample_rate_hz();
  out.frame_times_s = VectorXd::LinSpaced(spec.n_frames(), 0.0, static_cast<double>(spec.n_frames() - 1));
  out.frame_times_s = (out.frame_times_s.array() * hop_s + half_frame_s).matrix();
  return out;
}

MatrixXd delta(const MatrixXd& x, int width) {
  if (width < 1) throw Error(ErrorCode::kInvalidArgument, "delta width must be >= 1");
  if (x.rows() == 0) throw Error(ErrorCode::kEmptyInput, "delta of empty feature matrix");
  const Eigen::Index n = x.rows();
  double denom = 0.0;
  for (int m = 1; m <= width; ++m) denom += static_cast<double>(m * m);
  denom *= 2.0;
  MatrixXd out = MatrixXd::Zero(n, x.cols());
  for (Eigen::Index t = 0; t < n; ++t) {
    for (int m = 1; m <= width; ++m) {
      const Eigen::Index ahead = std::min(t + m, n - 1);
      const Eigen::Index behind = std::max<Eigen::Index>(t - m, 0);
      out.row(t) += m * (x.row(ahead) - x.row(behind));
    }
  }
  out /= denom;
  return out;
}

FeatureMatrix delta(const FeatureMatrix& features, int width) {
  FeatureMatrix out = features;
  out.vectors = delta(features.vectors, width);
  return out;
}

FeatureMatrix stack_deltas(const FeatureMatrix& features, int width) {
  const MatrixXd d1 = delta(features.vectors, width);
  const MatrixXd d2 = delta(d1, width);
  FeatureMatrix out = features;
  const Eigen::Index dim = features.dim();
  out.vectors.resize(features.n_frames(), 3 * dim);
  out.vectors << features.vectors, d1, d2;
  return out;
}

void write_features_csv(std::ostream& os, const FeatureMatrix& features, Eigen::Index base_dim,
                        FeatureBlocks blocks) {
  Eigen::Index first = 0;
  Eigen::Index count = features.dim();
  switch (blocks) {
    case FeatureBlocks::kBase: count = base_dim; break;
    case FeatureBlocks::kDelta: first = base_dim; count = base_dim; break;
    case FeatureBlocks::kDeltaDelta: first = 2 * base_dim; count = base_dim; break;
    case FeatureBlocks::kAll: break;
  }
  if (first + count > features.dim()) {
    throw Error(ErrorCode::kShapeMismatch, "requested feature block not present");
  }
  os << "frame_index,time_s";
  for (Eigen::Index j = first; j < first + count; ++j) os << ",c" << j;
  os << "\n" << std::setprecision(10);
  for (Eigen::Index t = 0; t < features.n_frames(); ++t) {
    os << t << "," << features.frame_times_s[t];
    for (Eigen::Index j = first; j < first + count; ++j) os << "," << features.vectors(t, j);
    os << "\n";
  }
}

}  // namespace gmmdiar
