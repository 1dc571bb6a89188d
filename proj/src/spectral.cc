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

#include "gmmdiar/spectral.h"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace gmmdiar {

namespace {

class RealFft {
 public:
  explicit RealFft(Eigen::Index n_fft) : n_fft_(n_fft), padded_(n_fft), out_(n_fft / 2 + 1) {
    fft_.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  }

  const std::vector<std::complex<double>>& operator()(const double* frame, Eigen::Index len) {
    std::fill(padded_.begin(), padded_.end(), 0.0);
    std::copy(frame, frame + len, padded_.begin());
    fft_.fwd(out_.data(), padded_.data(), n_fft_);
    return out_;
  }

 private:
  Eigen::Index n_fft_;
  Eigen::FFT<double> fft_;
  std::vector<double> padded_;
  std::vector<std::complex<double>> out_;
};

void CheckDftArgs(Eigen::Index frame_len, Eigen::Index n_fft) {
  if (!is_power_of_two(n_fft)) {
    throw Error(ErrorCode::kInvalidArgument, "n_fft " + std::to_string(n_fft) + " is not a power of two");
  }
  if (n_fft < frame_len) {
    throw Error(ErrorCode::kInvalidArgument, "n_fft smaller than frame length");
  }
  if (n_fft < 2) throw Error(ErrorCode::kInvalidArgument, "n_fft must be >= 2");
}

}  // namespace

Eigen::Index ms_to_samples(double ms, int sample_rate_hz) {
  return static_cast<Eigen::Index>(std::llround(ms * sample_rate_hz / 1000.0));
}

Eigen::Index default_n_fft(Eigen::Index frame_len) {
  Eigen::Index n = 1;
  while (n < frame_len) n <<= 1;
  return std::max<Eigen::Index>(n, 2);
}

FrameMatrix frame_signal(const AudioBuffer& audio, double frame_ms, double hop_ms) {
  if (!(frame_ms > 0.0) || !(hop_ms > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "frame and hop durations must be positive");
  }
  if (hop_ms > frame_ms) {
    throw Error(ErrorCode::kInvalidArgument, "hop longer than frame leaves gaps between frames");
  }
  if (frame_ms < 10.0 || frame_ms > 100.0) {
    std::ostringstream msg;
    msg << "frame length " << frame_ms << " ms is outside the usual 10-100 ms range";
    Warn(msg.str());
  }
  FrameMatrix out;
  out.sample_rate_hz = audio.sample_rate_hz();
  out.frame_len = ms_to_samples(frame_ms, audio.sample_rate_hz());
  out.hop = ms_to_samples(hop_ms, audio.sample_rate_hz());
  if (out.frame_len < 1 || out.hop < 1) {
    throw Error(ErrorCode::kInvalidArgument, "frame or hop rounds to zero samples");
  }
  if (out.frame_len > audio.size()) {
    throw Error(ErrorCode::kInvalidArgument, "frame longer than signal");
  }
  const Eigen::Index n = frame_count(audio.size(), out.frame_len, out.hop);
  out.frames.resize(n, out.frame_len);
  for (Eigen::Index t = 0; t < n; ++t) {
    out.frames.row(t) = audio.samples().segment(t * out.hop, out.frame_len).transpose();
  }
  return out;
}

FrameMatrix apply_window(const FrameMatrix& frames, const VectorXd& window) {
  if (window.size() != frames.frame_len) {
    throw Error(ErrorCode::kShapeMismatch, "window length differs from frame length");
  }
  FrameMatrix out = frames;
  out.frames.array().rowwise() *= window.transpose().array();
  return out;
}

Eigen::VectorXcd real_dft(const VectorXd& frame, Eigen::Index n_fft) {
  CheckDftArgs(frame.size(), n_fft);
  RealFft fft(n_fft);
  const auto& bins = fft(frame.data(), frame.size());
  return Eigen::Map<const Eigen::VectorXcd>(bins.data(), static_cast<Eigen::Index>(bins.size()));
}

MagnitudePhase real_dft_polar(const VectorXd& frame, Eigen::Index n_fft) {
  const Eigen::VectorXcd x = real_dft(frame, n_fft);
  MagnitudePhase out{x.cwiseAbs(), VectorXd(x.size())};
  for (Eigen::Index k = 0; k < x.size(); ++k) out.phase[k] = std::arg(x[k]);
  return out;
}

Spectrogram stft(const AudioBuffer& audio, const StftConfig& cfg) {
  const FrameMatrix raw = frame_signal(audio, cfg.frame_ms, cfg.hop_ms);
  const FrameMatrix windowed = apply_window(raw, hamming_window(std::max<Eigen::Index>(raw.frame_len, 2)));
  Spectrogram spec;
  spec.n_fft = cfg.n_fft > 0 ? cfg.n_fft : default_n_fft(raw.frame_len);
  CheckDftArgs(raw.frame_len, spec.n_fft);
  spec.frame_len = raw.frame_len;
  spec.hop = raw.hop;
  spec.sample_rate_hz = raw.sample_rate_hz;
  const Eigen::Index n = raw.n_frames();
  const Eigen::Index bins = spec.n_fft / 2 + 1;
  spec.magnitude.resize(n, bins);
  spec.phase.resize(n, bins);

  constexpr Eigen::Index kBlock = 64;
  const auto n_blocks = static_cast<std::size_t>((n + kBlock - 1) / kBlock);
  ParallelFor(n_blocks, cfg.jobs, [&](std::size_t b) {
    RealFft fft(spec.n_fft);
    const Eigen::Index begin = static_cast<Eigen::Index>(b) * kBlock;
    const Eigen::Index end = std::min(n, begin + kBlock);
    for (Eigen::Index t = begin; t < end; ++t) {
      const auto& x = fft(windowed.frames.row(t).data(), windowed.frame_len);
      for (Eigen::Index k = 0; k < bins; ++k) {
        spec.magnitude(t, k) = std::abs(x[static_cast<std::size_t>(k)]);
        spec.phase(t, k) = std::arg(x[static_cast<std::size_t>(k)]);
      }
    }
  });
  spec.power = spec.magnitude.array().square().matrix();
  return spec;
}

void write_spectrogram_csv(std::ostream& os, const Spectrogram& spec) {
  os << "frame_index,time_s";
  for (Eigen::Index k = 0; k < spec.n_bins(); ++k) os << ",bin_hz_" << k * spec.bin_hz();
  os << "\n" << std::setprecision(9);
  const double hop_s = static_cast<double>(spec.hop) / spec.sample_rate_hz;
  const double half_frame_s = 0.5 * static_cast<double>(spec.frame_len) / spec.sample_rate_hz;
  for (Eigen::Index t = 0; t < spec.n_frames(); ++t) {
    os << t << "," << t * hop_s + half_frame_s;
    for (Eigen::Index k = 0; k < spec.n_bins(); ++k) os << "," << spec.power(t, k);
    os << "\n";
  }
}

}  // namespace gmmdiar
