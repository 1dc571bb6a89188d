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

#include "gmmdiar/vad.h"

#include <algorithm>
#include <iomanip>

namespace gmmdiar {

double estimate_noise_floor(const VectorXd& energies, double percentile) {
  if (energies.size() == 0) throw Error(ErrorCode::kEmptyInput, "noise floor of empty energy sequence");
  if (percentile < 0.0 || percentile > 100.0) {
    throw Error(ErrorCode::kInvalidArgument, "percentile must lie in [0, 100]");
  }
  std::vector<double> sorted(energies.data(), energies.data() + energies.size());
  std::sort(sorted.begin(), sorted.end());
  const double rank = percentile / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<FrameRange> mask_to_regions(const std::vector<bool>& mask) {
  std::vector<FrameRange> regions;
  const auto n = static_cast<Eigen::Index>(mask.size());
  Eigen::Index t = 0;
  while (t < n) {
    if (!mask[static_cast<std::size_t>(t)]) {
      ++t;
      continue;
    }
    const Eigen::Index begin = t;
    while (t < n && mask[static_cast<std::size_t>(t)]) ++t;
    regions.push_back({begin, t});
  }
  return regions;
}

VadDecision detect_speech(const VectorXd& energies, const VadConfig& cfg) {
  if (energies.size() == 0) throw Error(ErrorCode::kEmptyInput, "VAD on empty energy sequence");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
  if (cfg.hangover_frames < 0 || cfg.min_speech_frames < 0) {
    throw Error(ErrorCode::kInvalidArgument, "smoothing lengths must be nonnegative");
  }
  const auto n = static_cast<std::size_t>(energies.size());
  VadDecision out;
  out.noise_floor = estimate_noise_floor(energies, cfg.percentile);
  const double peak = energies.maxCoeff();
  out.threshold = out.noise_floor + cfg.alpha * (peak - out.noise_floor);
  out.raw_mask.assign(n, false);
  if (!(peak > out.noise_floor)) {
    Warn("frame energies are flat; no speech detected");
    out.mask = out.raw_mask;
    return out;
  }
  for (std::size_t t = 0; t < n; ++t) out.raw_mask[t] = energies[static_cast<Eigen::Index>(t)] > out.threshold;

  std::vector<bool> mask = out.raw_mask;
  // Fill short interior gaps.
  std::vector<FrameRange> runs = mask_to_regions(mask);
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].begin - runs[i - 1].end <= cfg.hangover_frames) {
      std::fill(mask.begin() + runs[i - 1].end, mask.begin() + runs[i].begin, true);
    }
  }
  // Drop short bursts.
  for (const FrameRange& r : mask_to_regions(mask)) {
    if (r.length() < cfg.min_speech_frames) std::fill(mask.begin() + r.begin, mask.begin() + r.end, false);
  }
  out.mask = std::move(mask);
  out.speech_regions = mask_to_regions(out.mask);
  return out;
}

void write_vad_csv(std::ostream& os, const VectorXd& energies, const VadDecision& decision) {
  os << "frame_index,energy,is_speech\n" << std::setprecision(10);
  for (Eigen::Index t = 0; t < energies.size(); ++t) {
    os << t << "," << energies[t] << "," << (decision.mask[static_cast<std::size_t>(t)] ? 1 : 0) << "\n";
  }
}

}  // namespace gmmdiar
