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

#ifndef GMMDIAR_VAD_H_
#define GMMDIAR_VAD_H_

#include <ostream>
#include <vector>

#include "gmmdiar/common.h"

namespace gmmdiar {

// Half-open frame interval [begin, end).
struct FrameRange {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;

  Eigen::Index length() const { return end - begin; }
  bool operator==(const FrameRange&) const = default;
};

struct VadConfig {
  double alpha = 0.15;          // threshold position between noise floor and peak
  double percentile = 10.0;     // noise floor percentile
  int hangover_frames = 5;      // non-speech gaps this short are filled
  int min_speech_frames = 10;   // speech runs shorter than this are dropped
};

struct VadDecision {
  std::vector<bool> raw_mask;   // energy > threshold, before smoothing
  std::vector<bool> mask;       // after hangover and minimum-duration smoothing
  std::vector<FrameRange> speech_regions;
  double threshold = 0.0;
  double noise_floor = 0.0;
};

// Linear-interpolation percentile (p in [0, 100]) of the energies.
double estimate_noise_floor(const VectorXd& energies, double percentile = 10.0);

VadDecision detect_speech(const VectorXd& energies, const VadConfig& cfg = {});

std::vector<FrameRange> mask_to_regions(const std::vector<bool>& mask);

// CSV: frame_index,energy,is_speech
void write_vad_csv(std::ostream& os, const VectorXd& energies, const VadDecision& decision);

}  // namespace gmmdiar

#endif  // GMMDIAR_VAD_H_
