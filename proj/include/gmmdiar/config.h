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

#ifndef GMMDIAR_CONFIG_H_
#define GMMDIAR_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>

#include "gmmdiar/clustering.h"
#include "gmmdiar/features.h"
#include "gmmdiar/segmentation.h"
#include "gmmdiar/vad.h"

namespace gmmdiar {

struct PipelineConfig {
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  Eigen::Index n_fft = 0;  // 0 = auto
  int n_filters = 26;
  int n_coeffs = 13;
  int delta_width = 2;

  VadConfig vad;

  double lambda = 1.0;
  Eigen::Index min_seg_frames = 100;
  Eigen::Index window_grow_frames = 50;
  Eigen::Index refine_radius_frames = 25;
  Eigen::Index split_stride = 10;
  Eigen::Index bic_feature_dims = 13;

  std::optional<double> threshold;  // unset = auto (widest merge-distance gap)
  int max_components = 4;
  Eigen::Index frames_per_component = 50;
  int em_max_iters = 200;
  double em_tol = 1e-4;
  int em_restarts = 5;

  std::uint64_t seed = 42;
  int jobs = 1;

  MfccConfig mfcc() const;
  SegmentationConfig segmentation() const;
  ClusteringConfig clustering() const;

  // Throws Error(kConfig) when any module precondition is violated.
  void validate() const;
};

// `key = value` lines, `#` comments. Unknown keys are errors. Values not
// mentioned keep their defaults.
PipelineConfig parse_config(const std::string& text, PipelineConfig base = {});
PipelineConfig load_config(const std::string& path, PipelineConfig base = {});

}  // namespace gmmdiar

#endif  // GMMDIAR_CONFIG_H_
