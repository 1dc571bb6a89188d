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

#ifndef GMMDIAR_SEGMENTATION_H_
#define GMMDIAR_SEGMENTATION_H_

#include <optional>
#include <ostream>
#include <vector>

#include "gmmdiar/common.h"
#include "gmmdiar/features.h"
#include "gmmdiar/vad.h"

namespace gmmdiar {

inline constexpr double kCovarianceRidge = 1e-6;

struct Segment {
  Eigen::Index start_frame = 0;
  Eigen::Index end_frame = 0;  // exclusive
  double start_s = 0.0;
  double end_s = 0.0;
  bool short_segment = false;            // shorter than min_seg_frames
  std::optional<double> start_delta_bic; // set when the start is a detected change point

  Eigen::Index length() const { return end_frame - start_frame; }
};

struct SegmentationConfig {
  double lambda = 1.0;
  Eigen::Index min_seg_frames = 100;
  Eigen::Index window_grow_frames = 50;
  Eigen::Index refine_radius_frames = 25;
  Eigen::Index split_stride = 10;
  Eigen::Index feature_dims = 13;  // leading feature columns used for BIC; 0 = all
  int jobs = 1;
};

// Number of free parameters in one full-covariance Gaussian: d + d(d+1)/2.
inline double bic_param_count(Eigen::Index d) {
  return static_cast<double>(d) + static_cast<double>(d * (d + 1)) / 2.0;
}

// ln det of the biased sample covariance of `x`, ridge-regularised.
double log_det_covariance(const MatrixXd& x);

// One Gaussian versus two split at row `split`; positive favours the split.
double delta_bic(const MatrixXd& x, Eigen::Index split, double lambda);

// Growing-window BIC scan inside each speech region. Segments tile the
// regions exactly and are returned in time order.
std::vector<Segment> detect_change_points(const FeatureMatrix& features, const std::vector<FrameRange>& regions,
                                          const SegmentationConfig& cfg);

// Re-places each interior boundary between touching segments at the BIC
// argmax within +-refine_radius_frames, when that maximum is positive.
std::vector<Segment> refine_boundaries(std::vector<Segment> segments, const FeatureMatrix& features,
                                       const SegmentationConfig& cfg);

// CSV: boundary_frame,delta_bic
void write_boundaries_csv(std::ostream& os, const std::vector<Segment>& segments);

}  // namespace gmmdiar

#endif  // GMMDIAR_SEGMENTATION_H_
