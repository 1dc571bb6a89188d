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

#include "gmmdiar/segmentation.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>

namespace gmmdiar {

namespace {

double LogDetRidged(MatrixXd cov) {
  cov.diagonal().array() += kCovarianceRidge;
  Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumerical, "covariance not positive definite after regularization");
  }
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  if (!std::isfinite(log_det)) throw Error(ErrorCode::kNumerical, "non-finite covariance determinant");
  return log_det;
}

// Prefix sums of x and x x^T (after removing the block mean) so that the
// covariance of any row range costs O(d^2).
class CovarianceScanner {
 public:
  explicit CovarianceScanner(const Eigen::Ref<const MatrixXd>& x)
      : d_(x.cols()), sum_(x.rows() + 1, x.cols()), outer_(static_cast<std::size_t>(x.rows() + 1)) {
    const RowVectorXd centre = x.colwise().mean();
    sum_.row(0).setZero();
    outer_[0] = MatrixXd::Zero(d_, d_);
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
      const RowVectorXd row = x.row(t) - centre;
      sum_.row(t + 1) = sum_.row(t) + row;
      outer_[static_cast<std::size_t>(t + 1)] = outer_[static_cast<std::size_t>(t)];
      outer_[static_cast<std::size_t>(t + 1)].selfadjointView<Eigen::Lower>().rankUpdate(row.transpose());
    }
  }

  // Biased covariance of rows [a, b).
  MatrixXd covariance(Eigen::Index a, Eigen::Index b) const {
    const double n = static_cast<double>(b - a);
    const RowVectorXd mean = (sum_.row(b) - sum_.row(a)) / n;
    MatrixXd cov = (outer_[static_cast<std::size_t>(b)] - outer_[static_cast<std::size_t>(a)]) / n;
    cov = cov.selfadjointView<Eigen::Lower>();
    cov.noalias() -= mean.transpose() * mean;
    return cov;
  }

  double delta_bic(Eigen::Index a, Eigen::Index split, Eigen::Index b, double lambda) const {
    const double n = static_cast<double>(b - a);
    const double n1 = static_cast<double>(split - a);
    const double n2 = static_cast<double>(b - split);
    return 0.5 * n * LogDetRidged(covariance(a, b)) - 0.5 * n1 * LogDetRidged(covariance(a, split)) -
           0.5 * n2 * LogDetRidged(covariance(split, b)) - 0.5 * lambda * bic_param_count(d_) * std::log(n);
  }

 private:
  Eigen::Index d_;
  MatrixXd sum_;
  std::vector<MatrixXd> outer_;
};

Eigen::Index BicDims(const FeatureMatrix& features, const SegmentationConfig& cfg) {
  if (cfg.feature_dims < 0 || cfg.feature_dims > features.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "BIC feature dims exceed feature dimension");
  }
  return cfg.feature_dims == 0 ? features.dim() : cfg.feature_dims;
}

void CheckConfig(const SegmentationConfig& cfg, Eigen::Index d) {
  if (!(cfg.lambda > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must be positive");
  if (cfg.min_seg_frames < 2 * (d + 1)) {
    throw Error(ErrorCode::kInvalidArgument,
                "min_seg_frames must be at least 2*(d+1) = " + std::to_string(2 * (d + 1)));
  }
  if (cfg.window_grow_frames < 1 || cfg.split_stride < 1 || cfg.refine_radius_frames < 0) {
    throw Error(ErrorCode::kInvalidArgument, "window growth and stride must be positive");
  }
}

Segment MakeSegment(Eigen::Index begin, Eigen::Index end, double hop_s, const SegmentationConfig& cfg) {
  Segment s;
  s.start_frame = begin;
  s.end_frame = end;
  s.start_s = static_cast<double>(begin) * hop_s;
  s.end_s = static_cast<double>(end) * hop_s;
  s.short_segment = end - begin < cfg.min_seg_frames;
  return s;
}

std::vector<Segment> ScanRegion(const MatrixXd& x, FrameRange region, double hop_s, const SegmentationConfig& cfg) {
  std::vector<Segment> out;
  const CovarianceScanner scanner(x.middleRows(region.begin, region.length()));
  const Eigen::Index margin = cfg.min_seg_frames / 2;
  const Eigen::Index initial = 2 * cfg.min_seg_frames;
  const Eigen::Index end = region.length();
  Eigen::Index start = 0;
  Eigen::Index window = initial;
  std::optional<double> pending_bic;
  while (true) {
    const Eigen::Index stop = std::min(start + window, end);
    if (stop - start >= 2 * margin) {
      double best = -std::numeric_limits<double>::infinity();
      Eigen::Index best_split = -1;
      for (Eigen::Index c = start + margin; c <= stop - margin; c += cfg.split_stride) {
        const double v = scanner.delta_bic(start, c, stop, cfg.lambda);
        if (v > best) {
          best = v;
          best_split = c;
        }
      }
      if (best > 0.0) {
        Segment seg = MakeSegment(region.begin + start, region.begin + best_split, hop_s, cfg);
        seg.start_delta_bic = pending_bic;
        out.push_back(seg);
        pending_bic = best;
        start = best_split;
        window = initial;
        continue;
      }
    }
    if (stop == end) {
      Segment seg = MakeSegment(region.begin + start, region.end, hop_s, cfg);
      seg.start_delta_bic = pending_bic;
      out.push_back(seg);
      break;
    }
    window += cfg.window_grow_frames;
  }
  return out;
}

}  // namespace

double log_det_covariance(const MatrixXd& x) {
  const RowVectorXd mean = x.colwise().mean();
  const MatrixXd centred = x.rowwise() - mean;
  return LogDetRidged((centred.transpose() * centred) / static_cast<double>(x.rows()));
}

double delta_bic(const MatrixXd& x, Eigen::Index split, double lambda) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (split < d + 1 || split > n - (d + 1)) {
    throw Error(ErrorCode::kInvalidArgument, "each side of the split needs at least d+1 rows");
  }
  const double n_all = static_cast<double>(n);
  const double n1 = static_cast<double>(split);
  const double n2 = static_cast<double>(n - split);
  return 0.5 * n_all * log_det_covariance(x) - 0.5 * n1 * log_det_covariance(x.topRows(split)) -
         0.5 * n2 * log_det_covariance(x.bottomRows(n - split)) -
         0.5 * lambda * bic_param_count(d) * std::log(n_all);
}

std::vector<Segment> detect_change_points(const FeatureMatrix& features, const std::vector<FrameRange>& regions,
                                          const SegmentationConfig& cfg) {
  const Eigen::Index d = BicDims(features, cfg);
  CheckConfig(cfg, d);
  const MatrixXd x = features.vectors.leftCols(d);
  const double hop_s = features.hop_ms / 1000.0;
  for (const FrameRange& r : regions) {
    if (r.begin < 0 || r.end > features.n_frames() || r.length() <= 0) {
      throw Error(ErrorCode::kInvalidArgument, "speech region outside the feature matrix");
    }
  }
  std::vector<std::vector<Segment>> per_region(regions.size());
  ParallelFor(regions.size(), cfg.jobs, [&](std::size_t i) {
    per_region[i] = ScanRegion(x, regions[i], hop_s, cfg);
  });
  std::vector<Segment> out;
  for (auto& segs : per_region) out.insert(out.end(), segs.begin(), segs.end());
  return out;
}

std::vector<Segment> refine_boundaries(std::vector<Segment> segments, const FeatureMatrix& features,
                                       const SegmentationConfig& cfg) {
  const Eigen::Index d = BicDims(features, cfg);
  if (cfg.refine_radius_frames <= 0 || segments.size() < 2) return segments;
  const MatrixXd x = features.vectors.leftCols(d);
  const double hop_s = features.hop_ms / 1000.0;
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    Segment& left = segments[i];
    Segment& right = segments[i + 1];
    if (left.end_frame != right.start_frame) continue;  // silence between them
    const Eigen::Index a = left.start_frame;
    const Eigen::Index b = right.end_frame;
    const Eigen::Index boundary = left.end_frame;
    const Eigen::Index lo = std::max(boundary - cfg.refine_radius_frames, a + d + 1);
    const Eigen::Index hi = std::min(boundary + cfg.refine_radius_frames, b - (d + 1));
    if (lo > hi) continue;
    const CovarianceScanner scanner(x.middleRows(a, b - a));
    double best = -std::numeric_limits<double>::infinity();
    Eigen::Index best_split = boundary;
    for (Eigen::Index c = lo; c <= hi; ++c) {
      const double v = scanner.delta_bic(0, c - a, b - a, cfg.lambda);
      if (v > best) {
        best = v;
        best_split = c;
      }
    }
    if (best > 0.0) {
      left.end_frame = best_split;
      right.start_frame = best_split;
      left.end_s = static_cast<double>(best_split) * hop_s;
      right.start_s = left.end_s;
      left.short_segment = left.length() < cfg.min_seg_frames;
      right.short_segment = right.length() < cfg.min_seg_frames;
      right.start_delta_bic = best;
    }
  }
  return segments;
}

void write_boundaries_csv(std::ostream& os, const std::vector<Segment>& segments) {
  os << "boundary_frame,delta_bic\n" << std::setprecision(10);
  for (const Segment& s : segments) {
    if (s.start_delta_bic) os << s.start_frame << "," << *s.start_delta_bic << "\n";
  }
}

}  // namespace gmmdiar
