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

#ifndef GMMDIAR_CLUSTERING_H_
#define GMMDIAR_CLUSTERING_H_

#include <cstdint>
#include <ostream>
#include <vector>

#include "gmmdiar/common.h"
#include "gmmdiar/gmm.h"
#include "gmmdiar/segmentation.h"

namespace gmmdiar {

// Symmetric KL divergence between two diagonal Gaussians:
// sum_i 0.5 [vp/vq + vq/vp - 2 + (mp - mq)^2 (1/vp + 1/vq)].
template <typename Derived1, typename Derived2, typename Derived3, typename Derived4>
typename Derived1::Scalar kl_sym_diag(const Eigen::MatrixBase<Derived1>& mean_p,
                                      const Eigen::MatrixBase<Derived2>& var_p,
                                      const Eigen::MatrixBase<Derived3>& mean_q,
                                      const Eigen::MatrixBase<Derived4>& var_q) {
  using Scalar = typename Derived1::Scalar;
  const auto vp = var_p.array();
  const auto vq = var_q.array();
  return Scalar(0.5) *
         (vp / vq + vq / vp - Scalar(2) + (mean_p.array() - mean_q.array()).square() * (vp.inverse() + vq.inverse()))
             .sum();
}

// Matched-pair symmetric KL between mixtures. Components of the model with
// more components are visited in descending weight order and each takes the
// unpaired component of the other model closest in symmetric KL. The result
// is the min-weight-weighted mean KL over the pairs. Equal-sized models
// average both pairing directions so the distance is symmetric.
double gmm_distance(const GaussianMixtureD& a, const GaussianMixtureD& b);

struct ClusteringConfig {
  int max_components = 4;
  Eigen::Index frames_per_component = 50;
  EmConfig em;  // em.seed is the root seed for every model fit
  int jobs = 1;
};

// BIC-selected GMM over M in [1, min(max_components, n / frames_per_component)].
GaussianMixtureD fit_segment_model(const MatrixXd& frames, const ClusteringConfig& cfg, std::uint64_t seed);
GaussianMixtureD fit_segment_model(const Segment& segment, const FeatureMatrix& features,
                                   const ClusteringConfig& cfg, std::uint64_t seed);

struct Merge {
  int cluster_a = 0;
  int cluster_b = 0;
  double distance = 0.0;
  int new_id = 0;
};

// Leaves are ids 0..leaf_count-1; merge k creates id leaf_count + k.
struct Dendrogram {
  std::vector<Merge> merges;
  int leaf_count = 0;
};

struct Cluster {
  int id = 0;
  std::vector<int> member_segments;
  GaussianMixtureD model;
  Eigen::Index n_frames = 0;
};

struct Agglomeration {
  std::vector<int> labels;  // per segment, 0.. by first appearance
  Dendrogram dendrogram;
  std::vector<Cluster> clusters;  // live clusters at stop, ascending id
};

// Merges the closest live pair while its distance is <= threshold,
// refitting the merged model on the pooled frames. Ties go to the
// lexicographically smallest (id, id) pair.
Agglomeration agglomerate(const std::vector<Segment>& segments, const FeatureMatrix& features, double threshold,
                          const ClusteringConfig& cfg);

// Replays merges until k clusters remain.
std::vector<int> cut_dendrogram(const Dendrogram& dendrogram, int k);

// Replays merges while their distance is <= threshold.
std::vector<int> labels_at_threshold(const Dendrogram& dendrogram, double threshold);

// Midpoint of the widest gap between consecutive sorted merge distances.
double auto_threshold(const Dendrogram& dendrogram);

// CSV: step,cluster_a,cluster_b,distance,new_id
void write_dendrogram_csv(std::ostream& os, const Dendrogram& dendrogram);

}  // namespace gmmdiar

#endif  // GMMDIAR_CLUSTERING_H_
