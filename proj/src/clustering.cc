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

#include "gmmdiar/clustering.h"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>

namespace gmmdiar {

namespace {

std::vector<Eigen::Index> ByDescendingWeight(const GaussianMixtureD& g) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(g.n_components()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&g](Eigen::Index i, Eigen::Index j) { return g.weights[i] > g.weights[j]; });
  return order;
}

// `lead` has at least as many components as `other`.
double PairedDistance(const GaussianMixtureD& lead, const GaussianMixtureD& other) {
  std::vector<bool> taken(static_cast<std::size_t>(other.n_components()), false);
  Eigen::Index remaining = other.n_components();
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i : ByDescendingWeight(lead)) {
    if (remaining == 0) break;
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index best_j = -1;
    for (Eigen::Index j = 0; j < other.n_components(); ++j) {
      if (taken[static_cast<std::size_t>(j)]) continue;
      const double kl = kl_sym_diag(lead.means.row(i), lead.variances.row(i), other.means.row(j),
                                    other.variances.row(j));
      if (kl < best) {
        best = kl;
        best_j = j;
      }
    }
    taken[static_cast<std::size_t>(best_j)] = true;
    --remaining;
    const double w = std::min(lead.weights[i], other.weights[best_j]);
    num += w * best;
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

MatrixXd PoolRows(const std::vector<int>& members, const std::vector<Segment>& segments, const MatrixXd& x) {
  Eigen::Index total = 0;
  for (int s : members) total += segments[static_cast<std::size_t>(s)].length();
  MatrixXd pooled(total, x.cols());
  Eigen::Index at = 0;
  for (int s : members) {
    const Segment& seg = segments[static_cast<std::size_t>(s)];
    pooled.middleRows(at, seg.length()) = x.middleRows(seg.start_frame, seg.length());
    at += seg.length();
  }
  return pooled;
}

std::vector<int> RelabelByFirstAppearance(const std::vector<int>& raw) {
  std::map<int, int> remap;
  std::vector<int> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto it = remap.find(raw[i]);
    if (it == remap.end()) it = remap.emplace(raw[i], static_cast<int>(remap.size())).first;
    out[i] = it->second;
  }
  return out;
}

// Union-find style replay over merge records.
class Replay {
 public:
  explicit Replay(const Dendrogram& d) : parent_(static_cast<std::size_t>(d.leaf_count + d.merges.size())) {
    std::iota(parent_.begin(), parent_.end(), 0);
    live_ = d.leaf_count;
  }

  void apply(const Merge& m) {
    parent_[static_cast<std::size_t>(m.cluster_a)] = m.new_id;
    parent_[static_cast<std::size_t>(m.cluster_b)] = m.new_id;
    --live_;
  }

  int live() const { return live_; }

  std::vector<int> labels(int leaf_count) const {
    std::vector<int> raw(static_cast<std::size_t>(leaf_count));
    for (int leaf = 0; leaf < leaf_count; ++leaf) {
      int r = leaf;
      while (parent_[static_cast<std::size_t>(r)] != r) r = parent_[static_cast<std::size_t>(r)];
      raw[static_cast<std::size_t>(leaf)] = r;
    }
    return RelabelByFirstAppearance(raw);
  }

 private:
  std::vector<int> parent_;
  int live_ = 0;
};

}  // namespace

double gmm_distance(const GaussianMixtureD& a, const GaussianMixtureD& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::kShapeMismatch, "mixtures have different dimensions");
  if (a.n_components() > b.n_components()) return PairedDistance(a, b);
  if (b.n_components() > a.n_components()) return PairedDistance(b, a);
  return 0.5 * (PairedDistance(a, b) + PairedDistance(b, a));
}

GaussianMixtureD fit_segment_model(const MatrixXd& frames, const ClusteringConfig& cfg, std::uint64_t seed) {
  if (frames.rows() == 0) throw Error(ErrorCode::kEmptyInput, "cannot model an empty segment");
  if (cfg.max_components < 1 || cfg.frames_per_component < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_components and frames_per_component must be >= 1");
  }
  const auto by_length = static_cast<int>(frames.rows() / cfg.frames_per_component);
  const int m_hi = std::max(1, std::min(cfg.max_components, by_length));
  EmConfig em = cfg.em;
  em.seed = seed;
  // Candidates are fitted sequentially; callers parallelise across segments.
  return select_n_components(frames, 1, m_hi, Criterion::kBic, em, 1).best().model;
}

GaussianMixtureD fit_segment_model(const Segment& segment, const FeatureMatrix& features,
                                   const ClusteringConfig& cfg, std::uint64_t seed) {
  const MatrixXd rows = features.vectors.middleRows(segment.start_frame, segment.length());
  if (segment.short_segment) {
    ClusteringConfig single = cfg;
    single.max_components = 1;
    return fit_segment_model(rows, single, seed);
  }
  return fit_segment_model(rows, cfg, seed);
}

Agglomeration agglomerate(const std::vector<Segment>& segments, const FeatureMatrix& features, double threshold,
                          const ClusteringConfig& cfg) {
  if (segments.empty()) throw Error(ErrorCode::kEmptyInput, "no segments to cluster");
  if (!(threshold >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "threshold must be nonnegative");
  const auto leaf_count = static_cast<int>(segments.size());
  Agglomeration out;
  out.dendrogram.leaf_count = leaf_count;

  std::vector<Cluster> live(segments.size());
  ParallelFor(segments.size(), cfg.jobs, [&](std::size_t i) {
    Cluster& c = live[i];
    c.id = static_cast<int>(i);
    c.member_segments = {c.id};
    c.n_frames = segments[i].length();
    c.model = fit_segment_model(segments[i], features, cfg, DeriveSeed(cfg.em.seed, i));
  });

  // Distances keyed by (smaller id, larger id); map order gives the tie-break.
  std::map<std::pair<int, int>, double> dist;
  {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < leaf_count; ++i)
      for (int j = i + 1; j < leaf_count; ++j) pairs.emplace_back(i, j);
    std::vector<double> values(pairs.size());
    ParallelFor(pairs.size(), cfg.jobs, [&](std::size_t k) {
      values[k] = gmm_distance(live[static_cast<std::size_t>(pairs[k].first)].model,
                               live[static_cast<std::size_t>(pairs[k].second)].model);
    });
    for (std::size_t k = 0; k < pairs.size(); ++k) dist.emplace(pairs[k], values[k]);
  }

  int next_id = leaf_count;
  while (live.size() > 1) {
    auto best = dist.begin();
    for (auto it = dist.begin(); it != dist.end(); ++it) {
      if (it->second < best->second) best = it;
    }
    if (best->second > threshold) break;
    const auto [id_a, id_b] = best->first;
    const double merge_distance = best->second;

    auto find = [&live](int id) {
      return std::find_if(live.begin(), live.end(), [id](const Cluster& c) { return c.id == id; });
    };
    Cluster merged;
    merged.id = next_id++;
    {
      auto a = find(id_a);
      auto b = find(id_b);
      merged.member_segments = a->member_segments;
      merged.member_segments.insert(merged.member_segments.end(), b->member_segments.begin(),
                                    b->member_segments.end());
      std::sort(merged.member_segments.begin(), merged.member_segments.end());
      merged.n_frames = a->n_frames + b->n_frames;
    }
    merged.model = fit_segment_model(PoolRows(merged.member_segments, segments, features.vectors), cfg,
                                     DeriveSeed(cfg.em.seed, static_cast<std::uint64_t>(merged.id)));
    live.erase(find(id_a));
    live.erase(find(id_b));
    for (auto it = dist.begin(); it != dist.end();) {
      const auto [i, j] = it->first;
      it = (i == id_a || i == id_b || j == id_a || j == id_b) ? dist.erase(it) : std::next(it);
    }
    std::vector<double> values(live.size());
    ParallelFor(live.size(), cfg.jobs, [&](std::size_t k) { values[k] = gmm_distance(live[k].model, merged.model); });
    for (std::size_t k = 0; k < live.size(); ++k) dist.emplace(std::make_pair(live[k].id, merged.id), values[k]);

    out.dendrogram.merges.push_back({id_a, id_b, merge_distance, merged.id});
    live.push_back(std::move(merged));
  }

  std::vector<int> raw(segments.size());
  for (const Cluster& c : live)
    for (int s : c.member_segments) raw[static_cast<std::size_t>(s)] = c.id;
  out.labels = RelabelByFirstAppearance(raw);
  out.clusters = std::move(live);
  return out;
}

std::vector<int> cut_dendrogram(const Dendrogram& dendrogram, int k) {
  if (k < 1 || k > dendrogram.leaf_count) throw Error(ErrorCode::kInvalidArgument, "k outside [1, leaf_count]");
  Replay replay(dendrogram);
  for (const Merge& m : dendrogram.merges) {
    if (replay.live() == k) break;
    replay.apply(m);
  }
  if (replay.live() != k) {
    throw Error(ErrorCode::kInvalidArgument, "dendrogram stops before reaching " + std::to_string(k) + " clusters");
  }
  return replay.labels(dendrogram.leaf_count);
}

std::vector<int> labels_at_threshold(const Dendrogram& dendrogram, double threshold) {
  Replay replay(dendrogram);
  for (const Merge& m : dendrogram.merges) {
    if (m.distance > threshold) break;
    replay.apply(m);
  }
  return replay.labels(dendrogram.leaf_count);
}

double auto_threshold(const Dendrogram& dendrogram) {
  std::vector<double> d;
  for (const Merge& m : dendrogram.merges) d.push_back(m.distance);
  if (d.empty()) return 0.0;
  std::sort(d.begin(), d.end());
  if (d.size() == 1) return d.front();
  std::size_t widest = 0;
  for (std::size_t i = 1; i + 1 < d.size(); ++i) {
    if (d[i + 1] - d[i] > d[widest + 1] - d[widest]) widest = i;
  }
  return 0.5 * (d[widest] + d[widest + 1]);
}

void write_dendrogram_csv(std::ostream& os, const Dendrogram& dendrogram) {
  os << "step,cluster_a,cluster_b,distance,new_id\n" << std::setprecision(17);
  for (std::size_t i = 0; i < dendrogram.merges.size(); ++i) {
    const Merge& m = dendrogram.merges[i];
    os << i << "," << m.cluster_a << "," << m.cluster_b << "," << m.distance << "," << m.new_id << "\n";
  }
}

}  // namespace gmmdiar
