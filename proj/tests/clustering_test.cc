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

#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "gmmdiar/clustering.h"

using namespace gmmdiar;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GaussianMixtureD RandomModel(std::mt19937_64& rng, int m_count, int d) {
  std::uniform_real_distribution<double> u(0.2, 3.0);
  std::normal_distribution<double> g;
  GaussianMixtureD model;
  model.weights.resize(m_count);
  model.means.resize(m_count, d);
  model.variances.resize(m_count, d);
  for (int m = 0; m < m_count; ++m) {
    model.weights[m] = u(rng);
    for (int j = 0; j < d; ++j) {
      model.means(m, j) = 3.0 * g(rng);
      model.variances(m, j) = u(rng);
    }
  }
  model.weights /= model.weights.sum();
  return model;
}

// Closed-form symmetric KL between two diagonal Gaussians, one dimension
// at a time.
double KlSymOracle(const RowVectorXd& mp, const RowVectorXd& vp, const RowVectorXd& mq, const RowVectorXd& vq) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mp.size(); ++i) {
    const double kl_pq = 0.5 * (std::log(vq[i] / vp[i]) + (vp[i] + (mp[i] - mq[i]) * (mp[i] - mq[i])) / vq[i] - 1.0);
    const double kl_qp = 0.5 * (std::log(vp[i] / vq[i]) + (vq[i] + (mp[i] - mq[i]) * (mp[i] - mq[i])) / vp[i] - 1.0);
    acc += kl_pq + kl_qp;
  }
  return acc;
}

// Six alternating segments from two speakers with an 8 sigma mean gap.
struct SixSegments {
  FeatureMatrix features;
  std::vector<Segment> segments;
  std::vector<int> truth{0, 1, 0, 1, 0, 1};
};

SixSegments MakeSixSegments(std::uint64_t seed, Eigen::Index frames = 200, Eigen::Index d = 3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  SixSegments s;
  s.features.vectors.resize(6 * frames, d);
  s.features.hop_ms = 10.0;
  for (int k = 0; k < 6; ++k) {
    const double mean = k % 2 == 0 ? 0.0 : 8.0;
    for (Eigen::Index t = 0; t < frames; ++t)
      for (Eigen::Index j = 0; j < d; ++j) s.features.vectors(k * frames + t, j) = mean + g(rng);
    Segment seg;
    seg.start_frame = k * frames;
    seg.end_frame = (k + 1) * frames;
    s.segments.push_back(seg);
  }
  return s;
}

int CountDistinct(const std::vector<int>& labels) {
  return static_cast<int>(std::set<int>(labels.begin(), labels.end()).size());
}

}  // namespace

TEST_CASE("symmetric KL closed form") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const GaussianMixtureD a = RandomModel(rng, 1, 1 + trial % 5);
    const GaussianMixtureD b = RandomModel(rng, 1, 1 + trial % 5);
    const double expected = KlSymOracle(a.means.row(0), a.variances.row(0), b.means.row(0), b.variances.row(0));
    CHECK(kl_sym_diag(a.means.row(0), a.variances.row(0), b.means.row(0), b.variances.row(0)) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(gmm_distance(a, b) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("gmm_distance examples") {
  GaussianMixtureD p{VectorXd::Ones(1), MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1)};
  GaussianMixtureD q = p;
  q.means(0, 0) = 3.0;
  CHECK(gmm_distance(p, q) == 9.0);
  CHECK(gmm_distance(p, p) == 0.0);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const GaussianMixtureD a = RandomModel(rng, 1 + trial % 4, 3);
    const GaussianMixtureD b = RandomModel(rng, 1 + (trial / 4) % 4, 3);
    CHECK(gmm_distance(a, a) == 0.0);
    CHECK(gmm_distance(a, b) == gmm_distance(b, a));
    CHECK(gmm_distance(a, b) >= 0.0);
  }
  CHECK_THROWS_AS(gmm_distance(RandomModel(rng, 1, 2), RandomModel(rng, 1, 3)), Error);
}

TEST_CASE("gmm_distance pairs by descending weight") {
  // Larger model: heavy component at 0, light one at 10. Smaller model sits
  // at 10, so the heavy component claims it first.
  GaussianMixtureD big{VectorXd(2), MatrixXd(2, 1), MatrixXd::Ones(2, 1)};
  big.weights << 0.8, 0.2;
  big.means << 0.0, 10.0;
  GaussianMixtureD small{VectorXd::Ones(1), MatrixXd::Constant(1, 1, 10.0), MatrixXd::Ones(1, 1)};
  CHECK(gmm_distance(big, small) == 100.0);
  CHECK(gmm_distance(small, big) == 100.0);
}

TEST_CASE("fit_segment_model component counts") {
  ClusteringConfig cfg;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  MatrixXd sixty(60, 2);
  for (Eigen::Index i = 0; i < sixty.size(); ++i) sixty.data()[i] = 10.0 * g(rng);
  CHECK(fit_segment_model(sixty, cfg, 1).n_components() == 1);

  int twos = 0;
  for (int trial = 0; trial < 20; ++trial) {
    MatrixXd x(400, 2);
    for (Eigen::Index t = 0; t < 400; ++t)
      for (Eigen::Index j = 0; j < 2; ++j) x(t, j) = (t % 2 == 0 ? 0.0 : 10.0) + g(rng);
    if (fit_segment_model(x, cfg, static_cast<std::uint64_t>(trial)).n_components() == 2) ++twos;
    ClusteringConfig one = cfg;
    one.max_components = 1;
    CHECK(fit_segment_model(x, one, 1).n_components() == 1);
  }
  CHECK(twos >= 16);

  Segment flagged;
  flagged.start_frame = 0;
  flagged.end_frame = 400;
  flagged.short_segment = true;
  FeatureMatrix f;
  f.vectors = MatrixXd::Random(400, 2) * 10.0;
  CHECK(fit_segment_model(flagged, f, cfg, 1).n_components() == 1);
}

TEST_CASE("agglomerate threshold extremes") {
  const SixSegments s = MakeSixSegments(4);
  ClusteringConfig cfg;
  const Agglomeration none = agglomerate(s.segments, s.features, 0.0, cfg);
  CHECK(none.labels == std::vector<int>{0, 1, 2, 3, 4, 5});
  CHECK(none.dendrogram.merges.empty());
  CHECK(none.clusters.size() == 6);

  const Agglomeration all = agglomerate(s.segments, s.features, kInf, cfg);
  CHECK(all.dendrogram.merges.size() == 5);
  CHECK(all.labels == std::vector<int>(6, 0));
  CHECK(all.clusters.size() == 1);
  CHECK(all.clusters[0].n_frames == 1200);

  std::set<int> ids;
  for (const Merge& m : all.dendrogram.merges) {
    CHECK(ids.insert(m.new_id).second);
    CHECK(m.new_id >= 6);
  }
  CHECK_THROWS_AS(agglomerate({}, s.features, 1.0, cfg), Error);
  CHECK_THROWS_AS(agglomerate(s.segments, s.features, -1.0, cfg), Error);
}

TEST_CASE("first merge is the closest leaf pair") {
  const SixSegments s = MakeSixSegments(5);
  ClusteringConfig cfg;
  const Agglomeration all = agglomerate(s.segments, s.features, kInf, cfg);
  std::vector<GaussianMixtureD> leaves;
  for (std::size_t i = 0; i < 6; ++i) {
    leaves.push_back(fit_segment_model(s.segments[i], s.features, cfg, DeriveSeed(cfg.em.seed, i)));
  }
  double best = kInf;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      best = std::min(best, gmm_distance(leaves[static_cast<std::size_t>(i)], leaves[static_cast<std::size_t>(j)]));
  const Merge& first = all.dendrogram.merges.front();
  CHECK(first.distance == best);
  CHECK(first.distance == gmm_distance(leaves[static_cast<std::size_t>(first.cluster_a)],
                                       leaves[static_cast<std::size_t>(first.cluster_b)]));
}

TEST_CASE("two speakers recovered with a calibrated threshold") {
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    const SixSegments s = MakeSixSegments(seed);
    ClusteringConfig cfg;
    const Agglomeration full = agglomerate(s.segments, s.features, kInf, cfg);
    const double t = auto_threshold(full.dendrogram);
    const Agglomeration stopped = agglomerate(s.segments, s.features, t, cfg);
    CHECK(stopped.labels == s.truth);
    CHECK(cut_dendrogram(full.dendrogram, 2) == stopped.labels);
    CHECK(labels_at_threshold(full.dendrogram, t) == stopped.labels);
  }
}

TEST_CASE("threshold monotonicity and determinism") {
  const SixSegments s = MakeSixSegments(6, 120);
  ClusteringConfig cfg;
  const Agglomeration full = agglomerate(s.segments, s.features, kInf, cfg);
  std::vector<double> thresholds{0.0};
  for (const Merge& m : full.dendrogram.merges) thresholds.push_back(m.distance);
  std::sort(thresholds.begin(), thresholds.end());
  int previous = 7;
  for (double t : thresholds) {
    const Agglomeration a = agglomerate(s.segments, s.features, t, cfg);
    CHECK(CountDistinct(a.labels) <= previous);
    previous = CountDistinct(a.labels);
  }

  ClusteringConfig parallel = cfg;
  parallel.jobs = 4;
  const Agglomeration again = agglomerate(s.segments, s.features, kInf, parallel);
  REQUIRE(again.dendrogram.merges.size() == full.dendrogram.merges.size());
  for (std::size_t i = 0; i < again.dendrogram.merges.size(); ++i) {
    CHECK(again.dendrogram.merges[i].distance == full.dendrogram.merges[i].distance);
    CHECK(again.dendrogram.merges[i].new_id == full.dendrogram.merges[i].new_id);
  }
}

TEST_CASE("dendrogram replay") {
  Dendrogram d;
  d.leaf_count = 4;
  d.merges = {{0, 2, 1.0, 4}, {1, 3, 2.0, 5}, {4, 5, 9.0, 6}};
  CHECK(cut_dendrogram(d, 4) == std::vector<int>{0, 1, 2, 3});
  CHECK(cut_dendrogram(d, 3) == std::vector<int>{0, 1, 0, 2});
  CHECK(cut_dendrogram(d, 2) == std::vector<int>{0, 1, 0, 1});
  CHECK(cut_dendrogram(d, 1) == std::vector<int>{0, 0, 0, 0});
  CHECK_THROWS_AS(cut_dendrogram(d, 0), Error);
  CHECK_THROWS_AS(cut_dendrogram(d, 5), Error);
  CHECK(labels_at_threshold(d, 1.5) == std::vector<int>{0, 1, 0, 2});

  // Sorted distances 1, 2, 9: widest gap is between 2 and 9.
  CHECK(auto_threshold(d) == 5.5);
  CHECK(auto_threshold(Dendrogram{{}, 3}) == 0.0);
  CHECK(auto_threshold(Dendrogram{{{0, 1, 4.0, 2}}, 2}) == 4.0);

  Dendrogram partial{{{0, 1, 1.0, 3}}, 3};
  CHECK_THROWS_AS(cut_dendrogram(partial, 1), Error);

  std::ostringstream os;
  write_dendrogram_csv(os, d);
  CHECK(os.str() == "step,cluster_a,cluster_b,distance,new_id\n0,0,2,1,4\n1,1,3,2,5\n2,4,5,9,6\n");
}
