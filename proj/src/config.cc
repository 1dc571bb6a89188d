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

#include "gmmdiar/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace gmmdiar {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::kConfig, "invalid value '" + value + "' for key '" + key + "'");
  }
  return out;
}

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&)>;

template <typename T, typename Field>
Setter Number(Field field) {
  return [field](PipelineConfig& c, const std::string& k, const std::string& v) {
    field(c) = ParseNumber<T>(k, v);
  };
}

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> setters = {
      {"frame_ms", Number<double>([](PipelineConfig& c) -> double& { return c.frame_ms; })},
      {"hop_ms", Number<double>([](PipelineConfig& c) -> double& { return c.hop_ms; })},
      {"n_fft",
       [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.n_fft = v == "auto" ? 0 : ParseNumber<Eigen::Index>(k, v);
       }},
      {"n_filters", Number<int>([](PipelineConfig& c) -> int& { return c.n_filters; })},
      {"n_coeffs", Number<int>([](PipelineConfig& c) -> int& { return c.n_coeffs; })},
      {"delta_width", Number<int>([](PipelineConfig& c) -> int& { return c.delta_width; })},
      {"vad_alpha", Number<double>([](PipelineConfig& c) -> double& { return c.vad.alpha; })},
      {"vad_percentile", Number<double>([](PipelineConfig& c) -> double& { return c.vad.percentile; })},
      {"vad_hangover_frames", Number<int>([](PipelineConfig& c) -> int& { return c.vad.hangover_frames; })},
      {"vad_min_speech_frames", Number<int>([](PipelineConfig& c) -> int& { return c.vad.min_speech_frames; })},
      {"lambda", Number<double>([](PipelineConfig& c) -> double& { return c.lambda; })},
      {"min_seg_frames", Number<Eigen::Index>([](PipelineConfig& c) -> Eigen::Index& { return c.min_seg_frames; })},
      {"window_grow_frames",
       Number<Eigen::Index>([](PipelineConfig& c) -> Eigen::Index& { return c.window_grow_frames; })},
      {"refine_radius_frames",
       Number<Eigen::Index>([](PipelineConfig& c) -> Eigen::Index& { return c.refine_radius_frames; })},
      {"split_stride", Number<Eigen::Index>([](PipelineConfig& c) -> Eigen::Index& { return c.split_stride; })},
      {"bic_feature_dims",
       Number<Eigen::Index>([](PipelineConfig& c) -> Eigen::Index& { return c.bic_feature_dims; })},
      {"threshold",
       [](PipelineConfig& c, const std::string& k, const std::string& v) {
         if (v == "auto") {
           c.threshold.reset();
         } else {
           c.threshold = ParseNumber<double>(k, v);
         }
       }},
      {"max_components", Number<int>([](PipelineConfig& c) -> int& { return c.max_components; })},
      {"frames_per_component",
       Number<Eigen::Index>([](PipelineConfig& c) -> Eigen::Index& { return c.frames_per_component; })},
      {"em_max_iters", Number<int>([](PipelineConfig& c) -> int& { return c.em_max_iters; })},
      {"em_tol", Number<double>([](PipelineConfig& c) -> double& { return c.em_tol; })},
      {"em_restarts", Number<int>([](PipelineConfig& c) -> int& { return c.em_restarts; })},
      {"seed", Number<std::uint64_t>([](PipelineConfig& c) -> std::uint64_t& { return c.seed; })},
      {"jobs", Number<int>([](PipelineConfig& c) -> int& { return c.jobs; })},
  };
  return setters;
}

void Require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kConfig, message);
}

}  // namespace

MfccConfig PipelineConfig::mfcc() const {
  MfccConfig m;
  m.frame_ms = frame_ms;
  m.hop_ms = hop_ms;
  m.n_fft = n_fft;
  m.n_filters = n_filters;
  m.n_coeffs = n_coeffs;
  m.jobs = jobs;
  return m;
}

SegmentationConfig PipelineConfig::segmentation() const {
  SegmentationConfig s;
  s.lambda = lambda;
  s.min_seg_frames = min_seg_frames;
  s.window_grow_frames = window_grow_frames;
  s.refine_radius_frames = refine_radius_frames;
  s.split_stride = split_stride;
  s.feature_dims = bic_feature_dims;
  s.jobs = jobs;
  return s;
}

ClusteringConfig PipelineConfig::clustering() const {
  ClusteringConfig c;
  c.max_components = max_components;
  c.frames_per_component = frames_per_component;
  c.em.max_iters = em_max_iters;
  c.em.tol = em_tol;
  c.em.n_init = em_restarts;
  c.em.seed = seed;
  c.jobs = jobs;
  return c;
}

void PipelineConfig::validate() const {
  Require(frame_ms > 0.0 && hop_ms > 0.0, "frame_ms and hop_ms must be positive");
  Require(hop_ms <= frame_ms, "hop_ms must not exceed frame_ms");
  Require(n_fft == 0 || (n_fft > 0 && (n_fft & (n_fft - 1)) == 0), "n_fft must be auto or a power of two");
  Require(n_filters >= 2, "n_filters must be >= 2");
  Require(n_coeffs >= 1 && n_coeffs <= n_filters, "n_coeffs must lie in [1, n_filters]");
  Require(delta_width >= 1, "delta_width must be >= 1");
  Require(vad.alpha > 0.0 && vad.alpha < 1.0, "vad_alpha must lie in (0, 1)");
  Require(vad.percentile >= 0.0 && vad.percentile <= 100.0, "vad_percentile must lie in [0, 100]");
  Require(vad.hangover_frames >= 0 && vad.min_speech_frames >= 0, "VAD smoothing lengths must be >= 0");
  Require(lambda > 0.0, "lambda must be positive");
  Require(bic_feature_dims >= 1 && bic_feature_dims <= 3 * n_coeffs, "bic_feature_dims must lie in [1, 3*n_coeffs]");
  Require(min_seg_frames >= 2 * (bic_feature_dims + 1), "min_seg_frames must be >= 2*(bic_feature_dims+1)");
  Require(window_grow_frames >= 1 && split_stride >= 1 && refine_radius_frames >= 0,
          "window_grow_frames and split_stride must be >= 1");
  Require(!threshold || *threshold >= 0.0, "threshold must be nonnegative");
  Require(max_components >= 1 && frames_per_component >= 1, "max_components and frames_per_component must be >= 1");
  Require(em_max_iters >= 1 && em_tol > 0.0, "em_max_iters must be >= 1 and em_tol > 0");
  Require(em_restarts >= 1, "em_restarts must be >= 1");
  Require(jobs >= 1, "jobs must be >= 1");
}

PipelineConfig parse_config(const std::string& text, PipelineConfig base) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfig, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    const auto it = Setters().find(key);
    if (it == Setters().end()) {
      throw Error(ErrorCode::kConfig, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    it->second(base, key, value);
  }
  base.validate();
  return base;
}

PipelineConfig load_config(const std::string& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

}  // namespace gmmdiar
