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

#include "gmmdiar/pipeline.h"

#include <filesystem>
#include <limits>

namespace gmmdiar {

namespace {

template <typename Fn>
auto Stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

}  // namespace

std::string file_id_from_path(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

Diarization make_diarization(const std::string& file_id, const std::vector<Segment>& segments,
                             const std::vector<int>& labels) {
  Diarization out;
  out.file_id = file_id;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const std::string label = "S" + std::to_string(labels[i]);
    const Segment& s = segments[i];
    const bool touches = i > 0 && segments[i - 1].end_frame == s.start_frame;
    if (touches && out.turns.back().speaker == label) {
      out.turns.back().duration_s = s.end_s - out.turns.back().onset_s;
      continue;
    }
    out.turns.push_back({s.start_s, s.end_s - s.start_s, label});
  }
  return out;
}

PipelineResult run_pipeline(const AudioBuffer& audio, const PipelineConfig& config, const std::string& file_id) {
  Stage("config", [&] {
    config.validate();
    return 0;
  });
  PipelineResult r;
  r.diarization.file_id = file_id;

  r.frame_energies = Stage("vad", [&] {
    return frame_rms(audio, ms_to_samples(config.frame_ms, audio.sample_rate_hz()),
                     ms_to_samples(config.hop_ms, audio.sample_rate_hz()));
  });
  r.vad = Stage("vad", [&] { return detect_speech(r.frame_energies, config.vad); });

  r.features = Stage("features", [&] {
    return stack_deltas(mfcc(audio, config.mfcc(), file_id), config.delta_width);
  });
  if (r.features.n_frames() != r.frame_energies.size()) {
    throw StageError("features", Error(ErrorCode::kShapeMismatch, "feature and energy frame counts differ"));
  }

  if (r.vad.speech_regions.empty()) {
    Warn("no speech detected");
    return r;
  }

  const SegmentationConfig seg_cfg = config.segmentation();
  r.segments = Stage("segmentation", [&] {
    return refine_boundaries(detect_change_points(r.features, r.vad.speech_regions, seg_cfg), r.features, seg_cfg);
  });

  const ClusteringConfig cl_cfg = config.clustering();
  Stage("clustering", [&] {
    if (config.threshold) {
      r.threshold = *config.threshold;
      r.clustering = agglomerate(r.segments, r.features, r.threshold, cl_cfg);
    } else {
      r.clustering = agglomerate(r.segments, r.features, std::numeric_limits<double>::infinity(), cl_cfg);
      r.threshold = auto_threshold(r.clustering.dendrogram);
      r.clustering.labels = labels_at_threshold(r.clustering.dendrogram, r.threshold);
    }
    return 0;
  });

  r.diarization = make_diarization(file_id, r.segments, r.clustering.labels);
  return r;
}

PipelineResult run_pipeline(const std::string& wav_path, const PipelineConfig& config) {
  const AudioBuffer audio = Stage("load_wav", [&] { return load_wav(wav_path); });
  return run_pipeline(audio, config, file_id_from_path(wav_path));
}

}  // namespace gmmdiar
