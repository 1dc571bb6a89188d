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

#ifndef GMMDIAR_PIPELINE_H_
#define GMMDIAR_PIPELINE_H_

#include <string>
#include <vector>

#include "gmmdiar/audio_io.h"
#include "gmmdiar/clustering.h"
#include "gmmdiar/config.h"
#include "gmmdiar/features.h"
#include "gmmdiar/rttm.h"
#include "gmmdiar/segmentation.h"
#include "gmmdiar/vad.h"

namespace gmmdiar {

// An Error raised inside one pipeline stage, tagged with that stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), stage + ": " + cause.what()), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Every intermediate product, kept for CSV dumps and tests.
struct PipelineResult {
  Diarization diarization;
  VectorXd frame_energies;
  VadDecision vad;
  FeatureMatrix features;  // base + deltas
  std::vector<Segment> segments;
  Agglomeration clustering;
  double threshold = 0.0;
};

PipelineResult run_pipeline(const AudioBuffer& audio, const PipelineConfig& config, const std::string& file_id);
PipelineResult run_pipeline(const std::string& wav_path, const PipelineConfig& config);

// Adjacent segments that touch and share a label become one turn.
Diarization make_diarization(const std::string& file_id, const std::vector<Segment>& segments,
                             const std::vector<int>& labels);

// File name without directories or extension.
std::string file_id_from_path(const std::string& path);

}  // namespace gmmdiar

#endif  // GMMDIAR_PIPELINE_H_
