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

#ifndef GMMDIAR_RTTM_H_
#define GMMDIAR_RTTM_H_

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "gmmdiar/metrics.h"

namespace gmmdiar {

struct Turn {
  double onset_s = 0.0;
  double duration_s = 0.0;
  std::string speaker;
};

// Onset-sorted, non-overlapping speaker turns for one recording.
struct Diarization {
  std::string file_id;
  std::vector<Turn> turns;
};

// SPEAKER <file> 1 <onset> <duration> <NA> <NA> <label> <NA> <NA>
void write_rttm(std::ostream& os, const Diarization& diarization);
std::string to_rttm(const Diarization& diarization);

// Reads SPEAKER lines; other record types and blank lines are skipped.
Diarization read_rttm(std::istream& is);
Diarization read_rttm_file(const std::string& path);

LabeledTimeline to_timeline(const Diarization& diarization);

}  // namespace gmmdiar

#endif  // GMMDIAR_RTTM_H_
