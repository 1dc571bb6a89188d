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

#ifndef GMMDIAR_METRICS_H_
#define GMMDIAR_METRICS_H_

#include <string>
#include <vector>

#include "gmmdiar/common.h"

namespace gmmdiar {

// Lower-cased, whitespace-split tokens.
struct WordSequence {
  std::vector<std::string> tokens;

  static WordSequence from_text(const std::string& text);
  std::size_t size() const { return tokens.size(); }
};

struct WerResult {
  double rate = 0.0;
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;

  int errors() const { return substitutions + insertions + deletions; }
};

// Unit-cost Levenshtein alignment. Counts come from one optimal path;
// the backtrace prefers substitution, then insertion, then deletion.
WerResult wer(const WordSequence& reference, const WordSequence& hypothesis);

struct TimelineEntry {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string speaker;
};

struct LabeledTimeline {
  std::vector<TimelineEntry> entries;

  // Throws unless every entry has end > start.
  void validate() const;
};

struct DerResult {
  double rate = 0.0;
  double missed_s = 0.0;
  double false_alarm_s = 0.0;
  double confusion_s = 0.0;
  double reference_s = 0.0;
};

inline constexpr double kDerGridSeconds = 0.01;
inline constexpr int kMaxDerSpeakers = 8;

// Frame-level DER on a 10 ms grid. Frames within collar_s of a reference
// boundary are not scored. The reference-to-hypothesis speaker mapping
// maximises total overlap over all one-to-one assignments.
DerResult der(const LabeledTimeline& reference, const LabeledTimeline& hypothesis, double collar_s = 0.25);

}  // namespace gmmdiar

#endif  // GMMDIAR_METRICS_H_
