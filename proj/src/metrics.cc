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

#include "gmmdiar/metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "gmmdiar/common.h"

namespace gmmdiar {

WordSequence WordSequence::from_text(const std::string& text) {
  WordSequence out;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out.tokens.push_back(token);
  }
  return out;
}

WerResult wer(const WordSequence& reference, const WordSequence& hypothesis) {
  const std::size_t n = reference.size();
  const std::size_t m = hypothesis.size();
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "WER needs a non-empty reference");
  // cost[i][j]: edit distance between ref[0, i) and hyp[0, j).
  std::vector<std::vector<int>> cost(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) cost[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) cost[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const int sub = cost[i - 1][j - 1] + (reference.tokens[i - 1] == hypothesis.tokens[j - 1] ? 0 : 1);
      cost[i][j] = std::min({sub, cost[i][j - 1] + 1, cost[i - 1][j] + 1});
    }
  }
  WerResult out;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = reference.tokens[i - 1] == hypothesis.tokens[j - 1];
      if (cost[i][j] == cost[i - 1][j - 1] + (same ? 0 : 1)) {
        if (!same) ++out.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && cost[i][j] == cost[i][j - 1] + 1) {
      ++out.insertions;
      --j;
    } else {
      ++out.deletions;
      --i;
    }
  }
  out.rate = static_cast<double>(out.errors()) / static_cast<double>(n);
  return out;
}

void LabeledTimeline::validate() const {
  for (const TimelineEntry& e : entries) {
    if (!(e.end_s > e.start_s)) throw Error(ErrorCode::kInvalidArgument, "timeline entry with end <= start");
  }
}

namespace {

long ToGrid(double seconds) { return std::lround(seconds / kDerGridSeconds); }

// Per speaker, a boolean activity track on the evaluation grid.
struct Tracks {
  std::vector<std::string> speakers;
  std::vector<std::vector<bool>> active;
};

Tracks Rasterize(const LabeledTimeline& timeline, long n_frames) {
  Tracks t;
  std::map<std::string, std::size_t> index;
  for (const TimelineEntry& e : timeline.entries) {
    auto it = index.find(e.speaker);
    if (it == index.end()) {
      it = index.emplace(e.speaker, t.speakers.size()).first;
      t.speakers.push_back(e.speaker);
      t.active.emplace_back(static_cast<std::size_t>(n_frames), false);
    }
    const long a = std::clamp(ToGrid(e.start_s), 0L, n_frames);
    const long b = std::clamp(ToGrid(e.end_s), 0L, n_frames);
    std::fill(t.active[it->second].begin() + a, t.active[it->second].begin() + b, true);
  }
  return t;
}

}  // namespace

DerResult der(const LabeledTimeline& reference, const LabeledTimeline& hypothesis, double collar_s) {
  reference.validate();
  hypothesis.validate();
  if (collar_s < 0.0) throw Error(ErrorCode::kInvalidArgument, "collar must be nonnegative");
  long n_frames = 0;
  for (const auto* tl : {&reference, &hypothesis})
    for (const TimelineEntry& e : tl->entries) n_frames = std::max(n_frames, ToGrid(e.end_s));

  const Tracks ref = Rasterize(reference, n_frames);
  const Tracks hyp = Rasterize(hypothesis, n_frames);
  if (ref.speakers.size() > static_cast<std::size_t>(kMaxDerSpeakers)) {
    throw Error(ErrorCode::kInvalidArgument, "more than 8 reference speakers");
  }

  std::vector<bool> scored(static_cast<std::size_t>(n_frames), true);
  const long collar = ToGrid(collar_s);
  if (collar > 0) {
    for (const TimelineEntry& e : reference.entries) {
      for (long b : {ToGrid(e.start_s), ToGrid(e.end_s)}) {
        const long lo = std::clamp(b - collar, 0L, n_frames);
        const long hi = std::clamp(b + collar, 0L, n_frames);
        std::fill(scored.begin() + lo, scored.begin() + hi, false);
      }
    }
  }

  const std::size_t n_ref = ref.speakers.size();
  const std::size_t n_hyp = hyp.speakers.size();
  std::vector<std::vector<long>> overlap(n_hyp, std::vector<long>(n_ref, 0));
  long ref_total = 0, miss = 0, fa = 0, joint = 0;
  for (long t = 0; t < n_frames; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    if (!scored[ut]) continue;
    long nr = 0, nh = 0;
    for (std::size_t r = 0; r < n_ref; ++r) nr += ref.active[r][ut];
    for (std::size_t h = 0; h < n_hyp; ++h) {
      if (!hyp.active[h][ut]) continue;
      ++nh;
      for (std::size_t r = 0; r < n_ref; ++r) overlap[h][r] += ref.active[r][ut];
    }
    ref_total += nr;
    miss += std::max(0L, nr - nh);
    fa += std::max(0L, nh - nr);
    joint += std::min(nr, nh);
  }
  if (ref_total == 0) throw Error(ErrorCode::kEmptyInput, "reference has no scored speech");

  // best[mask]: maximal overlap using hypothesis speakers processed so far,
  // with `mask` the set of reference speakers already taken. Exact over all
  // one-to-one partial mappings.
  const std::size_t states = std::size_t{1} << n_ref;
  std::vector<long> best(states, -1);
  best[0] = 0;
  for (std::size_t h = 0; h < n_hyp; ++h) {
    std::vector<long> next = best;
    for (std::size_t mask = 0; mask < states; ++mask) {
      if (best[mask] < 0) continue;
      for (std::size_t r = 0; r < n_ref; ++r) {
        if (mask & (std::size_t{1} << r)) continue;
        const std::size_t to = mask | (std::size_t{1} << r);
        next[to] = std::max(next[to], best[mask] + overlap[h][r]);
      }
    }
    best = std::move(next);
  }
  const long correct = *std::max_element(best.begin(), best.end());

  DerResult out;
  out.reference_s = static_cast<double>(ref_total) * kDerGridSeconds;
  out.missed_s = static_cast<double>(miss) * kDerGridSeconds;
  out.false_alarm_s = static_cast<double>(fa) * kDerGridSeconds;
  out.confusion_s = static_cast<double>(joint - correct) * kDerGridSeconds;
  out.rate = (out.missed_s + out.false_alarm_s + out.confusion_s) / out.reference_s;
  return out;
}

}  // namespace gmmdiar
