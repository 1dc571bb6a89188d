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

#include <algorithm>
#include <random>
#include <string>

#include "doctest.h"
#include "gmmdiar/metrics.h"
#include "oracles.h"

using namespace gmmdiar;

namespace {

WordSequence Words(const std::string& text) { return WordSequence::from_text(text); }

std::vector<std::string> RandomTokens(std::mt19937_64& rng, int max_len, int vocab) {
  const int n = std::uniform_int_distribution<int>(0, max_len)(rng);
  std::uniform_int_distribution<int> pick(0, vocab - 1);
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("w" + std::to_string(pick(rng)));
  return out;
}

LabeledTimeline Timeline(std::initializer_list<TimelineEntry> entries) { return LabeledTimeline{entries}; }

}  // namespace

TEST_CASE("word sequence tokenization") {
  const WordSequence w = Words("  Hello\tWORLD \n again ");
  CHECK(w.tokens == std::vector<std::string>{"hello", "world", "again"});
  CHECK(Words("").size() == 0);
}

TEST_CASE("wer examples") {
  const WerResult same = wer(Words("a b c"), Words("a b c"));
  CHECK(same.rate == 0.0);
  CHECK(same.errors() == 0);

  const WerResult empty = wer(Words("a b c"), Words(""));
  CHECK(empty.rate == 1.0);
  CHECK(empty.deletions == 3);
  CHECK(empty.substitutions + empty.insertions == 0);

  const WerResult mixed = wer(Words("a b c"), Words("a x c d"));
  CHECK(mixed.rate == doctest::Approx(2.0 / 3.0));
  CHECK(mixed.substitutions == 1);
  CHECK(mixed.insertions == 1);
  CHECK(mixed.deletions == 0);

  const WerResult over = wer(Words("a"), Words("b c d"));
  CHECK(over.rate == 3.0);
  CHECK(over.substitutions == 1);
  CHECK(over.insertions == 2);

  CHECK_THROWS_AS(wer(Words(""), Words("a")), Error);
}

TEST_CASE("wer matches the edit distance oracle") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    WordSequence ref{RandomTokens(rng, 12, 5)};
    if (ref.tokens.empty()) ref.tokens.push_back("w0");
    const WordSequence hyp{RandomTokens(rng, 12, 5)};
    const WerResult r = wer(ref, hyp);
    const int distance = oracle::edit_distance(ref.tokens, hyp.tokens);
    CHECK(r.errors() == distance);
    CHECK(r.rate == static_cast<double>(distance) / static_cast<double>(ref.size()));
    // Counts describe a real alignment.
    CHECK(static_cast<int>(ref.size()) - r.deletions + r.insertions == static_cast<int>(hyp.size()));

    WordSequence renamed_ref = ref;
    WordSequence renamed_hyp = hyp;
    for (auto* seq : {&renamed_ref, &renamed_hyp})
      for (auto& t : seq->tokens) t = "x_" + t + "_y";
    const WerResult renamed = wer(renamed_ref, renamed_hyp);
    CHECK(renamed.errors() == r.errors());
    CHECK(wer(ref, ref).rate == 0.0);
  }
}

TEST_CASE("der examples") {
  const LabeledTimeline ref = Timeline({{0.0, 10.0, "S0"}, {10.0, 20.0, "S1"}});
  CHECK(der(ref, ref, 0.0).rate == 0.0);
  CHECK(der(ref, Timeline({{0.0, 10.0, "B"}, {10.0, 20.0, "A"}}), 0.0).rate == 0.0);

  const DerResult half = der(ref, Timeline({{0.0, 20.0, "X"}}), 0.0);
  CHECK(half.rate == 0.5);
  CHECK(half.confusion_s == doctest::Approx(10.0));
  CHECK(half.missed_s == 0.0);
  CHECK(half.false_alarm_s == 0.0);

  const DerResult empty_hyp = der(ref, LabeledTimeline{}, 0.0);
  CHECK(empty_hyp.rate == 1.0);
  CHECK(empty_hyp.missed_s == doctest::Approx(20.0));

  const DerResult extra = der(ref, Timeline({{0.0, 10.0, "A"}, {10.0, 20.0, "B"}, {20.0, 25.0, "C"}}), 0.0);
  CHECK(extra.false_alarm_s == doctest::Approx(5.0));
  CHECK(extra.rate == doctest::Approx(0.25));
}

TEST_CASE("der collar") {
  const LabeledTimeline ref = Timeline({{0.0, 10.0, "S0"}, {10.0, 20.0, "S1"}});
  // Boundary off by 0.2 s is forgiven by a 0.25 s collar.
  const LabeledTimeline hyp = Timeline({{0.0, 10.2, "A"}, {10.2, 20.0, "B"}});
  CHECK(der(ref, hyp, 0.0).rate > 0.0);
  CHECK(der(ref, hyp, 0.25).rate == 0.0);
  // Scored reference time shrinks by the collar around 0, 10, 20.
  CHECK(der(ref, hyp, 0.25).reference_s == doctest::Approx(20.0 - 0.25 - 0.5 - 0.25));
}

TEST_CASE("der properties") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    LabeledTimeline ref, hyp;
    double t = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double len = u(rng);
      ref.entries.push_back({t, t + len, "r" + std::to_string(std::uniform_int_distribution<int>(0, 3)(rng))});
      t += len + (i % 3 == 0 ? 0.3 : 0.0);
    }
    t = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double len = u(rng);
      hyp.entries.push_back({t, t + len, "h" + std::to_string(std::uniform_int_distribution<int>(0, 4)(rng))});
      t += len;
    }
    const DerResult base = der(ref, hyp, 0.1);
    CHECK(base.rate == (base.missed_s + base.false_alarm_s + base.confusion_s) / base.reference_s);
    CHECK(base.missed_s >= 0.0);
    CHECK(base.confusion_s >= 0.0);

    std::vector<std::string> names{"h0", "h1", "h2", "h3", "h4"};
    std::shuffle(names.begin(), names.end(), rng);
    LabeledTimeline renamed = hyp;
    for (auto& e : renamed.entries) e.speaker = "z" + names[static_cast<std::size_t>(e.speaker[1] - '0')];
    CHECK(der(ref, renamed, 0.1).rate == base.rate);
  }
}

TEST_CASE("der errors") {
  LabeledTimeline many;
  for (int i = 0; i < 9; ++i) many.entries.push_back({i * 1.0, i + 1.0, "s" + std::to_string(i)});
  CHECK_THROWS_AS(der(many, many, 0.0), Error);
  CHECK_THROWS_AS(der(LabeledTimeline{}, many, 0.0), Error);
  CHECK_THROWS_AS(Timeline({{1.0, 1.0, "a"}}).validate(), Error);
}
