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

#ifndef GMMDIAR_SYNTH_H_
#define GMMDIAR_SYNTH_H_

#include <array>
#include <cstdint>
#include <vector>

#include "gmmdiar/audio_io.h"
#include "gmmdiar/metrics.h"

namespace gmmdiar {

// A synthetic talker: fundamental plus two harmonics with fixed relative
// amplitudes. The fundamental is the strongest partial.
struct SynthSpeaker {
  double f0_hz = 120.0;
  std::array<double, 3> harmonic_gains{1.0, 0.5, 0.25};
};

struct SynthTurn {
  int speaker = 0;
  double duration_s = 0.0;
};

struct SynthConfig {
  int sample_rate_hz = 16000;
  double gap_s = 0.3;           // silence after every turn
  double ramp_s = 0.2;          // onset and offset fade inside each turn
  double vibrato_depth = 0.02;  // relative f0 excursion
  double noise_level = 1e-3;    // background noise std, present everywhere
  double peak = 0.9;
  std::uint64_t seed = 1;
};

struct SynthFixture {
  AudioBuffer audio;
  LabeledTimeline reference;  // speakers labelled "spk<k>"
};

// Turns are laid end to end, each followed by gap_s of background noise.
// Each turn is amplitude-modulated by a seeded random envelope.
SynthFixture synth_fixture(const std::vector<SynthSpeaker>& speakers, const std::vector<SynthTurn>& plan,
                           const SynthConfig& cfg);

// Default talkers: 120 Hz, 280 Hz, then further distinct fundamentals.
std::vector<SynthSpeaker> default_speakers(int count);

// `n_turns` turns of `turn_s` seconds, cycling through `n_speakers`.
std::vector<SynthTurn> alternating_plan(int n_speakers, int n_turns, double turn_s);

}  // namespace gmmdiar

#endif  // GMMDIAR_SYNTH_H_
