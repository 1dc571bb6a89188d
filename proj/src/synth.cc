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

#include "gmmdiar/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace gmmdiar {

namespace {

// Piecewise-linear random walk between control points every `step`
// samples, drawn uniformly from [lo, hi].
VectorXd RandomEnvelope(Eigen::Index n, Eigen::Index step, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  const Eigen::Index knots = n / step + 2;
  VectorXd ctrl(knots);
  for (Eigen::Index k = 0; k < knots; ++k) ctrl[k] = u(rng);
  VectorXd env(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index k = i / step;
    const double frac = static_cast<double>(i % step) / static_cast<double>(step);
    env[i] = (1.0 - frac) * ctrl[k] + frac * ctrl[k + 1];
  }
  return env;
}

// Raised-cosine fade in and out over `ramp` samples at each end of a turn.
double Ramp(Eigen::Index k, Eigen::Index n, Eigen::Index ramp) {
  const Eigen::Index edge = std::min(k, n - 1 - k);
  if (ramp <= 0 || edge >= ramp) return 1.0;
  return 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(edge) / static_cast<double>(ramp));
}

}  // namespace

std::vector<SynthSpeaker> default_speakers(int count) {
  static const std::vector<SynthSpeaker> table = {
      {120.0, {1.0, 0.6, 0.3}},  {280.0, {1.0, 0.3, 0.5}},  {190.0, {1.0, 0.7, 0.15}},
      {380.0, {1.0, 0.2, 0.2}},  {150.0, {1.0, 0.4, 0.6}},  {230.0, {1.0, 0.8, 0.4}},
      {330.0, {1.0, 0.5, 0.1}},  {100.0, {1.0, 0.3, 0.3}},
  };
  if (count < 1 || count > static_cast<int>(table.size())) {
    throw Error(ErrorCode::kInvalidArgument, "default_speakers supports 1..8 speakers");
  }
  return {table.begin(), table.begin() + count};
}

std::vector<SynthTurn> alternating_plan(int n_speakers, int n_turns, double turn_s) {
  std::vector<SynthTurn> plan;
  for (int i = 0; i < n_turns; ++i) plan.push_back({i % n_speakers, turn_s});
  return plan;
}

SynthFixture synth_fixture(const std::vector<SynthSpeaker>& speakers, const std::vector<SynthTurn>& plan,
                           const SynthConfig& cfg) {
  if (speakers.empty()) throw Error(ErrorCode::kInvalidArgument, "need at least one speaker");
  if (cfg.sample_rate_hz <= 0 || cfg.gap_s < 0.0 || cfg.ramp_s < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "bad synth config");
  }
  for (const SynthTurn& t : plan) {
    if (t.speaker < 0 || t.speaker >= static_cast<int>(speakers.size())) {
      throw Error(ErrorCode::kInvalidArgument, "turn refers to an unknown speaker");
    }
    if (!(t.duration_s > 0.0)) throw Error(ErrorCode::kInvalidArgument, "turn durations must be positive");
  }
  for (const SynthSpeaker& s : speakers) {
    if (3.0 * s.f0_hz >= cfg.sample_rate_hz / 2.0) {
      throw Error(ErrorCode::kInvalidArgument, "third harmonic above Nyquist");
    }
  }

  const double rate = cfg.sample_rate_hz;
  const auto gap = static_cast<Eigen::Index>(std::llround(cfg.gap_s * rate));
  std::vector<Eigen::Index> lengths;
  Eigen::Index total = 0;
  for (const SynthTurn& t : plan) {
    lengths.push_back(static_cast<Eigen::Index>(std::llround(t.duration_s * rate)));
    total += lengths.back() + gap;
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd signal = VectorXd::Zero(total);
  SynthFixture out{AudioBuffer(VectorXd::Zero(1), cfg.sample_rate_hz), {}};

  const Eigen::Index envelope_step = static_cast<Eigen::Index>(0.1 * rate);
  const Eigen::Index vibrato_step = static_cast<Eigen::Index>(0.2 * rate);
  const auto ramp = static_cast<Eigen::Index>(std::llround(cfg.ramp_s * rate));
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const SynthSpeaker& spk = speakers[static_cast<std::size_t>(plan[i].speaker)];
    const Eigen::Index n = lengths[i];
    const VectorXd envelope = RandomEnvelope(n, envelope_step, 0.6, 1.0, rng);
    const VectorXd vibrato = RandomEnvelope(n, vibrato_step, 1.0 - cfg.vibrato_depth, 1.0 + cfg.vibrato_depth, rng);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
    double phase = phase_dist(rng);
    const double gain_sum = spk.harmonic_gains[0] + spk.harmonic_gains[1] + spk.harmonic_gains[2];
    for (Eigen::Index k = 0; k < n; ++k) {
      phase += 2.0 * std::numbers::pi * spk.f0_hz * vibrato[k] / rate;
      double v = 0.0;
      for (int h = 0; h < 3; ++h) v += spk.harmonic_gains[static_cast<std::size_t>(h)] * std::sin((h + 1) * phase);
      signal[at + k] = envelope[k] * Ramp(k, n, ramp) * v / gain_sum;
    }
    const double start_s = static_cast<double>(at) / rate;
    out.reference.entries.push_back(
        {start_s, start_s + static_cast<double>(n) / rate, "spk" + std::to_string(plan[i].speaker)});
    at += n + gap;
  }
  for (Eigen::Index k = 0; k < total; ++k) signal[k] += cfg.noise_level * gauss(rng);

  const double peak = total > 0 ? signal.cwiseAbs().maxCoeff() : 0.0;
  if (peak > 0.0) signal *= cfg.peak / peak;
  // Quantise to the 16-bit grid so the fixture survives a WAV round trip.
  signal = (signal.array() * 32768.0).round() / 32768.0;
  out.audio = AudioBuffer(std::move(signal), cfg.sample_rate_hz);
  return out;
}

}  // namespace gmmdiar
