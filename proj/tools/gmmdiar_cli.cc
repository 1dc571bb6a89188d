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

// gmmdiar: GMM-based speaker diarization and evaluation.
//
//   gmmdiar diarize talk.wav --output talk.rttm --dump-dir dumps/
//   gmmdiar eval-der --ref ref.rttm --hyp talk.rttm

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gmmdiar/audio_io.h"
#include "gmmdiar/clustering.h"
#include "gmmdiar/config.h"
#include "gmmdiar/features.h"
#include "gmmdiar/gmm.h"
#include "gmmdiar/metrics.h"
#include "gmmdiar/pipeline.h"
#include "gmmdiar/rttm.h"
#include "gmmdiar/segmentation.h"
#include "gmmdiar/spectral.h"
#include "gmmdiar/synth.h"
#include "gmmdiar/vad.h"

namespace {

using namespace gmmdiar;

constexpr int kExitConfig = 2;
constexpr int kExitAudio = 3;
constexpr int kExitPipeline = 4;

struct CommonOptions {
  std::string config_path;
  std::string output;
  std::string dump_dir;
  bool auto_threshold = false;
  double threshold = -1.0;
  long long seed = -1;
  int jobs = 0;
};

void AddCommon(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "key = value config file");
  cmd->add_option("--output", o.output, "output path (default: stdout)");
  cmd->add_option("--seed", o.seed, "root RNG seed");
  cmd->add_option("--jobs", o.jobs, "worker threads");
}

PipelineConfig ResolveConfig(const CommonOptions& o) {
  PipelineConfig cfg = o.config_path.empty() ? PipelineConfig{} : load_config(o.config_path);
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  if (o.jobs > 0) cfg.jobs = o.jobs;
  if (o.auto_threshold) cfg.threshold.reset();
  if (o.threshold >= 0.0) cfg.threshold = o.threshold;
  cfg.validate();
  return cfg;
}

// Writes to `path`, or stdout when empty.
template <typename Fn>
void Emit(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  fn(out);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

std::string DumpPath(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

int ExitCodeFor(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kConfig: return kExitConfig;
    case ErrorCode::kFileNotFound:
    case ErrorCode::kUnsupportedFormat:
    case ErrorCode::kMalformedHeader: return kExitAudio;
    default: return kExitPipeline;
  }
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileNotFound, path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GMM-based speaker diarization"};
  app.require_subcommand(1);

  CommonOptions diar_opts;
  std::string diar_wav;
  bool dump_spectrogram = false;
  std::string vad_dump;
  auto* diarize = app.add_subcommand("diarize", "audio -> RTTM speaker turns");
  diarize->add_option("wav", diar_wav, "input WAV")->required();
  AddCommon(diarize, diar_opts);
  diarize->add_option("--dump-dir", diar_opts.dump_dir, "write per-stage CSVs here");
  diarize->add_option("--vad-dump", vad_dump, "write frame_index,energy,is_speech CSV here");
  diarize->add_flag("--dump-spectrogram", dump_spectrogram, "also dump the spectrogram CSV");
  auto* auto_flag = diarize->add_flag("--auto-threshold", diar_opts.auto_threshold,
                                      "stop at the widest gap in merge distances");
  diarize->add_option("--threshold", diar_opts.threshold, "merge-distance stopping threshold")->excludes(auto_flag);

  CommonOptions feat_opts;
  std::string feat_wav, blocks = "all";
  auto* features = app.add_subcommand("features", "MFCC (+deltas) CSV");
  features->add_option("wav", feat_wav)->required();
  AddCommon(features, feat_opts);
  features->add_option("--blocks", blocks, "base | delta | delta2 | all")
      ->check(CLI::IsMember({"base", "delta", "delta2", "all"}));

  CommonOptions vad_opts;
  std::string vad_wav;
  auto* vad = app.add_subcommand("vad", "frame energies and speech decisions CSV");
  vad->add_option("wav", vad_wav)->required();
  AddCommon(vad, vad_opts);

  CommonOptions seg_opts;
  std::string seg_wav;
  auto* segment = app.add_subcommand("segment", "BIC change points CSV");
  segment->add_option("wav", seg_wav)->required();
  AddCommon(segment, seg_opts);

  CommonOptions sel_opts;
  std::string sel_wav, criterion = "bic";
  int m_lo = 1, m_hi = 8, sel_dims = 13;
  auto* select = app.add_subcommand("select-gmm", "AIC/BIC against n_components CSV");
  select->add_option("wav", sel_wav)->required();
  AddCommon(select, sel_opts);
  select->add_option("--min", m_lo, "smallest component count");
  select->add_option("--max", m_hi, "largest component count");
  select->add_option("--dims", sel_dims, "leading feature dims to model (13, 26, 39)");
  select->add_option("--criterion", criterion)->check(CLI::IsMember({"aic", "bic"}));

  std::string der_ref, der_hyp;
  double collar = 0.25;
  auto* eval_der = app.add_subcommand("eval-der", "diarization error rate of two RTTMs");
  eval_der->add_option("--ref", der_ref)->required();
  eval_der->add_option("--hyp", der_hyp)->required();
  eval_der->add_option("--collar", collar, "seconds excluded around reference boundaries");

  std::string wer_ref, wer_hyp;
  auto* eval_wer = app.add_subcommand("eval-wer", "word error rate of two transcripts");
  eval_wer->add_option("--ref", wer_ref)->required();
  eval_wer->add_option("--hyp", wer_hyp)->required();

  std::string synth_out, synth_rttm;
  long long synth_seed = 1;
  int synth_speakers = 2, synth_turns = 4;
  double synth_turn_s = 5.0;
  auto* synth = app.add_subcommand("synth", "synthetic multi-talker WAV with reference RTTM");
  synth->add_option("--output", synth_out, "output WAV")->required();
  synth->add_option("--rttm", synth_rttm, "reference RTTM output");
  synth->add_option("--seed", synth_seed);
  synth->add_option("--speakers", synth_speakers);
  synth->add_option("--turns", synth_turns);
  synth->add_option("--turn-seconds", synth_turn_s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (diarize->parsed()) {
      const PipelineConfig cfg = ResolveConfig(diar_opts);
      const PipelineResult r = run_pipeline(diar_wav, cfg);
      Emit(diar_opts.output, [&](std::ostream& os) { write_rttm(os, r.diarization); });
      if (!vad_dump.empty()) {
        Emit(vad_dump, [&](std::ostream& os) { write_vad_csv(os, r.frame_energies, r.vad); });
      }
      if (!diar_opts.dump_dir.empty()) {
        const auto& dir = diar_opts.dump_dir;
        Emit(DumpPath(dir, "vad.csv"), [&](std::ostream& os) { write_vad_csv(os, r.frame_energies, r.vad); });
        Emit(DumpPath(dir, "features.csv"),
             [&](std::ostream& os) { write_features_csv(os, r.features, cfg.n_coeffs, FeatureBlocks::kAll); });
        Emit(DumpPath(dir, "boundaries.csv"), [&](std::ostream& os) { write_boundaries_csv(os, r.segments); });
        Emit(DumpPath(dir, "dendrogram.csv"),
             [&](std::ostream& os) { write_dendrogram_csv(os, r.clustering.dendrogram); });
        if (dump_spectrogram) {
          const Spectrogram spec = stft(load_wav(diar_wav), StftConfig{cfg.frame_ms, cfg.hop_ms, cfg.n_fft, cfg.jobs});
          Emit(DumpPath(dir, "spectrogram.csv"), [&](std::ostream& os) { write_spectrogram_csv(os, spec); });
        }
      }
    } else if (features->parsed()) {
      const PipelineConfig cfg = ResolveConfig(feat_opts);
      const FeatureMatrix f = stack_deltas(mfcc(load_wav(feat_wav), cfg.mfcc(), feat_wav), cfg.delta_width);
      const FeatureBlocks which = blocks == "base"    ? FeatureBlocks::kBase
                                  : blocks == "delta" ? FeatureBlocks::kDelta
                                  : blocks == "delta2" ? FeatureBlocks::kDeltaDelta
                                                       : FeatureBlocks::kAll;
      Emit(feat_opts.output, [&](std::ostream& os) { write_features_csv(os, f, cfg.n_coeffs, which); });
    } else if (vad->parsed()) {
      const PipelineConfig cfg = ResolveConfig(vad_opts);
      const AudioBuffer audio = load_wav(vad_wav);
      const VectorXd energies = frame_rms(audio, ms_to_samples(cfg.frame_ms, audio.sample_rate_hz()),
                                          ms_to_samples(cfg.hop_ms, audio.sample_rate_hz()));
      const VadDecision d = detect_speech(energies, cfg.vad);
      Emit(vad_opts.output, [&](std::ostream& os) { write_vad_csv(os, energies, d); });
    } else if (segment->parsed()) {
      const PipelineConfig cfg = ResolveConfig(seg_opts);
      const AudioBuffer audio = load_wav(seg_wav);
      const VectorXd energies = frame_rms(audio, ms_to_samples(cfg.frame_ms, audio.sample_rate_hz()),
                                          ms_to_samples(cfg.hop_ms, audio.sample_rate_hz()));
      const VadDecision d = detect_speech(energies, cfg.vad);
      const FeatureMatrix f = stack_deltas(mfcc(audio, cfg.mfcc(), seg_wav), cfg.delta_width);
      const SegmentationConfig sc = cfg.segmentation();
      const auto segs = refine_boundaries(detect_change_points(f, d.speech_regions, sc), f, sc);
      Emit(seg_opts.output, [&](std::ostream& os) { write_boundaries_csv(os, segs); });
    } else if (select->parsed()) {
      const PipelineConfig cfg = ResolveConfig(sel_opts);
      const AudioBuffer audio = load_wav(sel_wav);
      const VectorXd energies = frame_rms(audio, ms_to_samples(cfg.frame_ms, audio.sample_rate_hz()),
                                          ms_to_samples(cfg.hop_ms, audio.sample_rate_hz()));
      const VadDecision d = detect_speech(energies, cfg.vad);
      const FeatureMatrix f = stack_deltas(mfcc(audio, cfg.mfcc(), sel_wav), cfg.delta_width);
      if (sel_dims < 1 || sel_dims > f.dim()) throw Error(ErrorCode::kConfig, "--dims out of range");
      Eigen::Index n_speech = 0;
      for (const FrameRange& r : d.speech_regions) n_speech += r.length();
      MatrixXd x(n_speech, sel_dims);
      Eigen::Index at = 0;
      for (const FrameRange& r : d.speech_regions) {
        x.middleRows(at, r.length()) = f.vectors.block(r.begin, 0, r.length(), sel_dims);
        at += r.length();
      }
      if (n_speech == 0) throw Error(ErrorCode::kEmptyInput, "no speech frames to model");
      const ClusteringConfig cc = cfg.clustering();
      const Criterion which = criterion == "aic" ? Criterion::kAic : Criterion::kBic;
      const SelectionResult sel = select_n_components(x, m_lo, m_hi, which, cc.em, cfg.jobs);
      Emit(sel_opts.output, [&](std::ostream& os) { write_curve_csv(os, sel.curve); });
      std::cerr << "best n_components (" << criterion << "): " << sel.best_n_components << "\n";
    } else if (eval_der->parsed()) {
      const DerResult r = der(to_timeline(read_rttm_file(der_ref)), to_timeline(read_rttm_file(der_hyp)), collar);
      std::cout << std::fixed << std::setprecision(4) << "DER " << r.rate << "\n"
                << "missed_s " << r.missed_s << "\nfalse_alarm_s " << r.false_alarm_s << "\nconfusion_s "
                << r.confusion_s << "\nreference_s " << r.reference_s << "\n";
    } else if (eval_wer->parsed()) {
      const WerResult r = wer(WordSequence::from_text(ReadText(wer_ref)), WordSequence::from_text(ReadText(wer_hyp)));
      std::cout << std::fixed << std::setprecision(4) << "WER " << r.rate << "\n"
                << "substitutions " << r.substitutions << "\ninsertions " << r.insertions << "\ndeletions "
                << r.deletions << "\n";
    } else if (synth->parsed()) {
      SynthConfig sc;
      sc.seed = static_cast<std::uint64_t>(synth_seed);
      const SynthFixture fx = synth_fixture(default_speakers(synth_speakers),
                                            alternating_plan(synth_speakers, synth_turns, synth_turn_s), sc);
      write_wav16(synth_out, fx.audio);
      if (!synth_rttm.empty()) {
        Diarization ref;
        ref.file_id = file_id_from_path(synth_out);
        for (const TimelineEntry& e : fx.reference.entries) {
          ref.turns.push_back({e.start_s, e.end_s - e.start_s, e.speaker});
        }
        Emit(synth_rttm, [&](std::ostream& os) { write_rttm(os, ref); });
      }
    }
  } catch (const StageError& e) {
    std::cerr << "error in stage " << e.stage() << ": " << e.what() << "\n";
    return e.stage() == "load_wav" ? kExitAudio : (e.code() == ErrorCode::kConfig ? kExitConfig : kExitPipeline);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
  return 0;
}
