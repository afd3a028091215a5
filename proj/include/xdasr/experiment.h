// include/xdasr/experiment.h
//
// Copyright 2026  The xdasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Train x test orchestration: corpora, feature kinds, CTC models, PER
// matrices, diagnostics and the full reproduction pipeline.

#ifndef XDASR_EXPERIMENT_H_
#define XDASR_EXPERIMENT_H_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xdasr/augment.h"
#include "xdasr/bottleneck.h"
#include "xdasr/corpus.h"
#include "xdasr/scoring.h"
#include "xdasr/speaker-embed.h"
#include "xdasr/train.h"

namespace xdasr {

enum class FeatureKind { kBaselineW3, kBaselineW1, kBaselineAugW3, kBaselineSpkW3, kBottleneckW1 };

std::string ToString(FeatureKind kind);
FeatureKind FeatureKindFromString(const std::string& s);
/// Stacking window paired with the kind: 3 for baseline kinds except
/// baseline_w1, 1 for bottleneck.
int WindowOf(FeatureKind kind);

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int sample_rate_hz = 8000;
  std::vector<std::string> train_domains = {"conversational", "broadcast"};
  std::vector<std::string> test_domains = {"conversational", "broadcast", "scripted"};

  // Target-language corpora, per domain.
  int train_speakers = 12;
  int train_utts = 30;
  int test_speakers = 4;
  int test_utts = 15;
  int min_phones = 8;
  int max_phones = 30;

  // Source-language corpus for the extractor, augmented per augment_copies.
  int source_speakers = 12;
  int source_utts = 30;
  int augment_copies = 3;
  int rir_pool = 8;
  Range rir_t60{0.2, 0.8};
  int noise_per_kind = 2;

  // Target CTC model.
  int lstm_layers = 3;
  int lstm_cells = 64;
  TrainConfig train;
  int stride = 2;
  bool include_full_rate_view = true;  // stacked original counts as a view
  bool cmvn_bottleneck = false;
  int embed_dim = 16;
  int beam = 1;

  ExtractorConfig extractor;
  FrontendConfig frontend;
  Eigen::Index viz_frames = 10000;

  std::vector<FeatureKind> kinds = {FeatureKind::kBaselineW3, FeatureKind::kBottleneckW1,
                                    FeatureKind::kBaselineAugW3, FeatureKind::kBaselineSpkW3};

  void Validate() const;
  std::string ToJson() const;
  static ExperimentConfig FromJson(const std::string& text);
  std::string Digest() const;
};

/// Synthetic corpora and augmentation pools derived from one config + seed.
struct ExperimentData {
  std::map<std::string, Corpus> train;  // by domain
  std::map<std::string, Corpus> test;
  Corpus source;
  std::vector<RoomImpulseResponse> rirs;
  std::vector<NoiseSource> noises;
};

using LogFn = std::function<void(const std::string&)>;

/// Corpus settings for a domain and split ("train" or "test"). The "source"
/// domain uses the source inventory and the source corpus sizes.
CorpusConfig CorpusConfigFor(const ExperimentConfig& cfg, const std::string& domain,
                             const std::string& split);
std::vector<RoomImpulseResponse> RirPoolFor(const ExperimentConfig& cfg);
std::vector<NoiseSource> NoisePoolFor(const ExperimentConfig& cfg);
/// label is "source" for the extractor corpus or "target:<domain>".
AugmentPlan AugmentPlanFor(const ExperimentConfig& cfg, const std::vector<RoomImpulseResponse>& rirs,
                           const std::vector<NoiseSource>& noises, const std::string& label);

ExperimentData PrepareData(const ExperimentConfig& cfg, const LogFn& log = {});

/// Source corpus expanded by the augmentation plan, as used for the extractor.
AugmentedCorpus AugmentedSource(const ExperimentConfig& cfg, const ExperimentData& data);
FeatureExtractor BuildExtractor(const ExperimentConfig& cfg, const ExperimentData& data,
                                const LogFn& log = {});
/// Trains the extractor on an already augmented source corpus.
FeatureExtractor BuildExtractor(const ExperimentConfig& cfg, const Manifest& manifest,
                                const std::vector<Waveform>& audio, const LogFn& log = {});

/// Baseline features of a corpus, per-speaker CMVN applied.
std::vector<FeatureMatrix> BaselineFeatures(const Corpus& c, const FrontendConfig& fe,
                                            bool cmvn = true);

/// Model-ready (stacked) features for one corpus under a feature kind.
struct FeatureContext {
  const ExperimentConfig* cfg = nullptr;
  const FeatureExtractor* extractor = nullptr;  // bottleneck kinds
  const SpeakerEmbedder* embedder = nullptr;    // speaker kinds
};
std::vector<FeatureMatrix> ModelFeatures(FeatureKind kind, const Corpus& c,
                                         const FeatureContext& ctx);

/// Training views of one utterance: optionally the stacked original, then
/// the stride copies.
std::vector<TrainExample> TrainingViews(const std::vector<FeatureMatrix>& features,
                                        const Manifest& manifest, const PhoneInventory& inv,
                                        int stride, bool include_full_rate);

/// Decoding input: stride copy 0.
SeqMatrixf DecodeView(const FeatureMatrix& f, int stride);

/// Embedder for the speaker kind, fitted on pre-CMVN training features.
SpeakerEmbedder FitEmbedder(const ExperimentConfig& cfg, const Corpus& train_corpus);

/// Training examples for a kind from its model features.
std::vector<TrainExample> KindTrainingViews(const ExperimentConfig& cfg,
                                            const std::vector<FeatureMatrix>& features,
                                            const Manifest& manifest);

/// BiLSTM-CTC model for (kind, training domain), seeded from the config.
Checkpoint TrainModel(const ExperimentConfig& cfg, FeatureKind kind, const std::string& domain,
                      const std::vector<TrainExample>& examples, const LogFn& log = {});

/// Decodes every utterance; the returned manifest carries the hypotheses.
Manifest DecodeCorpus(const ExperimentConfig& cfg, const Network<float>& net,
                      const std::vector<FeatureMatrix>& features, const Manifest& manifest);

struct RunRecord {
  FeatureKind kind = FeatureKind::kBaselineW3;
  std::uint64_t seed = 0;
  std::string config_digest;
  PerMatrix matrix;
  std::map<std::string, Checkpoint> checkpoints;  // by training domain
  double wall_seconds = 0;
};

/// Trains one model per training domain and scores it on every test domain.
RunRecord RunMatrix(const ExperimentConfig& cfg, FeatureKind kind, const ExperimentData& data,
                    const FeatureExtractor* extractor, const LogFn& log = {});

struct SeparationReport {
  std::string view;
  double separation = 0;     // full dimension, globally standardized
  double separation_2d = 0;  // on the PCA plane
  Eigen::MatrixXd points;    // PCA plane
  std::vector<std::string> domain;
  std::vector<std::string> warnings;
};

/// Figure-1 style views over all corpora of each domain: raw baseline
/// (no CMVN), extractor input, and bottleneck output.
std::vector<SeparationReport> FeatureViews(const ExperimentConfig& cfg, const ExperimentData& data,
                                           const FeatureExtractor& extractor);

struct ReproResult {
  std::map<FeatureKind, RunRecord> runs;
  std::vector<SeparationReport> views;
  std::string summary;
};

/// corpus -> extractor -> matrices -> diagnostics -> plots -> summary. Writes
/// out_dir/{tables/*.csv, plots/*.svg, plots/*.csv, summary.txt} when out_dir
/// is non-empty.
ReproResult FullRepro(const ExperimentConfig& cfg, const std::string& out_dir,
                      const LogFn& log = {});

/// Table 1 numbers as published, for the juxtaposition in summary.txt.
PerMatrix PublishedBaselineMatrix();
PerMatrix PublishedBottleneckMatrix();

}  // namespace xdasr

#endif  // XDASR_EXPERIMENT_H_
