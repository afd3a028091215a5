// tools/xdasr-cli.cc
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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "xdasr/archive.h"
#include "xdasr/experiment.h"

using namespace xdasr;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;

  ExperimentConfig Load() const {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = ExperimentConfig::FromJson(ReadFileBytes(config_path));
    if (seed) cfg.seed = *seed;
    cfg.Validate();
    return cfg;
  }
};

void AddCommon(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "JSON experiment config");
  app->add_option("--seed", c.seed, "Master seed (overrides the config)");
}

void Log(const std::string& msg) { std::cerr << msg << std::endl; }

Corpus LoadCorpusChecked(const std::string& dir) {
  if (!std::filesystem::exists(std::filesystem::path(dir) / "manifest.tsv"))
    throw Error("no manifest.tsv in " + dir);
  return LoadCorpus(dir);
}

// Archive records must follow manifest order.
std::vector<FeatureMatrix> ReadFeaturesFor(const std::string& path, const Manifest& manifest) {
  std::vector<FeatureMatrix> feats = ReadArchive(path);
  if (feats.size() != manifest.size())
    throw Error(path + ": " + std::to_string(feats.size()) + " records for " +
                std::to_string(manifest.size()) + " utterances");
  for (std::size_t i = 0; i < feats.size(); ++i)
    if (feats[i].meta.utterance != manifest[i].utterance)
      throw Error(path + ": record " + std::to_string(i) + " is '" + feats[i].meta.utterance +
                  "', expected '" + manifest[i].utterance + "'");
  return feats;
}

FeatureExtractor ExtractorFor(const ExperimentConfig& cfg, const std::string& path,
                              const ExperimentData& data) {
  if (!path.empty()) return FeatureExtractor::Load(path);
  return BuildExtractor(cfg, data, Log);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-domain phone recognition experiments on synthetic corpora"};
  app.require_subcommand(1);
  Common common;

  // gen-corpus
  std::string domain, split = "train", out;
  auto* gen = app.add_subcommand("gen-corpus", "Synthesize one corpus (WAV files + manifest.tsv)");
  AddCommon(gen, common);
  gen->add_option("--domain", domain, "conversational, broadcast, scripted or source")->required();
  gen->add_option("--split", split, "train or test");
  gen->add_option("--out", out, "Output directory")->required();

  // augment
  std::string corpus_dir, label;
  auto* aug = app.add_subcommand("augment", "Multi-condition copy of a corpus (reverb + noise)");
  AddCommon(aug, common);
  aug->add_option("--corpus", corpus_dir, "Input corpus directory")->required();
  aug->add_option("--label", label, "Plan label: source or target:<domain>")->required();
  aug->add_option("--out", out, "Output directory")->required();

  // make-features
  std::string kind_name, extractor_path, embed_from;
  auto* feat = app.add_subcommand("make-features", "Model input features for one corpus");
  AddCommon(feat, common);
  feat->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  feat->add_option("--kind", kind_name, "Feature kind")->required();
  feat->add_option("--extractor", extractor_path, "Extractor checkpoint (bottleneck kinds)");
  feat->add_option("--embed-from", embed_from, "Training corpus for the speaker embedder");
  feat->add_option("--out", out, "Output archive")->required();

  // train
  std::string features_path, train_domain;
  bool train_extractor = false;
  auto* train = app.add_subcommand("train", "Train a CTC model, or the bottleneck extractor");
  AddCommon(train, common);
  train->add_option("--corpus", corpus_dir, "Corpus directory (labels; audio for --extractor)")
      ->required();
  train->add_option("--features", features_path, "Feature archive from make-features");
  train->add_option("--kind", kind_name, "Feature kind of the archive");
  train->add_option("--domain", train_domain, "Training domain name");
  train->add_flag("--extractor", train_extractor, "Train the extractor on an augmented source corpus");
  train->add_option("--out", out, "Output checkpoint")->required();

  // decode
  std::string model_path;
  auto* decode = app.add_subcommand("decode", "Decode a corpus into a hypothesis manifest");
  AddCommon(decode, common);
  decode->add_option("--model", model_path, "CTC checkpoint")->required();
  decode->add_option("--features", features_path, "Feature archive")->required();
  decode->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  decode->add_option("--out", out, "Hypothesis manifest")->required();

  // score
  std::string ref_path, hyp_path;
  auto* score = app.add_subcommand("score", "Phone error rate of hypotheses against references");
  score->add_option("--ref", ref_path, "Reference manifest")->required();
  score->add_option("--hyp", hyp_path, "Hypothesis manifest")->required();
  std::string row_train, row_test;
  score->add_option("--csv-row", row_train,
                    "Print a matrix CSV row for this training corpus instead")
      ->needs(score->add_option("--test-corpus", row_test, "Test corpus name of the row"));

  // matrix
  auto* matrix = app.add_subcommand("matrix", "Train x test PER matrix for one feature kind");
  AddCommon(matrix, common);
  matrix->add_option("--kind", kind_name, "Feature kind")->required();
  matrix->add_option("--extractor", extractor_path, "Extractor checkpoint (else trained)");
  matrix->add_option("--out", out, "Output directory (writes tables/<kind>.csv)")->required();

  // viz
  auto* viz = app.add_subcommand("viz", "Domain scatter plots and separation per feature view");
  AddCommon(viz, common);
  viz->add_option("--extractor", extractor_path, "Extractor checkpoint (else trained)");
  viz->add_option("--out", out, "Output directory (plots/, tables/separation.csv)")->required();

  // full-repro
  auto* repro = app.add_subcommand("full-repro", "Corpora, matrices, diagnostics, plots, summary");
  AddCommon(repro, common);
  repro->add_option("--out", out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const ExperimentConfig cfg = common.Load();
      const Corpus c = GenerateCorpus(CorpusConfigFor(cfg, domain, split));
      WriteCorpus(c, out);
      Log("wrote " + std::to_string(c.manifest.size()) + " utterances to " + out);
    } else if (aug->parsed()) {
      const ExperimentConfig cfg = common.Load();
      const Corpus c = LoadCorpusChecked(corpus_dir);
      const AugmentedCorpus a = BuildMulticonditionCorpus(
          c.manifest, c.audio, AugmentPlanFor(cfg, RirPoolFor(cfg), NoisePoolFor(cfg), label));
      WriteCorpus({c.name + "-aug", a.manifest, a.audio}, out);
      Log("wrote " + std::to_string(a.manifest.size()) + " utterances to " + out);
    } else if (feat->parsed()) {
      const ExperimentConfig cfg = common.Load();
      const FeatureKind kind = FeatureKindFromString(kind_name);
      const Corpus c = LoadCorpusChecked(corpus_dir);
      FeatureContext ctx{&cfg, nullptr, nullptr};
      FeatureExtractor ext;
      SpeakerEmbedder emb;
      if (kind == FeatureKind::kBottleneckW1) {
        if (extractor_path.empty()) throw Error("make-features: --extractor is required");
        ext = FeatureExtractor::Load(extractor_path);
        ctx.extractor = &ext;
      }
      if (kind == FeatureKind::kBaselineSpkW3) {
        if (embed_from.empty()) throw Error("make-features: --embed-from is required");
        emb = FitEmbedder(cfg, LoadCorpusChecked(embed_from));
        ctx.embedder = &emb;
      }
      WriteArchive(out, ModelFeatures(kind, c, ctx));
    } else if (train->parsed()) {
      const ExperimentConfig cfg = common.Load();
      const Corpus c = LoadCorpusChecked(corpus_dir);
      if (train_extractor) {
        BuildExtractor(cfg, c.manifest, c.audio, Log).Save(out);
      } else {
        if (features_path.empty() || kind_name.empty() || train_domain.empty())
          throw Error("train: --features, --kind and --domain are required");
        const auto feats = ReadFeaturesFor(features_path, c.manifest);
        SaveCheckpoint(out, TrainModel(cfg, FeatureKindFromString(kind_name), train_domain,
                                       KindTrainingViews(cfg, feats, c.manifest), Log));
      }
    } else if (decode->parsed()) {
      const ExperimentConfig cfg = common.Load();
      const Corpus c = LoadCorpusChecked(corpus_dir);
      const Checkpoint ck = LoadCheckpoint(model_path);
      const Network<float> net(ck.arch, ck.params);
      WriteManifest(out, DecodeCorpus(cfg, net, ReadFeaturesFor(features_path, c.manifest),
                                      c.manifest));
    } else if (score->parsed()) {
      const PerReport r = ComputePer(ReadManifest(ref_path), ReadManifest(hyp_path));
      if (!row_train.empty()) {
        PerMatrix m("", {row_train}, {row_test});
        m.at(0, 0) = r;
        const std::string csv = MatrixToCsv(m);
        std::cout << csv.substr(csv.find('\n') + 1);
        return 0;
      }
      std::printf("PER %.2f%% (S=%ld I=%ld D=%ld N=%ld)\n", r.per, r.substitutions,
                  r.insertions, r.deletions, r.ref_length);
    } else if (matrix->parsed()) {
      const ExperimentConfig cfg = common.Load();
      const FeatureKind kind = FeatureKindFromString(kind_name);
      const ExperimentData data = PrepareData(cfg, Log);
      std::optional<FeatureExtractor> ext;
      if (kind == FeatureKind::kBottleneckW1) ext = ExtractorFor(cfg, extractor_path, data);
      const RunRecord rec = RunMatrix(cfg, kind, data, ext ? &*ext : nullptr, Log);
      WriteFileBytes(out + "/tables/" + kind_name + ".csv", MatrixToCsv(rec.matrix));
      std::cout << RenderMatrix(rec.matrix);
    } else if (viz->parsed()) {
      const ExperimentConfig cfg = common.Load();
      const ExperimentData data = PrepareData(cfg, Log);
      const FeatureExtractor ext = ExtractorFor(cfg, extractor_path, data);
      std::string csv = "view,separation,separation_2d\n";
      for (const auto& v : FeatureViews(cfg, data, ext)) {
        for (const auto& w : v.warnings) Log("warning: " + v.view + ": " + w);
        EmitScatter(v.points, v.domain, out + "/plots/" + v.view, v.view);
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f\n", v.view.c_str(), v.separation,
                      v.separation_2d);
        csv += buf;
        std::printf("%-16s %10.4f %10.4f\n", v.view.c_str(), v.separation, v.separation_2d);
      }
      WriteFileBytes(out + "/tables/separation.csv", csv);
    } else if (repro->parsed()) {
      const ExperimentConfig cfg = common.Load();
      const ReproResult r = FullRepro(cfg, out, Log);
      std::cout << r.summary;
    }
  } catch (const std::exception& e) {
    std::cerr << "xdasr: error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
