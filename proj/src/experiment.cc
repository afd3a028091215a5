// src/experiment.cc
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

#include "xdasr/experiment.h"

#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"
#include "xdasr/viz.h"

namespace xdasr {

using nlohmann::json;

std::string ToString(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kBaselineW3: return "baseline_w3";
    case FeatureKind::kBaselineW1: return "baseline_w1";
    case FeatureKind::kBaselineAugW3: return "baseline_aug_w3";
    case FeatureKind::kBaselineSpkW3: return "baseline_spk_w3";
    case FeatureKind::kBottleneckW1: return "bottleneck_w1";
  }
  throw Error("unknown feature kind");
}

FeatureKind FeatureKindFromString(const std::string& s) {
  for (auto k : {FeatureKind::kBaselineW3, FeatureKind::kBaselineW1, FeatureKind::kBaselineAugW3,
                 FeatureKind::kBaselineSpkW3, FeatureKind::kBottleneckW1})
    if (ToString(k) == s) return k;
  throw Error("unknown feature kind '" + s + "'");
}

int WindowOf(FeatureKind kind) {
  return kind == FeatureKind::kBaselineW1 || kind == FeatureKind::kBottleneckW1 ? 1 : 3;
}

// ---------------------------------------------------------------- config

void ExperimentConfig::Validate() const {
  if (train_domains.empty() || test_domains.empty()) throw Error("config: empty domain list");
  for (const auto& d : train_domains) DomainProfile::ByName(d).Validate(sample_rate_hz);
  for (const auto& d : test_domains) DomainProfile::ByName(d).Validate(sample_rate_hz);
  if (train_speakers <= 0 || train_utts <= 0 || test_speakers <= 0 || test_utts <= 0 ||
      source_speakers <= 0 || source_utts <= 0)
    throw Error("config: corpus sizes must be positive");
  if (lstm_layers <= 0 || lstm_cells <= 0) throw Error("config: bad model size");
  if (stride < 1) throw Error("config: stride must be >= 1");
  if (embed_dim < 0) throw Error("config: embed_dim must be >= 0");
  if (train.epochs < 0) throw Error("config: epochs must be >= 0");
  if (train.init_candidates < 1 || extractor.train.init_candidates < 1)
    throw Error("config: init_candidates must be >= 1");
  if (augment_copies < 0) throw Error("config: augment_copies must be >= 0");
  frontend.Validate(sample_rate_hz);
  extractor.frontend.Validate(sample_rate_hz);
}

namespace {

json TrainToJson(const TrainConfig& t) {
  return json{{"epochs", t.epochs},
              {"learning_rate", t.sgd.learning_rate},
              {"momentum", t.sgd.momentum},
              {"clip", t.sgd.clip},
              {"lr_decay", t.lr_decay},
              {"init_candidates", t.init_candidates},
              {"probe_epochs", t.probe_epochs}};
}

TrainConfig TrainFromJson(const json& j, TrainConfig t) {
  t.epochs = j.value("epochs", t.epochs);
  t.sgd.learning_rate = j.value("learning_rate", t.sgd.learning_rate);
  t.sgd.momentum = j.value("momentum", t.sgd.momentum);
  t.sgd.clip = j.value("clip", t.sgd.clip);
  t.lr_decay = j.value("lr_decay", t.lr_decay);
  t.init_candidates = j.value("init_candidates", t.init_candidates);
  t.probe_epochs = j.value("probe_epochs", t.probe_epochs);
  return t;
}

}  // namespace

std::string ExperimentConfig::ToJson() const {
  json kinds_json = json::array();
  for (auto k : kinds) kinds_json.push_back(ToString(k));
  json j{{"seed", seed},
         {"sample_rate_hz", sample_rate_hz},
         {"train_domains", train_domains},
         {"test_domains", test_domains},
         {"train_speakers", train_speakers},
         {"train_utts", train_utts},
         {"test_speakers", test_speakers},
         {"test_utts", test_utts},
         {"min_phones", min_phones},
         {"max_phones", max_phones},
         {"source_speakers", source_speakers},
         {"source_utts", source_utts},
         {"augment_copies", augment_copies},
         {"rir_pool", rir_pool},
         {"rir_t60", {rir_t60.lo, rir_t60.hi}},
         {"noise_per_kind", noise_per_kind},
         {"lstm_layers", lstm_layers},
         {"lstm_cells", lstm_cells},
         {"train", TrainToJson(train)},
         {"stride", stride},
         {"include_full_rate_view", include_full_rate_view},
         {"cmvn_bottleneck", cmvn_bottleneck},
         {"embed_dim", embed_dim},
         {"beam", beam},
         {"extractor",
          {{"splices", extractor.splices},
           {"width", extractor.width},
           {"tap_layer", extractor.tap_layer},
           {"train", TrainToJson(extractor.train)}}},
         {"frontend", FrontendToJson(frontend)},
         {"viz_frames", viz_frames},
         {"kinds", kinds_json}};
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::FromJson(const std::string& text) {
  ExperimentConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  static const std::set<std::string> known = {
      "seed", "sample_rate_hz", "train_domains", "test_domains", "train_speakers", "train_utts",
      "test_speakers", "test_utts", "min_phones", "max_phones", "source_speakers",
      "source_utts", "augment_copies", "rir_pool", "rir_t60", "noise_per_kind", "lstm_layers",
      "lstm_cells", "train", "stride", "include_full_rate_view", "cmvn_bottleneck",
      "embed_dim", "beam", "extractor", "frontend", "viz_frames", "kinds"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw Error("config: unknown key '" + it.key() + "'");
  try {
    c.seed = j.value("seed", c.seed);
    c.sample_rate_hz = j.value("sample_rate_hz", c.sample_rate_hz);
    c.train_domains = j.value("train_domains", c.train_domains);
    c.test_domains = j.value("test_domains", c.test_domains);
    c.train_speakers = j.value("train_speakers", c.train_speakers);
    c.train_utts = j.value("train_utts", c.train_utts);
    c.test_speakers = j.value("test_speakers", c.test_speakers);
    c.test_utts = j.value("test_utts", c.test_utts);
    c.min_phones = j.value("min_phones", c.min_phones);
    c.max_phones = j.value("max_phones", c.max_phones);
    c.source_speakers = j.value("source_speakers", c.source_speakers);
    c.source_utts = j.value("source_utts", c.source_utts);
    c.augment_copies = j.value("augment_copies", c.augment_copies);
    c.rir_pool = j.value("rir_pool", c.rir_pool);
    if (j.contains("rir_t60")) c.rir_t60 = {j["rir_t60"].at(0), j["rir_t60"].at(1)};
    c.noise_per_kind = j.value("noise_per_kind", c.noise_per_kind);
    c.lstm_layers = j.value("lstm_layers", c.lstm_layers);
    c.lstm_cells = j.value("lstm_cells", c.lstm_cells);
    if (j.contains("train")) c.train = TrainFromJson(j["train"], c.train);
    c.stride = j.value("stride", c.stride);
    c.include_full_rate_view = j.value("include_full_rate_view", c.include_full_rate_view);
    c.cmvn_bottleneck = j.value("cmvn_bottleneck", c.cmvn_bottleneck);
    c.embed_dim = j.value("embed_dim", c.embed_dim);
    c.beam = j.value("beam", c.beam);
    if (j.contains("extractor")) {
      const auto& e = j["extractor"];
      c.extractor.splices = e.value("splices", c.extractor.splices);
      c.extractor.width = e.value("width", c.extractor.width);
      c.extractor.tap_layer = e.value("tap_layer", c.extractor.tap_layer);
      if (e.contains("train")) c.extractor.train = TrainFromJson(e["train"], c.extractor.train);
    }
    if (j.contains("frontend")) c.frontend = FrontendFromJson(j["frontend"]);
    c.viz_frames = j.value("viz_frames", c.viz_frames);
    if (j.contains("kinds")) {
      c.kinds.clear();
      for (const auto& k : j["kinds"]) c.kinds.push_back(FeatureKindFromString(k.get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  c.Validate();
  return c;
}

std::string ExperimentConfig::Digest() const { return HexDigest(Fnv1a64(ToJson())); }

// ---------------------------------------------------------------- data

namespace {

void Log(const LogFn& log, const std::string& msg) {
  if (log) log(msg);
}

std::vector<std::string> AllDomains(const ExperimentConfig& cfg) {
  std::vector<std::string> out = cfg.train_domains;
  for (const auto& d : cfg.test_domains)
    if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
  return out;
}

std::string SeedTag(const ExperimentConfig& cfg) { return " (seed " + std::to_string(cfg.seed) + ")"; }

template <typename Fn>
auto Stage(const std::string& name, const ExperimentConfig& cfg, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw Error("stage " + name + SeedTag(cfg) + ": " + e.what());
  }
}

}  // namespace

CorpusConfig CorpusConfigFor(const ExperimentConfig& cfg, const std::string& domain,
                             const std::string& split) {
  if (split != "train" && split != "test") throw Error("corpus: unknown split '" + split + "'");
  const bool source = domain == "source";
  if (source && split != "train") throw Error("corpus: the source corpus has no test split");
  CorpusConfig c;
  c.name = domain + "-" + split;
  c.inventory = source ? "source" : "target";
  c.domain = DomainProfile::ByName(domain);
  c.sample_rate_hz = cfg.sample_rate_hz;
  c.n_speakers = source ? cfg.source_speakers : split == "train" ? cfg.train_speakers
                                                                 : cfg.test_speakers;
  c.n_utts_per_speaker = source ? cfg.source_utts : split == "train" ? cfg.train_utts
                                                                     : cfg.test_utts;
  c.min_phones = cfg.min_phones;
  c.max_phones = cfg.max_phones;
  c.seed = DeriveSeed(cfg.seed, "corpus:" + c.name);
  return c;
}

std::vector<RoomImpulseResponse> RirPoolFor(const ExperimentConfig& cfg) {
  return MakeRirPool(cfg.rir_pool, cfg.rir_t60, cfg.sample_rate_hz, DeriveSeed(cfg.seed, "rirs"));
}

std::vector<NoiseSource> NoisePoolFor(const ExperimentConfig& cfg) {
  return MakeNoisePool(cfg.noise_per_kind, 4.0, cfg.sample_rate_hz, DeriveSeed(cfg.seed, "noises"),
                       PhoneInventory::Source());
}

AugmentPlan AugmentPlanFor(const ExperimentConfig& cfg, const std::vector<RoomImpulseResponse>& rirs,
                           const std::vector<NoiseSource>& noises, const std::string& label) {
  AugmentPlan plan;
  plan.n_copies = cfg.augment_copies;
  plan.seed = DeriveSeed(cfg.seed, "augment:" + label);
  plan.rirs = rirs;
  plan.noises = noises;
  return plan;
}

ExperimentData PrepareData(const ExperimentConfig& cfg, const LogFn& log) {
  cfg.Validate();
  ExperimentData data;
  auto make = [&](const std::string& domain, const std::string& split) {
    const CorpusConfig c = CorpusConfigFor(cfg, domain, split);
    Log(log, "generating " + c.name);
    return GenerateCorpus(c);
  };
  Stage("corpus", cfg, [&] {
    for (const auto& d : cfg.train_domains) data.train[d] = make(d, "train");
    for (const auto& d : cfg.test_domains) data.test[d] = make(d, "test");
    data.source = make("source", "train");
    data.rirs = RirPoolFor(cfg);
    data.noises = NoisePoolFor(cfg);
    return 0;
  });
  return data;
}

AugmentedCorpus AugmentedSource(const ExperimentConfig& cfg, const ExperimentData& data) {
  return BuildMulticonditionCorpus(data.source.manifest, data.source.audio,
                                   AugmentPlanFor(cfg, data.rirs, data.noises, "source"));
}

namespace {

std::function<void(int, std::uint64_t, double)> ProbeLogger(const LogFn& log) {
  return [log](int c, std::uint64_t, double loss) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "  init candidate %d loss/frame %.4f", c, loss);
    Log(log, buf);
  };
}

}  // namespace

FeatureExtractor BuildExtractor(const ExperimentConfig& cfg, const ExperimentData& data,
                                const LogFn& log) {
  const AugmentedCorpus src =
      Stage("augment source", cfg, [&] { return AugmentedSource(cfg, data); });
  return BuildExtractor(cfg, src.manifest, src.audio, log);
}

FeatureExtractor BuildExtractor(const ExperimentConfig& cfg, const Manifest& manifest,
                                const std::vector<Waveform>& audio, const LogFn& log) {
  return Stage("extractor", cfg, [&] {
    ExtractorConfig ec = cfg.extractor;
    ec.sample_rate_hz = cfg.sample_rate_hz;
    ec.train.seed = DeriveSeed(cfg.seed, "extractor");
    Log(log, "training extractor on " + std::to_string(manifest.size()) + " utterances");
    return TrainExtractor(manifest, audio, PhoneInventory::Source(), ec,
                          [&](const EpochStats& s) {
                            char buf[96];
                            std::snprintf(buf, sizeof(buf), "  extractor epoch %d loss/frame %.4f",
                                          s.epoch, s.loss_per_frame);
                            Log(log, buf);
                          },
                          ProbeLogger(log));
  });
}

// ---------------------------------------------------------------- features

std::vector<FeatureMatrix> BaselineFeatures(const Corpus& c, const FrontendConfig& fe, bool cmvn) {
  std::vector<FeatureMatrix> feats(c.manifest.size());
  ParallelFor(c.manifest.size(), [&](std::size_t i) {
    const auto& e = c.manifest[i];
    feats[i] = ComputeBaselineFeatures(c.audio[i], fe, {e.utterance, e.speaker, e.domain, ""});
  });
  return cmvn ? CmvnPerSpeaker(feats) : feats;
}

std::vector<FeatureMatrix> ModelFeatures(FeatureKind kind, const Corpus& c,
                                         const FeatureContext& ctx) {
  const ExperimentConfig& cfg = *ctx.cfg;
  std::vector<FeatureMatrix> feats;
  switch (kind) {
    case FeatureKind::kBaselineW3:
    case FeatureKind::kBaselineW1:
    case FeatureKind::kBaselineAugW3:
      feats = BaselineFeatures(c, cfg.frontend);
      break;
    case FeatureKind::kBaselineSpkW3: {
      if (!ctx.embedder) throw Error("features: speaker kind needs an embedder");
      const auto raw = BaselineFeatures(c, cfg.frontend, false);
      feats = AddSpeakerEmbeddings(CmvnPerSpeaker(raw), raw, *ctx.embedder);
      break;
    }
    case FeatureKind::kBottleneckW1: {
      if (!ctx.extractor) throw Error("features: bottleneck kind needs an extractor");
      feats.resize(c.manifest.size());
      ParallelFor(c.manifest.size(), [&](std::size_t i) {
        const auto& e = c.manifest[i];
        feats[i] = ctx.extractor->Extract(c.audio[i], {e.utterance, e.speaker, e.domain, ""});
      });
      if (cfg.cmvn_bottleneck) feats = CmvnPerSpeaker(feats);
      break;
    }
  }
  const int window = WindowOf(kind);
  if (window != 1)
    for (auto& f : feats) f = StackWindow(f, window);
  return feats;
}

std::vector<TrainExample> TrainingViews(const std::vector<FeatureMatrix>& features,
                                        const Manifest& manifest, const PhoneInventory& inv,
                                        int stride, bool include_full_rate) {
  if (features.size() != manifest.size()) throw Error("views: feature/manifest mismatch");
  std::vector<TrainExample> out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const LabelSeq labels = inv.Encode(manifest[i].labels);
    if (include_full_rate || stride == 1)
      out.push_back({manifest[i].utterance, features[i].data.cast<float>(), labels});
    if (stride > 1) {
      const auto copies = SubsampleCopies(features[i], stride);
      for (std::size_t j = 0; j < copies.size(); ++j)
        out.push_back({manifest[i].utterance + "/s" + std::to_string(j),
                       copies[j].data.cast<float>(), labels});
    }
  }
  return out;
}

SeqMatrixf DecodeView(const FeatureMatrix& f, int stride) {
  if (stride <= 1 || f.Frames() < stride) return f.data.cast<float>();
  return SubsampleCopies(f, stride).front().data.cast<float>();
}

// ---------------------------------------------------------------- matrix

SpeakerEmbedder FitEmbedder(const ExperimentConfig& cfg, const Corpus& train_corpus) {
  return FitSpeakerEmbedder(BaselineFeatures(train_corpus, cfg.frontend, false), cfg.embed_dim);
}

std::vector<TrainExample> KindTrainingViews(const ExperimentConfig& cfg,
                                            const std::vector<FeatureMatrix>& features,
                                            const Manifest& manifest) {
  return TrainingViews(features, manifest, PhoneInventory::Target(), cfg.stride,
                       cfg.include_full_rate_view);
}

Checkpoint TrainModel(const ExperimentConfig& cfg, FeatureKind kind, const std::string& domain,
                      const std::vector<TrainExample>& examples, const LogFn& log) {
  if (examples.empty()) throw Error("train: no examples");
  const PhoneInventory inv = PhoneInventory::Target();
  const std::string kname = ToString(kind);
  const int dim = static_cast<int>(examples.front().features.cols());
  Network<float> net(Architecture::BiLstmCtc(dim, cfg.lstm_layers, cfg.lstm_cells, inv.NumLabels()));
  TrainConfig tc = cfg.train;
  tc.seed = DeriveSeed(cfg.seed, "train:" + kname + ":" + domain);
  Log(log, kname + ": training on " + domain + " (" + std::to_string(examples.size()) +
               " views, " + std::to_string(dim) + " dims)");
  InitializeAndTrainCtc(
      net, examples, tc,
      [&](const EpochStats& s) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "  epoch %d loss/frame %.4f", s.epoch, s.loss_per_frame);
        Log(log, buf);
      },
      ProbeLogger(log));
  Checkpoint ck;
  ck.arch = net.arch();
  ck.params = net.params();
  ck.metadata.epoch = tc.epochs;
  ck.metadata.seed = tc.seed;
  ck.metadata.feature_kind = kname;
  for (int i = 0; i < inv.NumLabels(); ++i) ck.metadata.labels.push_back(inv.Symbol(i));
  ck.metadata.extra["train_domain"] = domain;
  return ck;
}

Manifest DecodeCorpus(const ExperimentConfig& cfg, const Network<float>& net,
                      const std::vector<FeatureMatrix>& features, const Manifest& manifest) {
  if (features.size() != manifest.size()) throw Error("decode: feature/manifest mismatch");
  const PhoneInventory inv = PhoneInventory::Target();
  Manifest hyps = manifest;
  ParallelFor(features.size(), [&](std::size_t i) {
    hyps[i].labels = inv.Decode(DecodeUtterance(net, DecodeView(features[i], cfg.stride), cfg.beam));
  });
  return hyps;
}

RunRecord RunMatrix(const ExperimentConfig& cfg, FeatureKind kind, const ExperimentData& data,
                    const FeatureExtractor* extractor, const LogFn& log) {
  const auto start = std::chrono::steady_clock::now();
  const std::string kname = ToString(kind);
  RunRecord rec;
  rec.kind = kind;
  rec.seed = cfg.seed;
  rec.config_digest = cfg.Digest();
  rec.matrix = PerMatrix(kname, cfg.train_domains, cfg.test_domains);

  for (std::size_t r = 0; r < cfg.train_domains.size(); ++r) {
    const std::string& dom = cfg.train_domains[r];
    const Corpus& train_corpus = data.train.at(dom);
    FeatureContext ctx{&cfg, extractor, nullptr};
    SpeakerEmbedder embedder;
    if (kind == FeatureKind::kBaselineSpkW3) {
      embedder = Stage("speaker-embed", cfg, [&] { return FitEmbedder(cfg, train_corpus); });
      ctx.embedder = &embedder;
    }
    const std::vector<TrainExample> examples = Stage("features", cfg, [&] {
      if (kind == FeatureKind::kBaselineAugW3) {
        const AugmentedCorpus aug = BuildMulticonditionCorpus(
            train_corpus.manifest, train_corpus.audio,
            AugmentPlanFor(cfg, data.rirs, data.noises, "target:" + dom));
        const Corpus c{train_corpus.name + "-aug", aug.manifest, aug.audio};
        return KindTrainingViews(cfg, ModelFeatures(kind, c, ctx), c.manifest);
      }
      return KindTrainingViews(cfg, ModelFeatures(kind, train_corpus, ctx), train_corpus.manifest);
    });
    const Checkpoint ck =
        Stage("train " + kname + "/" + dom, cfg, [&] { return TrainModel(cfg, kind, dom, examples, log); });
    rec.checkpoints[dom] = ck;
    const Network<float> net(ck.arch, ck.params);

    for (std::size_t c = 0; c < cfg.test_domains.size(); ++c) {
      const Corpus& test = data.test.at(cfg.test_domains[c]);
      rec.matrix.at(r, c) = Stage("decode " + kname + "/" + dom + "->" + cfg.test_domains[c], cfg, [&] {
        return ComputePer(test.manifest,
                          DecodeCorpus(cfg, net, ModelFeatures(kind, test, ctx), test.manifest));
      });
      char buf[128];
      std::snprintf(buf, sizeof(buf), "  %s -> %s: PER %.1f", dom.c_str(),
                    cfg.test_domains[c].c_str(), rec.matrix.at(r, c)->per);
      Log(log, buf);
    }
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

// ---------------------------------------------------------------- views

std::vector<SeparationReport> FeatureViews(const ExperimentConfig& cfg, const ExperimentData& data,
                                           const FeatureExtractor& extractor) {
  return Stage("viz", cfg, [&] {
    const auto domains = AllDomains(cfg);
    std::vector<DomainFrames> raw, ext_in, bott, cmvn;
    for (const auto& d : domains) {
      std::vector<const Corpus*> corpora;
      if (data.train.count(d)) corpora.push_back(&data.train.at(d));
      if (data.test.count(d)) corpora.push_back(&data.test.at(d));
      DomainFrames r{d, {}}, x{d, {}}, b{d, {}}, n{d, {}};
      for (const Corpus* c : corpora) {
        auto feats = BaselineFeatures(*c, cfg.frontend, false);
        for (auto& f : CmvnPerSpeaker(feats)) n.features.push_back(std::move(f));
        for (auto& f : feats) r.features.push_back(std::move(f));
        std::vector<FeatureMatrix> xin(c->manifest.size()), bn(c->manifest.size());
        ParallelFor(c->manifest.size(), [&](std::size_t i) {
          if (c->audio[i].sample_rate_hz != extractor.sample_rate_hz())
            throw Error("viz: sample-rate mismatch");
          xin[i] = ExtractorInput(c->audio[i], extractor.frontend());
          bn[i] = extractor.ExtractFromInput(xin[i]);
        });
        for (auto& f : xin) x.features.push_back(std::move(f));
        for (auto& f : bn) b.features.push_back(std::move(f));
      }
      raw.push_back(std::move(r));
      ext_in.push_back(std::move(x));
      bott.push_back(std::move(b));
      cmvn.push_back(std::move(n));
    }
    std::vector<SeparationReport> out;
    const std::vector<std::pair<std::string, const std::vector<DomainFrames>*>> views = {
        {"baseline", &raw}, {"baseline_cmvn", &cmvn}, {"extractor_input", &ext_in},
        {"bottleneck", &bott}};
    for (const auto& [name, frames] : views) {
      SeparationReport rep;
      rep.view = name;
      const LabeledFrames s =
          SampleFrames(*frames, cfg.viz_frames, DeriveSeed(cfg.seed, "viz"), &rep.warnings);
      const Eigen::MatrixXd x = GlobalStandardize(s.frames);
      rep.separation = DomainSeparation(x, s.domain);
      const Projector p = PcaFit(x, 2);
      rep.points = Project(p, x);
      rep.separation_2d = DomainSeparation(rep.points, s.domain);
      rep.domain = s.domain;
      out.push_back(std::move(rep));
    }
    return out;
  });
}

// ---------------------------------------------------------------- repro

PerMatrix PublishedBaselineMatrix() {
  PerMatrix m("baseline_w3", {"conversational", "broadcast"},
              {"conversational", "broadcast", "scripted"});
  const double v[2][3] = {{34.5, 34.8, 40.1}, {60.8, 5.8, 67.1}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) m.at(r, c) = PerReport{0, 0, 0, 0, v[r][c]};
  return m;
}

PerMatrix PublishedBottleneckMatrix() {
  PerMatrix m("bottleneck_w1", {"conversational", "broadcast"},
              {"conversational", "broadcast", "scripted"});
  const double v[2][3] = {{32.6, 24.7, 33.2}, {53.4, 4.9, 35.0}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) m.at(r, c) = PerReport{0, 0, 0, 0, v[r][c]};
  return m;
}

namespace {

std::string ImprovementCsv(const ImprovementTable& t) {
  std::ostringstream out;
  out << "train_corpus,test_corpus,relative_improvement,cross_domain\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.cols.size(); ++c) {
      out << t.rows[r] << ',' << t.cols[c] << ',';
      if (t.cells[r][c]) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", *t.cells[r][c]);
        out << buf;
      } else {
        out << '-';
      }
      out << ',' << (t.cross_domain[r][c] ? 1 : 0) << '\n';
    }
  return out.str();
}

}  // namespace

ReproResult FullRepro(const ExperimentConfig& cfg, const std::string& out_dir, const LogFn& log) {
  ReproResult res;
  const ExperimentData data = PrepareData(cfg, log);
  const FeatureExtractor extractor = BuildExtractor(cfg, data, log);
  if (!out_dir.empty()) extractor.Save(out_dir + "/models/extractor.ck");

  Log(log, "feature views");
  res.views = FeatureViews(cfg, data, extractor);
  for (const auto& v : res.views) {
    for (const auto& w : v.warnings) Log(log, "  warning: " + v.view + ": " + w);
    if (!out_dir.empty())
      Stage("plots", cfg, [&] {
        EmitScatter(v.points, v.domain, out_dir + "/plots/" + v.view, v.view);
        return 0;
      });
  }

  for (FeatureKind k : cfg.kinds) {
    RunRecord rec = RunMatrix(cfg, k, data, &extractor, log);
    if (!out_dir.empty()) {
      WriteFileBytes(out_dir + "/tables/" + ToString(k) + ".csv", MatrixToCsv(rec.matrix));
      for (const auto& [dom, ck] : rec.checkpoints)
        SaveCheckpoint(out_dir + "/models/" + ToString(k) + "-" + dom + ".ck", ck);
    }
    res.runs.emplace(k, std::move(rec));
  }

  std::ostringstream s;
  char buf[256];
  s << "xdasr full-repro\n";
  s << "seed " << cfg.seed << ", config " << cfg.Digest() << "\n\n";
  for (const auto& [k, rec] : res.runs) {
    std::snprintf(buf, sizeof(buf), "PER matrix, %s (%.0f s)\n", ToString(k).c_str(),
                  rec.wall_seconds);
    s << buf << RenderMatrix(rec.matrix) << "\n";
  }
  const auto base = res.runs.find(FeatureKind::kBaselineW3);
  if (base != res.runs.end()) {
    for (const auto& [k, rec] : res.runs) {
      if (k == FeatureKind::kBaselineW3) continue;
      const ImprovementTable t = CompareRuns(base->second.matrix, rec.matrix);
      s << "Relative improvement of " << ToString(k) << " over baseline_w3 (%)\n"
        << RenderImprovements(t) << "\n";
      if (!out_dir.empty())
        WriteFileBytes(out_dir + "/tables/improvement_" + ToString(k) + ".csv", ImprovementCsv(t));
    }
  }
  s << "Domain separation (centroid distance / pooled within-domain sd)\n";
  std::snprintf(buf, sizeof(buf), "%-16s %10s %10s\n", "view", "full-dim", "pca-2d");
  s << buf;
  std::ostringstream sep_csv;
  sep_csv << "view,separation,separation_2d\n";
  for (const auto& v : res.views) {
    std::snprintf(buf, sizeof(buf), "%-16s %10.4f %10.4f\n", v.view.c_str(), v.separation,
                  v.separation_2d);
    s << buf;
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f\n", v.view.c_str(), v.separation,
                  v.separation_2d);
    sep_csv << buf;
  }
  if (!out_dir.empty()) WriteFileBytes(out_dir + "/tables/separation.csv", sep_csv.str());
  s << "\nReference PERs reported on the original corpora "
       "(not directly comparable - restricted corpora)\n";
  const PerMatrix pb = PublishedBaselineMatrix(), pp = PublishedBottleneckMatrix();
  s << "baseline_w3\n" << RenderMatrix(pb) << "bottleneck_w1\n" << RenderMatrix(pp)
    << "relative improvement (%)\n" << RenderImprovements(CompareRuns(pb, pp));
  res.summary = s.str();
  if (!out_dir.empty()) WriteFileBytes(out_dir + "/summary.txt", res.summary);
  return res;
}

}  // namespace xdasr
