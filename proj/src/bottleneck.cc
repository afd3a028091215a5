// src/bottleneck.cc
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

#include "xdasr/bottleneck.h"

#include "json.hpp"

namespace xdasr {

using nlohmann::json;

json FrontendToJson(const FrontendConfig& c) {
  return json{{"frame_length_ms", c.frame_length_ms},
              {"frame_shift_ms", c.frame_shift_ms},
              {"n_mels", c.n_mels},
              {"pre_emphasis", c.pre_emphasis},
              {"window", static_cast<int>(c.window)},
              {"n_fft", c.n_fft},
              {"low_freq_hz", c.low_freq_hz},
              {"pitch_min_hz", c.pitch_min_hz},
              {"pitch_max_hz", c.pitch_max_hz},
              {"voicing_threshold", c.voicing_threshold},
              {"energy_floor", c.energy_floor}};
}

FrontendConfig FrontendFromJson(const json& j) {
  FrontendConfig c;
  c.frame_length_ms = j.at("frame_length_ms").get<double>();
  c.frame_shift_ms = j.at("frame_shift_ms").get<double>();
  c.n_mels = j.at("n_mels").get<int>();
  c.pre_emphasis = j.at("pre_emphasis").get<double>();
  c.window = static_cast<WindowKind>(j.at("window").get<int>());
  c.n_fft = j.at("n_fft").get<int>();
  c.low_freq_hz = j.at("low_freq_hz").get<double>();
  c.pitch_min_hz = j.at("pitch_min_hz").get<double>();
  c.pitch_max_hz = j.at("pitch_max_hz").get<double>();
  c.voicing_threshold = j.at("voicing_threshold").get<double>();
  c.energy_floor = j.at("energy_floor").get<double>();
  return c;
}

namespace {

int CountLeadingTdnn(const Architecture& arch) {
  int n = 0;
  while (n < static_cast<int>(arch.layers.size()) && arch.layers[n].kind == LayerKind::kTdnn) ++n;
  return n;
}

}  // namespace

FeatureMatrix ExtractorInput(const Waveform& w, const FrontendConfig& cfg,
                             const FeatureMeta& meta) {
  FeatureMatrix f;
  f.data = ComputeLogMel(w, cfg);
  f.frame_shift_ms = cfg.frame_shift_ms;
  f.meta = meta;
  f.meta.kind = "logmel";
  return CmvnUtterance(f);
}

FeatureExtractor::FeatureExtractor(Checkpoint checkpoint, int tap_layer,
                                   FrontendConfig frontend, int sample_rate_hz)
    : checkpoint_(std::move(checkpoint)),
      net_(checkpoint_.arch, checkpoint_.params),
      tap_layer_(tap_layer),
      frontend_(frontend),
      sample_rate_hz_(sample_rate_hz) {
  const int depth = CountLeadingTdnn(checkpoint_.arch);
  if (tap_layer_ < 1 || tap_layer_ > depth)
    throw Error("extractor: tap layer " + std::to_string(tap_layer_) + " outside TDNN depth " +
                std::to_string(depth));
  if (checkpoint_.arch.input_dim != frontend_.n_mels)
    throw Error("extractor: network input does not match front-end width");
  frontend_.Validate(sample_rate_hz_);
}

FeatureMatrix FeatureExtractor::ExtractFromInput(const FeatureMatrix& input) const {
  if (input.Dims() != checkpoint_.arch.input_dim)
    throw Error("extractor: expected " + std::to_string(checkpoint_.arch.input_dim) +
                "-dim input, got " + std::to_string(input.Dims()));
  FeatureMatrix out;
  out.data = net_.Forward(input.data.cast<float>(), nullptr, tap_layer_).cast<double>();
  out.frame_shift_ms = input.frame_shift_ms;
  out.meta = input.meta;
  out.meta.kind = "bottleneck";
  return out;
}

FeatureMatrix FeatureExtractor::Extract(const Waveform& w, const FeatureMeta& meta) const {
  if (w.sample_rate_hz != sample_rate_hz_)
    throw Error("extractor: waveform is " + std::to_string(w.sample_rate_hz) +
                " Hz but the extractor front-end expects " + std::to_string(sample_rate_hz_) +
                " Hz");
  return ExtractFromInput(ExtractorInput(w, frontend_, meta));
}

std::string FeatureExtractor::SidecarJson() const {
  return json{{"tap_layer", tap_layer_},
              {"frontend_digest", frontend_.Digest()},
              {"sample_rate_hz", sample_rate_hz_}}
      .dump();
}

void FeatureExtractor::Save(const std::string& path) const {
  Checkpoint ck = checkpoint_;
  ck.metadata.extra["frontend"] = FrontendToJson(frontend_).dump();
  SaveCheckpoint(path, ck);
  WriteFileBytes(path + ".json", SidecarJson() + "\n");
}

FeatureExtractor FeatureExtractor::Load(const std::string& path) {
  Checkpoint ck = LoadCheckpoint(path);
  json side;
  try {
    side = json::parse(ReadFileBytes(path + ".json"));
  } catch (const json::exception& e) {
    throw Error("extractor sidecar " + path + ".json: " + e.what());
  }
  auto it = ck.metadata.extra.find("frontend");
  if (it == ck.metadata.extra.end()) throw Error("extractor " + path + ": no front-end config");
  const FrontendConfig fe = FrontendFromJson(json::parse(it->second));
  if (fe.Digest() != side.at("frontend_digest").get<std::string>())
    throw Error("extractor " + path + ": front-end digest does not match sidecar");
  ck.metadata.extra.erase("frontend");
  return FeatureExtractor(std::move(ck), side.at("tap_layer").get<int>(), fe,
                          side.at("sample_rate_hz").get<int>());
}

FeatureExtractor TrainExtractor(const Manifest& manifest, const std::vector<Waveform>& audio,
                                const PhoneInventory& inventory, const ExtractorConfig& cfg,
                                const std::function<void(const EpochStats&)>& on_epoch,
                                const std::function<void(int, std::uint64_t, double)>& on_probe) {
  if (manifest.size() != audio.size()) throw Error("extractor: manifest/audio size mismatch");
  if (manifest.empty()) throw Error("extractor: empty source corpus");
  std::vector<TrainExample> examples(manifest.size());
  ParallelFor(manifest.size(), [&](std::size_t i) {
    if (audio[i].sample_rate_hz != cfg.sample_rate_hz)
      throw Error("extractor: " + manifest[i].utterance + " has the wrong sample rate");
    const FeatureMatrix f = ExtractorInput(audio[i], cfg.frontend);
    examples[i] = {manifest[i].utterance, f.data.cast<float>(), inventory.Encode(manifest[i].labels)};
  });
  const Architecture arch =
      Architecture::TdnnCtc(cfg.frontend.n_mels, cfg.splices, cfg.width, inventory.NumLabels());
  Network<float> net(arch);
  InitializeAndTrainCtc(net, examples, cfg.train, on_epoch, on_probe);
  Checkpoint ck;
  ck.arch = arch;
  ck.params = net.params();
  ck.metadata.epoch = cfg.train.epochs;
  ck.metadata.seed = cfg.train.seed;
  ck.metadata.feature_kind = "logmel";
  for (int i = 0; i < inventory.NumLabels(); ++i) ck.metadata.labels.push_back(inventory.Symbol(i));
  return FeatureExtractor(std::move(ck), cfg.tap_layer, cfg.frontend, cfg.sample_rate_hz);
}

}  // namespace xdasr
