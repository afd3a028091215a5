// include/xdasr/bottleneck.h
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

// TDNN acoustic model trained with CTC on the augmented source corpus, frozen
// and tapped at an internal layer to produce bottleneck features.

#ifndef XDASR_BOTTLENECK_H_
#define XDASR_BOTTLENECK_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "xdasr/corpus.h"
#include "xdasr/dsp.h"
#include "xdasr/nnet.h"
#include "xdasr/train.h"

namespace xdasr {

struct ExtractorConfig {
  std::vector<std::vector<int>> splices = {{-2, -1, 0, 1, 2}, {-1, 0, 1}, {-3, 0, 3}, {-3, 0, 3}};
  int width = 128;
  int tap_layer = 3;  // layers [0, tap_layer) are run; 3 taps the third TDNN layer
  FrontendConfig frontend;
  int sample_rate_hz = 8000;
  TrainConfig train;
};

nlohmann::json FrontendToJson(const FrontendConfig& c);
FrontendConfig FrontendFromJson(const nlohmann::json& j);

/// Log-mel with per-utterance mean/variance normalization.
FeatureMatrix ExtractorInput(const Waveform& w, const FrontendConfig& cfg,
                             const FeatureMeta& meta = {});

class FeatureExtractor {
 public:
  FeatureExtractor() = default;
  FeatureExtractor(Checkpoint checkpoint, int tap_layer, FrontendConfig frontend,
                   int sample_rate_hz);

  int tap_layer() const { return tap_layer_; }
  int output_dim() const { return net_.arch().DimAfter(static_cast<std::size_t>(tap_layer_)); }
  int sample_rate_hz() const { return sample_rate_hz_; }
  const FrontendConfig& frontend() const { return frontend_; }
  const Checkpoint& checkpoint() const { return checkpoint_; }

  /// Front-end, then layers [0, tap_layer). Frame count is preserved.
  FeatureMatrix Extract(const Waveform& w, const FeatureMeta& meta = {}) const;
  /// Same, from precomputed extractor input features.
  FeatureMatrix ExtractFromInput(const FeatureMatrix& input) const;

  /// {"tap_layer":..,"frontend_digest":..,"sample_rate_hz":..}
  std::string SidecarJson() const;
  /// Writes <path> (checkpoint) and <path>.json (sidecar).
  void Save(const std::string& path) const;
  static FeatureExtractor Load(const std::string& path);

 private:
  Checkpoint checkpoint_;
  Network<float> net_;
  int tap_layer_ = 0;
  FrontendConfig frontend_;
  int sample_rate_hz_ = 8000;
};

/// Trains the TDNN + softmax stack with CTC on a (multi-condition) source
/// corpus and returns the frozen extractor. epochs = 0 keeps the
/// initialization weights.
FeatureExtractor TrainExtractor(const Manifest& manifest, const std::vector<Waveform>& audio,
                                const PhoneInventory& inventory, const ExtractorConfig& cfg,
                                const std::function<void(const EpochStats&)>& on_epoch = {},
                                const std::function<void(int, std::uint64_t, double)>& on_probe = {});

}  // namespace xdasr

#endif  // XDASR_BOTTLENECK_H_
