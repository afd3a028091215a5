// include/xdasr/train.h
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

#ifndef XDASR_TRAIN_H_
#define XDASR_TRAIN_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "xdasr/ctc.h"
#include "xdasr/nnet.h"

namespace xdasr {

struct TrainExample {
  std::string id;
  SeqMatrixf features;
  LabelSeq labels;
};

struct TrainConfig {
  int epochs = 15;
  SgdConfig sgd;
  /// Learning rate multiplier applied after every epoch.
  double lr_decay = 1.0;
  std::uint64_t seed = 1;
  /// Initializations probed by InitializeAndTrainCtc; candidate 0 uses seed.
  int init_candidates = 3;
  int probe_epochs = 1;
};

struct EpochStats {
  int epoch = 0;
  double loss_per_frame = 0;
  double learning_rate = 0;
  int skipped = 0;  // examples too short for their labels
};

/// One CTC loss + gradient evaluation on one utterance.
struct CtcStep {
  double loss = 0;
  Vector<float> grads;
};
CtcStep CtcLossAndGradient(const Network<float>& net, const TrainExample& ex);

/// Per-utterance SGD on the CTC objective; examples are visited in a seeded
/// shuffled order each epoch. Throws if the loss becomes non-finite.
std::vector<EpochStats> TrainCtc(Network<float>& net, const std::vector<TrainExample>& examples,
                                 const TrainConfig& cfg,
                                 const std::function<void(const EpochStats&)>& on_epoch = {});

/// Trains each candidate initialization for probe_epochs, then trains the
/// one with the lowest final loss per frame from scratch for cfg.epochs.
/// With one candidate this is net.Initialize(cfg.seed) followed by TrainCtc.
std::vector<EpochStats> InitializeAndTrainCtc(
    Network<float>& net, const std::vector<TrainExample>& examples, const TrainConfig& cfg,
    const std::function<void(const EpochStats&)>& on_epoch = {},
    const std::function<void(int, std::uint64_t, double)>& on_probe = {});

/// Greedy decoding when beam <= 1, prefix beam search otherwise.
LabelSeq DecodeUtterance(const Network<float>& net, const SeqMatrixf& features, int beam = 1);

}  // namespace xdasr

#endif  // XDASR_TRAIN_H_
