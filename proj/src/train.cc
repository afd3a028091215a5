// src/train.cc
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

#include "xdasr/train.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace xdasr {

CtcStep CtcLossAndGradient(const Network<float>& net, const TrainExample& ex) {
  Tape<float> tape;
  const SeqMatrixf log_probs = net.Forward(ex.features, &tape);
  const CtcResult ctc = CtcLoss(log_probs.cast<double>(), ex.labels);
  CtcStep step;
  step.loss = ctc.neg_log_likelihood;
  // The network ends in log-softmax, so feed d nll / d log_probs.
  const SeqMatrixf grad = (-ctc.occupancy).cast<float>();
  step.grads = net.Backward(tape, grad);
  return step;
}

std::vector<EpochStats> TrainCtc(Network<float>& net, const std::vector<TrainExample>& examples,
                                 const TrainConfig& cfg,
                                 const std::function<void(const EpochStats&)>& on_epoch) {
  std::vector<EpochStats> history;
  Vector<float> velocity = Vector<float>::Zero(net.params().size());
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  SgdConfig sgd = cfg.sgd;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::mt19937_64 rng(DeriveSeed(cfg.seed, "epoch" + std::to_string(epoch)));
    std::shuffle(order.begin(), order.end(), rng);
    EpochStats stats;
    stats.epoch = epoch;
    stats.learning_rate = sgd.learning_rate;
    double loss = 0;
    long frames = 0;
    for (std::size_t idx : order) {
      const TrainExample& ex = examples[idx];
      if (ex.features.rows() < RequiredFrames(ex.labels)) {
        ++stats.skipped;
        continue;
      }
      CtcStep step = CtcLossAndGradient(net, ex);
      if (!std::isfinite(step.loss))
        throw Error("training diverged: non-finite loss on " + ex.id + " at epoch " +
                    std::to_string(epoch) + " (seed " + std::to_string(cfg.seed) + ")");
      SgdStep(net.params(), step.grads, velocity, sgd);
      loss += step.loss;
      frames += ex.features.rows();
    }
    stats.loss_per_frame = frames ? loss / frames : 0.0;
    history.push_back(stats);
    if (on_epoch) on_epoch(stats);
    sgd.learning_rate *= cfg.lr_decay;
  }
  return history;
}

std::vector<EpochStats> InitializeAndTrainCtc(
    Network<float>& net, const std::vector<TrainExample>& examples, const TrainConfig& cfg,
    const std::function<void(const EpochStats&)>& on_epoch,
    const std::function<void(int, std::uint64_t, double)>& on_probe) {
  if (cfg.init_candidates < 1) throw Error("train: init_candidates must be >= 1");
  std::uint64_t best_seed = cfg.seed;
  if (cfg.init_candidates > 1 && cfg.probe_epochs > 0 && cfg.epochs > 0) {
    TrainConfig probe = cfg;
    probe.epochs = std::min(cfg.probe_epochs, cfg.epochs);
    double best_loss = std::numeric_limits<double>::infinity();
    for (int c = 0; c < cfg.init_candidates; ++c) {
      const std::uint64_t seed = c == 0 ? cfg.seed : DeriveSeed(cfg.seed, "init" + std::to_string(c));
      Network<float> candidate(net.arch());
      candidate.Initialize(seed);
      const double loss = TrainCtc(candidate, examples, probe).back().loss_per_frame;
      if (on_probe) on_probe(c, seed, loss);
      if (loss < best_loss) {
        best_loss = loss;
        best_seed = seed;
      }
    }
  }
  net.Initialize(best_seed);
  return TrainCtc(net, examples, cfg, on_epoch);
}

LabelSeq DecodeUtterance(const Network<float>& net, const SeqMatrixf& features, int beam) {
  const SeqMatrixd log_probs = net.Forward(features).cast<double>();
  return beam <= 1 ? GreedyDecode(log_probs) : PrefixBeamDecode(log_probs, beam);
}

}  // namespace xdasr
