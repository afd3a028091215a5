// include/xdasr/speaker-embed.h
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

// Sub-speaker chunking and a mean/log-variance + PCA speaker embedding that
// is appended to every frame.

#ifndef XDASR_SPEAKER_EMBED_H_
#define XDASR_SPEAKER_EMBED_H_

#include <string>
#include <vector>

#include "xdasr/dsp.h"
#include "xdasr/viz.h"

namespace xdasr {

constexpr Eigen::Index kSubSpeakerFrames = 6000;

/// A span of one utterance's frames belonging to a sub-speaker chunk.
struct FrameSpan {
  std::size_t utterance = 0;  // index into the feature list
  Eigen::Index begin = 0, end = 0;
};

struct SubSpeaker {
  std::string speaker;
  int chunk = 0;
  std::vector<FrameSpan> spans;
  Eigen::Index NumFrames() const;
};

/// Walks each speaker's utterances in list order and cuts consecutive frames
/// into chunks of chunk_frames; the remainder forms the final chunk.
std::vector<SubSpeaker> SplitSubspeakers(const std::vector<FeatureMatrix>& features,
                                         Eigen::Index chunk_frames = kSubSpeakerFrames);

/// Stacked frames of one sub-speaker.
SeqMatrixd GatherFrames(const SubSpeaker& s, const std::vector<FeatureMatrix>& features);

/// concat(mean, log(var + 1e-8)); fewer than 2 frames gives zero log-variance.
Eigen::VectorXd ChunkStatistics(const Eigen::Ref<const SeqMatrixd>& frames);

struct SpeakerEmbedder {
  Projector projector;
  int Dim() const { return static_cast<int>(projector.OutputDim()); }
};

/// Fits the projector on sub-speaker statistics of training features.
SpeakerEmbedder FitSpeakerEmbedder(const std::vector<FeatureMatrix>& train_features,
                                   int dim = 16,
                                   Eigen::Index chunk_frames = kSubSpeakerFrames);

/// Projected statistics, L2-normalized. Zero-dim embedders return an empty vector.
Eigen::VectorXd ComputeEmbedding(const Eigen::Ref<const SeqMatrixd>& frames,
                                 const SpeakerEmbedder& embedder);

/// Appends each frame's sub-speaker embedding. chunks must cover every frame
/// of every utterance exactly once.
std::vector<FeatureMatrix> AppendEmbeddings(const std::vector<FeatureMatrix>& features,
                                            const std::vector<SubSpeaker>& chunks,
                                            const std::vector<Eigen::VectorXd>& embeddings);

/// SplitSubspeakers + ComputeEmbedding + AppendEmbeddings. stats_source holds
/// the features the statistics are taken from (same shapes in frames as
/// features); it may be the features themselves.
std::vector<FeatureMatrix> AddSpeakerEmbeddings(const std::vector<FeatureMatrix>& features,
                                                const std::vector<FeatureMatrix>& stats_source,
                                                const SpeakerEmbedder& embedder,
                                                Eigen::Index chunk_frames = kSubSpeakerFrames);

}  // namespace xdasr

#endif  // XDASR_SPEAKER_EMBED_H_
