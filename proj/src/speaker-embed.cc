// src/speaker-embed.cc
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

#include "xdasr/speaker-embed.h"

#include <cmath>
#include <map>

namespace xdasr {

Eigen::Index SubSpeaker::NumFrames() const {
  Eigen::Index n = 0;
  for (const auto& s : spans) n += s.end - s.begin;
  return n;
}

std::vector<SubSpeaker> SplitSubspeakers(const std::vector<FeatureMatrix>& features,
                                         Eigen::Index chunk_frames) {
  if (chunk_frames <= 0) throw Error("subspeakers: chunk size must be positive");
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> by_speaker;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& spk = features[i].meta.speaker;
    if (!by_speaker.count(spk)) order.push_back(spk);
    by_speaker[spk].push_back(i);
  }
  std::vector<SubSpeaker> out;
  for (const auto& spk : order) {
    SubSpeaker cur{spk, 0, {}};
    Eigen::Index filled = 0;
    for (std::size_t u : by_speaker[spk]) {
      Eigen::Index t = 0;
      const Eigen::Index n = features[u].Frames();
      while (t < n) {
        const Eigen::Index take = std::min(n - t, chunk_frames - filled);
        cur.spans.push_back({u, t, t + take});
        t += take;
        filled += take;
        if (filled == chunk_frames) {
          out.push_back(cur);
          cur = SubSpeaker{spk, cur.chunk + 1, {}};
          filled = 0;
        }
      }
    }
    if (filled > 0) out.push_back(cur);
  }
  return out;
}

SeqMatrixd GatherFrames(const SubSpeaker& s, const std::vector<FeatureMatrix>& features) {
  if (s.spans.empty()) return SeqMatrixd();
  const Eigen::Index dim = features.at(s.spans.front().utterance).Dims();
  SeqMatrixd out(s.NumFrames(), dim);
  Eigen::Index row = 0;
  for (const auto& span : s.spans) {
    const auto& f = features.at(span.utterance);
    if (f.Dims() != dim) throw Error("subspeakers: dimension mismatch");
    out.middleRows(row, span.end - span.begin) = f.data.middleRows(span.begin, span.end - span.begin);
    row += span.end - span.begin;
  }
  return out;
}

Eigen::VectorXd ChunkStatistics(const Eigen::Ref<const SeqMatrixd>& frames) {
  if (frames.rows() == 0) throw Error("speaker statistics: empty chunk");
  const Eigen::Index d = frames.cols();
  Eigen::VectorXd stats = Eigen::VectorXd::Zero(2 * d);
  const Eigen::VectorXd mean = frames.colwise().mean().transpose();
  stats.head(d) = mean;
  if (frames.rows() >= 2) {
    const Eigen::VectorXd var =
        (frames.rowwise() - mean.transpose()).array().square().colwise().mean().transpose();
    stats.tail(d) = (var.array() + 1e-8).log().matrix();
  }
  return stats;
}

SpeakerEmbedder FitSpeakerEmbedder(const std::vector<FeatureMatrix>& train_features, int dim,
                                   Eigen::Index chunk_frames) {
  SpeakerEmbedder e;
  const auto chunks = SplitSubspeakers(train_features, chunk_frames);
  if (chunks.empty()) throw Error("speaker embedder: no training frames");
  Eigen::MatrixXd stats;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    const Eigen::VectorXd s = ChunkStatistics(GatherFrames(chunks[i], train_features));
    if (i == 0) stats.resize(static_cast<Eigen::Index>(chunks.size()), s.size());
    stats.row(static_cast<Eigen::Index>(i)) = s.transpose();
  }
  if (dim > stats.cols()) throw Error("speaker embedder: dimension exceeds statistics size");
  if (stats.rows() < dim + 1) {
    // Too few chunks for a full-rank fit: pad with the mean row so the
    // projector gets its remaining axes from the rank fallback.
    const Eigen::RowVectorXd mean = stats.colwise().mean();
    const Eigen::Index have = stats.rows();
    stats.conservativeResize(dim + 1, Eigen::NoChange);
    for (Eigen::Index r = have; r < stats.rows(); ++r) stats.row(r) = mean;
  }
  e.projector = PcaFit(stats, dim);
  return e;
}

Eigen::VectorXd ComputeEmbedding(const Eigen::Ref<const SeqMatrixd>& frames,
                                 const SpeakerEmbedder& embedder) {
  if (embedder.Dim() == 0) return Eigen::VectorXd();
  const Eigen::VectorXd stats = ChunkStatistics(frames);
  Eigen::VectorXd y = Project(embedder.projector, stats.transpose()).row(0).transpose();
  const double norm = y.norm();
  if (!(norm > 1e-300) || !std::isfinite(norm))
    throw Error("speaker embedding: degenerate projection");
  return y / norm;
}

std::vector<FeatureMatrix> AppendEmbeddings(const std::vector<FeatureMatrix>& features,
                                            const std::vector<SubSpeaker>& chunks,
                                            const std::vector<Eigen::VectorXd>& embeddings) {
  if (chunks.size() != embeddings.size()) throw Error("append embedding: count mismatch");
  Eigen::Index e = -1;
  for (const auto& v : embeddings) {
    if (e >= 0 && v.size() != e) throw Error("append embedding: inconsistent dimension");
    e = v.size();
  }
  if (e <= 0) return features;
  std::vector<FeatureMatrix> out(features.size());
  std::vector<std::vector<char>> owned(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    out[i] = features[i];
    out[i].data.conservativeResize(Eigen::NoChange, features[i].Dims() + e);
    owned[i].assign(static_cast<std::size_t>(features[i].Frames()), 0);
  }
  for (std::size_t c = 0; c < chunks.size(); ++c)
    for (const auto& span : chunks[c].spans) {
      auto& f = out.at(span.utterance);
      for (Eigen::Index t = span.begin; t < span.end; ++t) {
        if (t >= f.Frames()) throw Error("append embedding: span exceeds utterance");
        f.data.row(t).tail(e) = embeddings[c].transpose();
        ++owned[span.utterance][t];
      }
    }
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (std::size_t t = 0; t < owned[i].size(); ++t)
      if (owned[i][t] != 1)
        throw Error("append embedding: frame " + std::to_string(t) + " of " +
                    features[i].meta.utterance + " has no owning sub-speaker");
    out[i].meta.kind = features[i].meta.kind + "+spk";
  }
  return out;
}

std::vector<FeatureMatrix> AddSpeakerEmbeddings(const std::vector<FeatureMatrix>& features,
                                                const std::vector<FeatureMatrix>& stats_source,
                                                const SpeakerEmbedder& embedder,
                                                Eigen::Index chunk_frames) {
  if (embedder.Dim() == 0) return features;
  if (stats_source.size() != features.size()) throw Error("speaker embedding: source mismatch");
  for (std::size_t i = 0; i < features.size(); ++i)
    if (stats_source[i].Frames() != features[i].Frames() ||
        stats_source[i].meta.speaker != features[i].meta.speaker)
      throw Error("speaker embedding: source does not align with " + features[i].meta.utterance);
  const auto chunks = SplitSubspeakers(stats_source, chunk_frames);
  std::vector<Eigen::VectorXd> emb(chunks.size());
  ParallelFor(chunks.size(), [&](std::size_t c) {
    emb[c] = ComputeEmbedding(GatherFrames(chunks[c], stats_source), embedder);
  });
  return AppendEmbeddings(features, chunks, emb);
}

}  // namespace xdasr
