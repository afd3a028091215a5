// tests/speaker-embed-test.cc
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

#include <random>

#include "doctest.h"
#include "xdasr/corpus.h"
#include "xdasr/speaker-embed.h"

using namespace xdasr;

namespace {

FeatureMatrix Feats(const std::string& spk, Eigen::Index t, Eigen::Index d, std::uint64_t seed,
                    double offset = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(offset, 1);
  FeatureMatrix f;
  f.data.resize(t, d);
  for (Eigen::Index i = 0; i < t; ++i)
    for (Eigen::Index j = 0; j < d; ++j) f.data(i, j) = g(rng);
  f.meta.speaker = spk;
  f.meta.utterance = spk + "-" + std::to_string(seed);
  return f;
}

}  // namespace

TEST_CASE("sub-speaker chunking") {
  auto count = [](const std::vector<FeatureMatrix>& f) { return SplitSubspeakers(f).size(); };
  CHECK(count({Feats("a", 12000, 1, 1)}) == 2);
  CHECK(count({Feats("a", 100, 1, 1)}) == 1);
  const auto c = SplitSubspeakers({Feats("a", 2500, 1, 1), Feats("a", 3501, 1, 2)});
  REQUIRE(c.size() == 2);
  CHECK(c[0].NumFrames() == 6000);
  CHECK(c[1].NumFrames() == 1);
  CHECK(c[0].spans.size() == 2);

  const std::vector<FeatureMatrix> mixed = {Feats("a", 700, 2, 1), Feats("b", 300, 2, 2),
                                            Feats("a", 800, 2, 3), Feats("b", 50, 2, 4)};
  const auto chunks = SplitSubspeakers(mixed, 400);
  std::vector<std::vector<int>> owner(mixed.size());
  for (std::size_t i = 0; i < mixed.size(); ++i) owner[i].assign(mixed[i].Frames(), 0);
  for (std::size_t k = 0; k < chunks.size(); ++k) {
    if (k + 1 < chunks.size() && chunks[k + 1].speaker == chunks[k].speaker)
      CHECK(chunks[k].NumFrames() == 400);
    for (const auto& s : chunks[k].spans) {
      CHECK(mixed[s.utterance].meta.speaker == chunks[k].speaker);
      for (auto t = s.begin; t < s.end; ++t) ++owner[s.utterance][t];
    }
  }
  for (const auto& o : owner)
    for (int n : o) CHECK(n == 1);
}

TEST_CASE("chunk statistics and embeddings") {
  const SeqMatrixd one = Feats("a", 1, 4, 1).data;
  const Eigen::VectorXd s1 = ChunkStatistics(one);
  CHECK(s1.head(4) == one.row(0).transpose());
  CHECK(s1.tail(4).isZero());

  std::vector<FeatureMatrix> train;
  for (int spk = 0; spk < 6; ++spk)
    for (int u = 0; u < 3; ++u)
      train.push_back(Feats("s" + std::to_string(spk), 300, 5, 10 * spk + u, 0.5 * spk));
  const SpeakerEmbedder emb = FitSpeakerEmbedder(train, 4, 200);
  CHECK(emb.Dim() == 4);
  const SeqMatrixd chunk = Feats("x", 150, 5, 99).data;
  const Eigen::VectorXd e1 = ComputeEmbedding(chunk, emb), e2 = ComputeEmbedding(chunk, emb);
  CHECK(e1 == e2);
  CHECK(std::abs(e1.norm() - 1) < 1e-9);
  // A single-frame chunk uses the mean only.
  CHECK(std::abs(ComputeEmbedding(Feats("y", 1, 5, 3).data, emb).norm() - 1) < 1e-9);
  // More axes than training chunks: the rank fallback keeps things finite.
  const SpeakerEmbedder wide = FitSpeakerEmbedder(train, 10, 100000);
  CHECK(wide.Dim() == 10);
  CHECK(ComputeEmbedding(chunk, wide).allFinite());
}

TEST_CASE("appending embeddings") {
  std::vector<FeatureMatrix> feats = {Feats("a", 5000, 129, 1), Feats("a", 2000, 129, 2),
                                      Feats("b", 900, 129, 3)};
  const SpeakerEmbedder emb = FitSpeakerEmbedder(feats, 16, 1000);
  const auto out = AddSpeakerEmbeddings(feats, feats, emb);
  REQUIRE(out.size() == 3);
  CHECK(out[0].Dims() == 145);
  CHECK(out[0].data.leftCols(129) == feats[0].data);
  CHECK(out[0].meta.kind == "+spk");
  // Utterance 0 and the first 1000 frames of utterance 1 share chunk 0 of "a".
  for (Eigen::Index t = 1; t < 5000; ++t)
    CHECK(out[0].data.row(t).tail(16) == out[0].data.row(0).tail(16));
  CHECK(out[1].data.row(999).tail(16) == out[0].data.row(0).tail(16));
  CHECK(out[1].data.row(1000).tail(16) != out[0].data.row(0).tail(16));
  CHECK(out[2].data.row(0).tail(16) != out[1].data.row(1000).tail(16));

  SpeakerEmbedder none;
  none.projector.mean = Eigen::VectorXd::Zero(258);
  none.projector.axes.resize(258, 0);
  CHECK(AddSpeakerEmbeddings(feats, feats, none)[0].data == feats[0].data);

  auto chunks = SplitSubspeakers(feats);
  std::vector<Eigen::VectorXd> e(chunks.size(), Eigen::VectorXd::Ones(2));
  chunks.back().spans.back().end -= 1;
  CHECK_THROWS_WITH_AS(AppendEmbeddings(feats, chunks, e), doctest::Contains("no owning sub-speaker"),
                       Error);
}

TEST_CASE("same-speaker chunks are closer than other speakers") {
  double same_sum = 0, diff_sum = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    CorpusConfig cfg;
    cfg.name = "spk";
    cfg.domain = DomainProfile::Scripted();
    cfg.n_speakers = 4;
    cfg.n_utts_per_speaker = 8;
    cfg.seed = seed;
    const Corpus c = GenerateCorpus(cfg);
    std::vector<FeatureMatrix> feats;
    for (std::size_t i = 0; i < c.audio.size(); ++i)
      feats.push_back(ComputeBaselineFeatures(c.audio[i], FrontendConfig{},
                                              {c.manifest[i].utterance, c.manifest[i].speaker,
                                               "scripted", ""}));
    const Eigen::Index chunk = 400;
    const SpeakerEmbedder emb = FitSpeakerEmbedder(feats, 8, chunk);
    const auto chunks = SplitSubspeakers(feats, chunk);
    std::vector<Eigen::VectorXd> e;
    for (const auto& ch : chunks) e.push_back(ComputeEmbedding(GatherFrames(ch, feats), emb));
    double same = 0, diff = 0;
    int ns = 0, nd = 0;
    for (std::size_t i = 0; i < chunks.size(); ++i)
      for (std::size_t j = i + 1; j < chunks.size(); ++j) {
        const double dist = (e[i] - e[j]).norm();
        if (chunks[i].speaker == chunks[j].speaker) {
          same += dist;
          ++ns;
        } else {
          diff += dist;
          ++nd;
        }
      }
    REQUIRE(ns > 0);
    same_sum += same / ns;
    diff_sum += diff / nd;
  }
  CHECK(same_sum < diff_sum);
}
