// tests/scoring-test.cc
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

#include <algorithm>
#include <random>
#include <regex>

#include "doctest.h"
#include "oracles.h"
#include "xdasr/scoring.h"

using namespace xdasr;

namespace {

ManifestEntry Entry(const std::string& id, std::vector<std::string> labels) {
  ManifestEntry e;
  e.utterance = id;
  e.speaker = "s";
  e.domain = "d";
  e.audio_path = id + ".wav";
  e.labels = std::move(labels);
  return e;
}

std::string Squash(const std::string& s) {
  return std::regex_replace(s, std::regex(" +"), " ");
}

}  // namespace

TEST_CASE("edit distance examples") {
  const std::vector<int> a = {1, 2, 3};
  const EditCounts same = EditDistance(a, a);
  CHECK(same.Total() == 0);
  const std::string k = "kitten", s = "sitting";
  const EditCounts ks = EditDistance(std::vector<char>(k.begin(), k.end()),
                                     std::vector<char>(s.begin(), s.end()));
  CHECK(ks.Total() == 3);
  CHECK(ks.substitutions == 2);
  CHECK(ks.insertions == 1);
  const EditCounts ins = EditDistance(std::vector<int>{}, std::vector<int>{4, 5, 6});
  CHECK(ins.insertions == 3);
  CHECK(ins.Total() == 3);
  // Substitution preferred over an insertion + deletion pair.
  const EditCounts sub = EditDistance(std::vector<int>{1}, std::vector<int>{2});
  CHECK(sub.substitutions == 1);
  CHECK(sub.Total() == 1);
}

TEST_CASE("edit distance is a metric matching exhaustive alignment") {
  std::mt19937_64 rng(12);
  auto random_seq = [&] {
    std::vector<int> v(rng() % 7);
    for (auto& x : v) x = static_cast<int>(rng() % 3);
    return v;
  };
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_seq(), b = random_seq(), c = random_seq();
    const long ab = EditDistance(a, b).Total();
    CHECK(ab == oracle::ExhaustiveEditDistance(a, b));
    CHECK(ab == EditDistance(b, a).Total());
    CHECK((ab == 0) == (a == b));
    CHECK(EditDistance(a, c).Total() <= ab + EditDistance(b, c).Total());
    const EditCounts e = EditDistance(a, b);
    CHECK(static_cast<long>(a.size()) - e.deletions + e.insertions == static_cast<long>(b.size()));
  }
}

TEST_CASE("per with filtering") {
  const Manifest refs = {Entry("u1", {"sil", "a", "b", "noise"})};
  const Manifest hyps = {Entry("u1", {"a", "c"})};
  const PerReport r = ComputePer(refs, hyps, {"sil", "noise"});
  CHECK(r.substitutions == 1);
  CHECK(r.ref_length == 2);
  CHECK(r.per == doctest::Approx(50.0));
  CHECK(ComputePer(refs, refs).per == 0.0);

  Manifest many = {Entry("u1", {"a", "b"}), Entry("u2", {"c"}), Entry("u3", {"a", "a", "b"})};
  Manifest h = {Entry("u1", {"a"}), Entry("u2", {"c", "c"}), Entry("u3", {"b"})};
  const double per = ComputePer(many, h).per;
  std::reverse(h.begin(), h.end());
  CHECK(ComputePer(many, h).per == per);
  std::reverse(many.begin(), many.end());
  CHECK(ComputePer(many, h).per == per);

  CHECK_THROWS_AS(ComputePer(refs, {Entry("u2", {"a"})}), Error);
  CHECK_THROWS_AS(ComputePer(refs, {}), Error);
  CHECK_THROWS_WITH_AS(ComputePer({}, {}), "no reference frames", Error);
}

TEST_CASE("relative improvement") {
  CHECK(std::abs(RelativeImprovement(34.8, 24.7) - 29.0) <= 0.05);
  CHECK(std::abs(RelativeImprovement(67.1, 35.0) - 47.8) <= 0.05);
  CHECK(std::abs(RelativeImprovement(5.8, 4.9) - 15.5) <= 0.05);
  CHECK(std::abs(RelativeImprovement(34.5, 32.6) - 5.5) <= 0.05);
  CHECK(RelativeImprovement(12.0, 12.0) == 0.0);
  CHECK(RelativeImprovement(40.0, 10.0) == doctest::Approx(100.0 - 100.0 * 10.0 / 40.0));
  CHECK_THROWS_AS(RelativeImprovement(0.0, 1.0), Error);
}

TEST_CASE("matrix rendering") {
  PerMatrix m("baseline", {"Conversational Speech", "Broadcast News"},
              {"Conversational", "Broadcast", "Scripted"});
  const double v[2][3] = {{34.5, 34.8, 40.1}, {60.8, 5.8, 67.1}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) m.at(r, c) = PerReport{0, 0, 0, 1, v[r][c]};
  const std::string text = RenderMatrix(m);
  CHECK(Squash(text).find("Conversational Speech | 34.5 | 34.8 | 40.1") != std::string::npos);
  PerMatrix one("m", {"a"}, {"b"});
  one.at(0, 0) = PerReport{1, 0, 0, 3, 100.0 / 3};
  CHECK(Squash(RenderMatrix(one)).find("a | 33.3") != std::string::npos);
  PerMatrix absent("m", {"a"}, {"b", "c"});
  absent.at(0, 0) = PerReport{0, 0, 0, 1, 0.0};
  CHECK(Squash(RenderMatrix(absent)).find("a | 0.0 | -") != std::string::npos);
  const std::string csv = MatrixToCsv(absent);
  CHECK(csv.rfind("train_corpus,test_corpus,per,S,I,D,N\n", 0) == 0);
  CHECK(csv.find("a,c,-,-,-,-,-") != std::string::npos);
}

TEST_CASE("compare runs") {
  PerMatrix base("b", {"conv", "bn"}, {"conv", "bn", "scr"});
  PerMatrix prop("p", {"conv", "bn"}, {"conv", "bn", "scr"});
  const double b[2][3] = {{34.5, 34.8, 40.1}, {60.8, 5.8, 67.1}};
  const double p[2][3] = {{32.6, 24.7, 33.2}, {53.4, 4.9, 35.0}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) {
      base.at(r, c) = PerReport{0, 0, 0, 1, b[r][c]};
      prop.at(r, c) = PerReport{0, 0, 0, 1, p[r][c]};
    }
  const ImprovementTable t = CompareRuns(base, prop);
  CHECK(std::abs(*t.cells[0][1] - 29.0) <= 0.05);
  CHECK(std::abs(*t.cells[0][2] - 17.2) <= 0.05);
  CHECK(std::abs(*t.cells[1][0] - 12.2) <= 0.05);
  CHECK(std::abs(*t.cells[1][2] - 47.8) <= 0.05);
  CHECK(t.cross_domain[0][1]);
  CHECK_FALSE(t.cross_domain[0][0]);
  CHECK(t.cross_domain[0][2]);
  const ImprovementTable zero = CompareRuns(base, base);
  for (const auto& row : zero.cells)
    for (const auto& c : row) CHECK(*c == 0.0);
  const ImprovementTable worse = CompareRuns(prop, base);
  CHECK(*worse.cells[0][1] < 0);
  CHECK(RenderImprovements(worse).find("-40.9%") != std::string::npos);
  PerMatrix other("o", {"conv"}, {"conv"});
  CHECK_THROWS_AS(CompareRuns(base, other), Error);
}
