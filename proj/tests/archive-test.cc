// tests/archive-test.cc
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

#include <filesystem>

#include "doctest.h"
#include "xdasr/archive.h"
#include "xdasr/manifest.h"

using namespace xdasr;

TEST_CASE("archive round trip") {
  std::vector<ArchiveRecord> recs(3);
  recs[0] = {"utt-a", SeqMatrixf::Random(5, 3)};
  recs[1] = {"utt-\xc3\xa6", SeqMatrixf::Random(1, 129)};
  recs[2] = {"empty", SeqMatrixf(0, 4)};
  const std::string bytes = SerializeArchive(recs);
  CHECK(bytes.substr(0, 4) == "XDAF");
  const auto back = ParseArchive(bytes);
  REQUIRE(back.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(back[i].id == recs[i].id);
    CHECK(back[i].data.rows() == recs[i].data.rows());
    CHECK(back[i].data.cols() == recs[i].data.cols());
    CHECK(back[i].data == recs[i].data);
  }
  CHECK(SerializeArchive(back) == bytes);
  CHECK_THROWS_AS(ParseArchive(bytes.substr(0, bytes.size() - 3)), Error);
  CHECK_THROWS_AS(ParseArchive("XDAG" + bytes.substr(4)), Error);
}

TEST_CASE("archive files keep feature ids") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "xdasr-archive-test/feats.ark").string();
  FeatureMatrix f;
  f.data = SeqMatrixd::Random(7, 2).cast<float>().cast<double>();
  f.meta.utterance = "s01-u000";
  WriteArchive(path, {f});
  const auto back = ReadArchive(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].meta.utterance == "s01-u000");
  CHECK(back[0].data == f.data);
}

TEST_CASE("manifest parse and format") {
  const std::string text =
      "s1-u000\ts1\tbroadcast\twav/s1-u000.wav\tsil a b sil\n"
      "\n"
      "s1-u000-aug1\ts1\tbroadcast\twav/s1-u000-aug1.wav\tsil a b sil\tsynth-t60=0.3\t5\n";
  const Manifest m = ParseManifest(text);
  REQUIRE(m.size() == 2);
  CHECK(m[0].labels == std::vector<std::string>{"sil", "a", "b", "sil"});
  CHECK_FALSE(m[0].rir_label.has_value());
  CHECK(m[1].rir_label == "synth-t60=0.3");
  CHECK(m[1].snr_db == "5");
  CHECK(ParseManifest(FormatManifest(m)) .size() == 2);
  CHECK(FormatManifest(ParseManifest(FormatManifest(m))) == FormatManifest(m));
  CHECK_THROWS_WITH_AS(ParseManifest("a\tb\tc\n"),
                       doctest::Contains("manifest line 1: expected 5 or 7 fields"), Error);
  CHECK_THROWS_AS(ParseManifest("a\tb\tc\td\te\tf\n"), Error);
}
