// tests/corpus-test.cc
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
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "xdasr/corpus.h"
#include "xdasr/dsp.h"

using namespace xdasr;

namespace {

CorpusConfig Small(DomainProfile domain, std::uint64_t seed = 3) {
  CorpusConfig c;
  c.name = domain.name;
  c.domain = domain;
  c.n_speakers = 3;
  c.n_utts_per_speaker = 4;
  c.seed = seed;
  return c;
}

double HighBandFraction(const Waveform& w, double cutoff_hz) {
  FrontendConfig cfg;
  cfg.window = WindowKind::kHanning;
  const SeqMatrixd frames = FrameAndWindow(w, cfg);
  double hi = 0, total = 0;
  const int bins = cfg.n_fft / 2 + 1;
  const int first = static_cast<int>(std::ceil(cutoff_hz * cfg.n_fft / w.sample_rate_hz));
  for (Eigen::Index t = 0; t < frames.rows(); ++t) {
    const Eigen::VectorXd s = PowerSpectrum(frames.row(t).transpose());
    total += s.sum();
    hi += s.segment(first, bins - first).sum();
  }
  return hi / total;
}

}  // namespace

TEST_CASE("phone inventories") {
  const PhoneInventory t = PhoneInventory::Target(), s = PhoneInventory::Source();
  CHECK(t.phones().size() == 20);
  CHECK(t.NumLabels() == 23);
  CHECK(t.Symbol(0) == "<blk>");
  CHECK(t.LabelId("sil") == 21);
  CHECK(t.Decode(t.Encode({"sil", "a", "nsn"})) == std::vector<std::string>{"sil", "a", "nsn"});
  CHECK_THROWS_AS(t.Encode({"zz"}), Error);
  std::set<std::string> target, source;
  for (const auto& p : t.phones()) target.insert(p.symbol);
  for (const auto& p : s.phones()) source.insert(p.symbol);
  CHECK(target.size() == 20);
  int shared = 0;
  for (const auto& p : target) shared += source.count(p);
  CHECK(shared == 18);
  t.Validate(8000);
  s.Validate(8000);
}

TEST_CASE("speakers") {
  const auto spk = MakeSpeakers("x", 40, 5);
  for (const auto& s : spk) {
    CHECK(s.f0_hz >= 80);
    CHECK(s.f0_hz <= 300);
    CHECK(s.formant_scale >= 0.85);
    CHECK(s.formant_scale <= 1.15);
  }
  CHECK(spk[0].id == "x-s00");
}

TEST_CASE("corpus generation") {
  CorpusConfig cfg = Small(DomainProfile::Broadcast());
  cfg.n_speakers = 10;
  cfg.n_utts_per_speaker = 20;
  const Corpus a = GenerateCorpus(cfg);
  CHECK(a.manifest.size() == 200);
  for (std::size_t i = 0; i < a.manifest.size(); ++i) {
    const auto& labels = a.manifest[i].labels;
    CHECK(labels.front() == "sil");
    CHECK(labels.back() == "sil");
    int phones = 0;
    for (const auto& l : labels) phones += (l != "sil" && l != "nsn");
    CHECK(phones >= 8);
    CHECK(phones <= 30);
    CHECK(a.audio[i].samples.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(a.audio[i].sample_rate_hz == 8000);
  }
  cfg.n_speakers = 2;
  cfg.n_utts_per_speaker = 3;
  const Corpus b = GenerateCorpus(cfg), c = GenerateCorpus(cfg);
  CHECK(FormatManifest(b.manifest) == FormatManifest(c.manifest));
  for (std::size_t i = 0; i < b.audio.size(); ++i)
    CHECK(SerializeWav(b.audio[i]) == SerializeWav(c.audio[i]));
  cfg.n_speakers = 0;
  CHECK_THROWS_AS(GenerateCorpus(cfg), Error);
}

TEST_CASE("scripted channel adds no noise") {
  const PhoneInventory inv = PhoneInventory::Target();
  const auto spk = MakeSpeakers("s", 3, 1);
  for (int i = 0; i < 3; ++i) {
    const Waveform dry = SynthesizeUtterance({"sil", "a", "s", "i", "m", "sil"}, spk[i], inv, 1.2,
                                             8000, 100 + i);
    const Waveform wet = ApplyChannel(dry, DomainProfile::Scripted(), inv, 7 + i);
    CHECK(HighBandFraction(wet, 3400) == doctest::Approx(HighBandFraction(dry, 3400)).epsilon(1e-6));
    const Waveform tel = ApplyChannel(dry, DomainProfile::Conversational(), inv, 7 + i);
    CHECK(HighBandFraction(tel, 3400) < HighBandFraction(dry, 3400));
  }
}

namespace {

double WelchT(const std::vector<double>& a, const std::vector<double>& b) {
  auto stats = [](const std::vector<double>& v) {
    double m = 0, s = 0;
    for (double x : v) m += x;
    m /= v.size();
    for (double x : v) s += (x - m) * (x - m);
    return std::pair{m, s / (v.size() - 1)};
  };
  const auto [ma, va] = stats(a);
  const auto [mb, vb] = stats(b);
  return (ma - mb) / std::sqrt(va / a.size() + vb / b.size());
}

}  // namespace

TEST_CASE("domains differ in spectral centroid and reverberation") {
  const PhoneInventory inv = PhoneInventory::Target();
  std::map<std::string, std::vector<double>> cent, t60;
  for (auto prof : {DomainProfile::Conversational(), DomainProfile::Broadcast(),
                    DomainProfile::Scripted()}) {
    CorpusConfig cfg = Small(prof, 11);
    cfg.n_speakers = 8;
    cfg.n_utts_per_speaker = 12;
    for (const auto& w : GenerateCorpus(cfg).audio) cent[prof.name].push_back(SpectralCentroid(w));
    // Channel impulse response, measured after the click.
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Waveform click{Eigen::VectorXd::Zero(8000), 8000};
      click.samples[100] = 0.9;
      const Waveform h = ApplyChannel(click, prof, inv, seed);
      t60[prof.name].push_back(MeasureT60(h.samples.tail(8000 - 100), 8000));
    }
  }
  CHECK(std::abs(WelchT(cent["conversational"], cent["scripted"])) > 3);
  CHECK(std::abs(WelchT(cent["conversational"], cent["broadcast"])) > 3);
  CHECK(std::abs(WelchT(t60["broadcast"], t60["scripted"])) > 3);
}

TEST_CASE("synthetic rir") {
  const RoomImpulseResponse zero = SynthRir(0, 8000, 1);
  CHECK(zero.taps.size() == 1);
  CHECK(zero.taps[0] == 1.0);
  for (double t60 : {0.2, 0.3, 0.5, 0.8, 1.2}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const RoomImpulseResponse r = SynthRir(t60, 8000, seed);
      CHECK(r.taps[0] == 1.0);
      CHECK(std::abs(MeasureT60(r.taps, 8000) - t60) <= 0.1 * t60);
    }
  }
  CHECK(SynthRir(0.4, 8000, 9).taps == SynthRir(0.4, 8000, 9).taps);
}

TEST_CASE("wav round trip") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  Waveform w;
  w.samples.resize(1001);
  for (auto& x : w.samples) x = u(rng);
  w.samples[0] = 1.0;
  w.samples[1] = -1.0;
  const std::string bytes = SerializeWav(w);
  const Waveform back = ParseWav(bytes);
  CHECK(back.sample_rate_hz == 8000);
  CHECK((back.samples - w.samples).cwiseAbs().maxCoeff() <= std::pow(2.0, -15));
  CHECK_THROWS_AS(ParseWav(bytes.substr(0, bytes.size() - 10)), Error);
  CHECK_THROWS_AS(ParseWav(bytes.substr(0, 20)), Error);
  std::string stereo = bytes;
  stereo[22] = 2;
  CHECK_THROWS_AS(ParseWav(stereo), Error);
  const std::string dir = (std::filesystem::temp_directory_path() / "xdasr-corpus-test").string();
  WriteWav(dir + "/a.wav", w);
  CHECK(ReadWav(dir + "/a.wav").samples == back.samples);
}

TEST_CASE("corpus files round trip") {
  const Corpus c = GenerateCorpus(Small(DomainProfile::Conversational()));
  const std::string dir = (std::filesystem::temp_directory_path() / "xdasr-corpus-files").string();
  WriteCorpus(c, dir);
  const Corpus back = LoadCorpus(dir);
  CHECK(FormatManifest(back.manifest) == FormatManifest(c.manifest));
  REQUIRE(back.audio.size() == c.audio.size());
  for (std::size_t i = 0; i < c.audio.size(); ++i)
    CHECK((back.audio[i].samples - c.audio[i].samples).cwiseAbs().maxCoeff() <= std::pow(2.0, -15));
  CHECK(ParseManifest("").empty());
  CHECK_THROWS_WITH_AS(ParseManifest(FormatManifest(c.manifest) + "a\tb\tc\td\n"),
                       doctest::Contains("line 13"), Error);
}
