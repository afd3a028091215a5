// tests/augment-test.cc
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
#include "oracles.h"
#include "xdasr/augment.h"
#include "xdasr/corpus.h"

using namespace xdasr;

namespace {

Eigen::VectorXd RandomVector(Eigen::Index n, std::uint64_t seed, double scale = 0.3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

Waveform Wave(Eigen::VectorXd s) {
  Waveform w;
  w.samples = std::move(s);
  return w;
}

double SnrDb(const Eigen::VectorXd& s, const Eigen::VectorXd& n) {
  return 10 * std::log10(MeanPower(s) / MeanPower(n));
}

}  // namespace

TEST_CASE("convolution matches the naive oracle") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Eigen::VectorXd x = RandomVector(256, seed), h = RandomVector(64, seed + 100);
    CHECK((Convolve(x, h) - oracle::NaiveConvolve(x, h)).cwiseAbs().maxCoeff() < 1e-9);
  }
  // Large enough to take the FFT path.
  const Eigen::VectorXd x = RandomVector(4000, 9), h = RandomVector(800, 10);
  CHECK((Convolve(x, h) - oracle::NaiveConvolve(x, h)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("convolution is linear") {
  const Eigen::VectorXd x = RandomVector(3000, 1), y = RandomVector(3000, 2),
                        h = RandomVector(900, 3);
  const double a = 0.7, b = -1.3;
  const Eigen::VectorXd lhs = Convolve(a * x + b * y, h);
  const Eigen::VectorXd rhs = a * Convolve(x, h) + b * Convolve(y, h);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("rir identity, shift and normalization") {
  const Waveform w = Wave(RandomVector(500, 4));
  RoomImpulseResponse delta{Eigen::VectorXd::Unit(10, 0), 8000, "delta"};
  CHECK((ConvolveRir(w, delta).samples - w.samples).cwiseAbs().maxCoeff() < 1e-12);
  RoomImpulseResponse shift{Eigen::VectorXd::Unit(10, 4), 8000, "shift"};
  const Waveform y = ConvolveRir(w, shift);
  CHECK(y.samples.head(4).isZero());
  CHECK((y.samples.tail(496) - w.samples.head(496)).cwiseAbs().maxCoeff() < 1e-12);
  const RoomImpulseResponse rev = SynthRir(0.5, 8000, 3);
  const Waveform r = ConvolveRir(w, rev);
  CHECK(r.samples.cwiseAbs().maxCoeff() == doctest::Approx(w.samples.cwiseAbs().maxCoeff()));
  RoomImpulseResponse other = delta;
  other.sample_rate_hz = 16000;
  CHECK_THROWS_AS(ConvolveRir(w, other), Error);
  RoomImpulseResponse late{Eigen::VectorXd::Unit(200, 150), 8000, "late"};
  CHECK_THROWS_AS(late.Validate(), Error);
}

TEST_CASE("noise mixing") {
  const Waveform s = Wave(Eigen::VectorXd::Constant(100, 0.2));
  const Waveform n = Wave(Eigen::VectorXd::Constant(37, -0.2));
  CHECK(MixNoiseDetailed(s, n, 0, 1).gain == doctest::Approx(1.0));
  CHECK(MixNoiseDetailed(s, n, 20, 1).gain == doctest::Approx(0.1));
  for (int k = 0; k < 20; ++k) {
    const Waveform sig = Wave(RandomVector(4000, 10 + k));
    const Waveform noise = Wave(RandomVector(1500, 50 + k, 0.05));
    for (double snr : {0.0, 5.0, 10.0, 15.0, 20.0}) {
      const NoiseMix mix = MixNoiseDetailed(sig, noise, snr, k);
      CHECK(std::abs(SnrDb(mix.signal, mix.noise) - snr) < 0.1);
      CHECK(std::abs(SnrDb(sig.samples, mix.mixed.samples - sig.samples) - snr) < 0.1);
      CHECK(mix.mixed.samples.cwiseAbs().maxCoeff() <= 1.0);
    }
  }
  const Waveform zero = Wave(Eigen::VectorXd::Zero(100));
  CHECK_THROWS_WITH_AS(MixNoiseAtSnr(zero, n, 5, 1), "degenerate power", Error);
  CHECK_THROWS_WITH_AS(MixNoiseAtSnr(s, zero, 5, 1), "degenerate power", Error);
}

TEST_CASE("multi-condition corpus") {
  Manifest m;
  std::vector<Waveform> audio;
  for (int i = 0; i < 10; ++i) {
    ManifestEntry e;
    e.utterance = "s1-u" + std::to_string(i);
    e.speaker = "s1";
    e.domain = "source";
    e.audio_path = "wav/" + e.utterance + ".wav";
    e.labels = {"sil", "a", "sil"};
    m.push_back(e);
    audio.push_back(Wave(RandomVector(2000, 200 + i)));
  }
  AugmentPlan plan;
  plan.seed = 42;
  plan.rirs = MakeRirPool(3, {0.2, 0.6}, 8000, 7);
  plan.noises = {{"white", Wave(RandomVector(3000, 999))}};
  const AugmentedCorpus a = BuildMulticonditionCorpus(m, audio, plan);
  REQUIRE(a.manifest.size() == 40);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(a.manifest[i].utterance == m[i].utterance);
    CHECK(a.audio[i].samples == audio[i].samples);
    for (int c = 1; c <= 3; ++c) {
      const auto& e = a.manifest[10 * c + i];
      CHECK(e.labels == m[i].labels);
      CHECK(e.speaker == m[i].speaker);
      CHECK(e.domain == m[i].domain);
      REQUIRE(e.snr_db.has_value());
      const double snr = std::stod(*e.snr_db);
      CHECK((snr == 0 || snr == 5 || snr == 10 || snr == 15 || snr == 20));
      CHECK(e.rir_label->find("-t60=") != std::string::npos);
    }
  }
  const AugmentedCorpus b = BuildMulticonditionCorpus(m, audio, plan);
  CHECK(FormatManifest(a.manifest) == FormatManifest(b.manifest));
  for (std::size_t i = 0; i < a.audio.size(); ++i) CHECK(a.audio[i].samples == b.audio[i].samples);
  plan.n_copies = 0;
  const AugmentedCorpus same = BuildMulticonditionCorpus(m, audio, plan);
  CHECK(FormatManifest(same.manifest) == FormatManifest(m));
}
