// tests/dsp-test.cc
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
#include "xdasr/dsp.h"

using namespace xdasr;

namespace {

Waveform Noise(Eigen::Index n, std::uint64_t seed, double scale = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, scale);
  Waveform w;
  w.samples.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) w.samples[i] = std::clamp(g(rng), -1.0, 1.0);
  return w;
}

Waveform Sawtooth(double f0, Eigen::Index n, int sr = 8000) {
  Waveform w;
  w.sample_rate_hz = sr;
  w.samples.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ph = std::fmod(f0 * i / sr, 1.0);
    w.samples[i] = 0.5 * (2 * ph - 1);
  }
  return w;
}

FeatureMatrix Random(Eigen::Index t, Eigen::Index d, std::uint64_t seed, const std::string& spk,
                     double offset = 0, double scale = 1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(offset, scale);
  FeatureMatrix f;
  f.data.resize(t, d);
  for (Eigen::Index i = 0; i < t; ++i)
    for (Eigen::Index j = 0; j < d; ++j) f.data(i, j) = g(rng);
  f.meta.speaker = spk;
  f.meta.utterance = spk + "-" + std::to_string(seed);
  return f;
}

}  // namespace

TEST_CASE("pre-emphasis") {
  Waveform w;
  w.samples = Eigen::Vector3d(1, 1, 1);
  const Waveform y = PreEmphasize(w, 0.97);
  CHECK(y.samples[0] == doctest::Approx(1.0));
  CHECK(y.samples[1] == doctest::Approx(0.03));
  CHECK(y.samples[2] == doctest::Approx(0.03));
  const Waveform n = Noise(100, 3);
  CHECK(PreEmphasize(n, 0.0).samples == n.samples);
  Waveform z;
  z.samples = Eigen::VectorXd::Zero(50);
  CHECK(PreEmphasize(z, 0.97).samples.isZero());
  CHECK_THROWS_AS(PreEmphasize(w, 1.0), Error);
  w.samples[1] = std::nan("");
  CHECK_THROWS_AS(PreEmphasize(w, 0.5), Error);
}

TEST_CASE("framing") {
  FrontendConfig cfg;
  CHECK(FrameAndWindow(Noise(8000, 1), cfg).rows() == 98);
  CHECK(FrameAndWindow(Noise(200, 1), cfg).rows() == 1);
  CHECK_THROWS_WITH_AS(FrameAndWindow(Noise(199, 1), cfg), "utterance too short", Error);
  cfg.window = WindowKind::kRectangular;
  const Waveform w = Noise(1000, 2);
  const SeqMatrixd f = FrameAndWindow(w, cfg);
  CHECK(f.cols() == 256);
  for (Eigen::Index t = 0; t < f.rows(); ++t) {
    CHECK(f.row(t).head(200).transpose() == w.samples.segment(t * 80, 200));
    CHECK(f.row(t).tail(56).isZero());
  }
  cfg.frame_length_ms = 5;
  CHECK_THROWS_AS(cfg.Validate(8000), Error);
}

TEST_CASE("power spectrum matches naive DFT") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n : {2, 4, 8, 16, 64, 128, 256, 512}) {
    Eigen::VectorXd x(n);
    for (auto& v : x) v = u(rng);
    const Eigen::VectorXd fast = PowerSpectrum(x);
    const Eigen::VectorXd slow = oracle::NaiveDftPower(x);
    REQUIRE(fast.size() == n / 2 + 1);
    CHECK((fast - slow).norm() <= 1e-9 * std::max(1.0, slow.norm()));
  }
  CHECK(PowerSpectrum(Eigen::VectorXd::Zero(64)).isZero());
  const Eigen::VectorXd c = PowerSpectrum(Eigen::VectorXd::Constant(64, 0.5));
  CHECK(c[0] == doctest::Approx(32.0 * 32.0));
  CHECK(c.tail(32).norm() < 1e-9);
  Eigen::VectorXd cosine(128);
  for (int t = 0; t < 128; ++t) cosine[t] = std::cos(2 * M_PI * 9 * t / 128.0);
  const Eigen::VectorXd s = PowerSpectrum(cosine);
  Eigen::Index peak;
  s.maxCoeff(&peak);
  CHECK(peak == 9);
  CHECK(s[9] / s.sum() > 0.999);
  CHECK_THROWS_AS(PowerSpectrum(Eigen::VectorXd::Ones(100)), Error);
}

TEST_CASE("mel filterbank and log-mel") {
  CHECK(HzToMel(700) == doctest::Approx(781.17).epsilon(1e-5));
  CHECK(MelToHz(HzToMel(1234.5)) == doctest::Approx(1234.5));
  FrontendConfig cfg;
  const Eigen::MatrixXd fb = MelFilterbank(cfg, 8000);
  CHECK(fb.rows() == 40);
  CHECK(fb.cols() == 129);
  CHECK(fb.minCoeff() >= 0);
  for (Eigen::Index m = 0; m < fb.rows(); ++m) CHECK(fb.row(m).maxCoeff() > 0);
  const Eigen::VectorXd zero = LogMel(Eigen::VectorXd::Zero(129), cfg, 8000);
  CHECK(zero.size() == 40);
  CHECK((zero.array() - std::log(cfg.energy_floor)).abs().maxCoeff() < 1e-12);
  const SeqMatrixd lm = ComputeLogMel(Noise(4000, 4), cfg);
  CHECK(lm.cols() == 40);
  CHECK(lm.allFinite());
}

TEST_CASE("pitch tracker") {
  FrontendConfig cfg;
  const Waveform saw = Sawtooth(200, 8000);
  const SeqMatrixd p = PitchFeatures(saw, cfg);
  CHECK(p.cols() == 3);
  CHECK(p.rows() == ComputeLogMel(saw, cfg).rows());
  for (Eigen::Index t = 3; t < p.rows() - 3; ++t) {
    const double f0 = std::exp(p(t, 0));
    CHECK(std::abs(f0 - 200) <= 10);
  }
  Waveform silence;
  silence.samples = Eigen::VectorXd::Zero(4000);
  CHECK(PitchFeatures(silence, cfg).col(1).maxCoeff() <= 0.3);
  const SeqMatrixd pn = PitchFeatures(Noise(16000, 11), cfg);
  const double unvoiced = (pn.col(1).array() < cfg.voicing_threshold).cast<double>().mean();
  CHECK(unvoiced >= 0.9);
}

TEST_CASE("deltas") {
  FeatureMatrix f = Random(20, 4, 1, "a");
  for (Eigen::Index t = 0; t < 20; ++t) f.data.row(t) = f.data.row(0);
  FeatureMatrix d = AddDeltas(f);
  CHECK(d.Dims() == 12);
  CHECK(d.data.rightCols(8).isZero());
  FeatureMatrix ramp;
  ramp.data.resize(30, 1);
  for (int t = 0; t < 30; ++t) ramp.data(t, 0) = 0.25 * t;
  const SeqMatrixd dr = Deltas(ramp.data);
  for (int t = 2; t < 28; ++t) CHECK(dr(t, 0) == doctest::Approx(0.25));
  FeatureMatrix base;
  base.data = SeqMatrixd::Random(10, 40);
  CHECK(AddDeltas(base).Dims() == 120);
  CHECK(ComputeBaselineFeatures(Noise(4000, 5), FrontendConfig{}).Dims() == 129);
}

TEST_CASE("per-speaker cmvn") {
  std::vector<FeatureMatrix> in = {Random(50, 6, 1, "a", 3, 2), Random(70, 6, 2, "a", 3, 2),
                                   Random(40, 6, 3, "b", -5, 0.5)};
  for (auto& f : in) f.data.col(5).setConstant(7.0);
  const auto out = CmvnPerSpeaker(in);
  for (const std::string spk : {"a", "b"}) {
    SeqMatrixd pooled(0, 6);
    for (const auto& f : out)
      if (f.meta.speaker == spk) {
        pooled.conservativeResize(pooled.rows() + f.Frames(), Eigen::NoChange);
        pooled.bottomRows(f.Frames()) = f.data;
      }
    const Eigen::RowVectorXd mean = pooled.colwise().mean();
    const Eigen::RowVectorXd var = (pooled.rowwise() - mean).array().square().colwise().mean();
    CHECK(mean.cwiseAbs().maxCoeff() < 1e-6);
    for (int j = 0; j < 5; ++j) CHECK(std::abs(var(j) - 1) < 1e-6);
    CHECK(pooled.col(5).isZero());
  }
  const auto twice = CmvnPerSpeaker(out);
  for (std::size_t i = 0; i < out.size(); ++i)
    CHECK((twice[i].data - out[i].data).cwiseAbs().maxCoeff() < 1e-9);
  CHECK_THROWS_AS(CmvnPerSpeaker({Random(1, 3, 1, "c")}), Error);
  const FeatureMatrix u = CmvnUtterance(in[0]);
  CHECK(u.data.colwise().mean().head(5).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(u.meta.utterance == in[0].meta.utterance);
}

TEST_CASE("window stacking and subsampling") {
  const FeatureMatrix f = Random(9, 5, 4, "a");
  CHECK(StackWindow(f, 1).data == f.data);
  const FeatureMatrix s = StackWindow(f, 3);
  CHECK(s.Dims() == 15);
  CHECK(s.data.middleCols(5, 5) == f.data);
  CHECK(s.data.row(0).head(5) == f.data.row(0));
  CHECK(s.data.row(8).tail(5) == f.data.row(8));
  CHECK(s.data.row(4).head(5) == f.data.row(3));
  FeatureMatrix wide;
  wide.data = SeqMatrixd::Random(4, 129);
  CHECK(StackWindow(wide, 3).Dims() == 387);
  const FeatureMatrix one = Random(1, 3, 5, "a");
  const FeatureMatrix one3 = StackWindow(one, 3);
  for (int k = 0; k < 3; ++k) CHECK(one3.data.block(0, 3 * k, 1, 3) == one.data);
  CHECK_THROWS_AS(StackWindow(f, 2), Error);

  const FeatureMatrix six = Random(6, 2, 6, "a");
  const auto c6 = SubsampleCopies(six, 2);
  REQUIRE(c6.size() == 2);
  CHECK(c6[0].Frames() == 3);
  CHECK(c6[1].Frames() == 3);
  for (int t = 0; t < 6; ++t) CHECK(c6[t % 2].data.row(t / 2) == six.data.row(t));
  const auto c5 = SubsampleCopies(Random(5, 2, 7, "a"), 2);
  CHECK(c5[0].Frames() == 3);
  CHECK(c5[1].Frames() == 2);
  const auto c1 = SubsampleCopies(six, 1);
  REQUIRE(c1.size() == 1);
  CHECK(c1[0].data == six.data);
}

TEST_CASE("front-end is pure") {
  const Waveform w = Noise(6000, 9);
  const FeatureMatrix a = ComputeBaselineFeatures(w, FrontendConfig{});
  const FeatureMatrix b = ComputeBaselineFeatures(w, FrontendConfig{});
  CHECK(a.data == b.data);
  CHECK(a.data.allFinite());
  FrontendConfig other;
  other.n_mels = 30;
  CHECK(other.Digest() != FrontendConfig{}.Digest());
}
