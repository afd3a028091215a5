// src/augment.cc
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

#include "xdasr/augment.h"

#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "xdasr/corpus.h"

namespace xdasr {

void RoomImpulseResponse::Validate() const {
  if (taps.size() == 0) throw Error("rir: empty");
  if (!taps.allFinite()) throw Error("rir: non-finite tap");
  if (sample_rate_hz <= 0) throw Error("rir: bad sample rate");
  Eigen::Index peak;
  taps.cwiseAbs().maxCoeff(&peak);
  if (peak > sample_rate_hz / 100) throw Error("rir: direct path later than 10 ms");
}

void AugmentPlan::Validate() const {
  if (n_copies < 0) throw Error("augment: n_copies must be >= 0");
  if (n_copies > 0) {
    if (snr_grid_db.empty()) throw Error("augment: empty SNR grid");
    if (rirs.empty()) throw Error("augment: empty RIR pool");
    if (noises.empty()) throw Error("augment: empty noise pool");
  }
}

Eigen::VectorXd Convolve(const Eigen::VectorXd& x, const Eigen::VectorXd& kernel) {
  const Eigen::Index n = x.size(), m = kernel.size();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  if (n == 0 || m == 0) return y;
  if (n * std::min(n, m) <= (1 << 16)) {
    for (Eigen::Index t = 0; t < n; ++t) {
      const Eigen::Index taps = std::min(m, t + 1);
      double acc = 0;
      for (Eigen::Index k = 0; k < taps; ++k) acc += kernel[k] * x[t - k];
      y[t] = acc;
    }
    return y;
  }
  Eigen::Index size = 1;
  while (size < n + m - 1) size <<= 1;
  std::vector<double> a(size, 0.0), b(size, 0.0);
  std::copy(x.data(), x.data() + n, a.begin());
  std::copy(kernel.data(), kernel.data() + m, b.begin());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> fa, fb;
  fft.fwd(fa, a);
  fft.fwd(fb, b);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  std::vector<double> full;
  fft.inv(full, fa);
  for (Eigen::Index t = 0; t < n; ++t) y[t] = full[t];
  return y;
}

Waveform ConvolveRir(const Waveform& w, const RoomImpulseResponse& rir) {
  w.Validate();
  rir.Validate();
  if (w.sample_rate_hz != rir.sample_rate_hz) throw Error("rir: sample-rate mismatch");
  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples = Convolve(w.samples, rir.taps);
  const double in_peak = w.samples.cwiseAbs().maxCoeff();
  const double out_peak = out.samples.cwiseAbs().maxCoeff();
  if (out_peak > 0) out.samples *= in_peak / out_peak;
  return out;
}

double MeanPower(const Eigen::VectorXd& x) {
  return x.size() == 0 ? 0.0 : x.squaredNorm() / static_cast<double>(x.size());
}

NoiseMix MixNoiseDetailed(const Waveform& w, const Waveform& noise, double snr_db,
                          std::uint64_t seed) {
  w.Validate();
  noise.Validate();
  const Eigen::Index n = w.size();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, noise.size() - 1);
  const Eigen::Index offset = pick(rng);
  Eigen::VectorXd looped(n);
  for (Eigen::Index t = 0; t < n; ++t) looped[t] = noise.samples[(offset + t) % noise.size()];

  const double ps = MeanPower(w.samples);
  const double pn = MeanPower(looped);
  if (ps <= 0 || pn <= 0) throw Error("degenerate power");
  NoiseMix mix;
  mix.gain = std::pow(10.0, -snr_db / 20.0) * std::sqrt(ps / pn);
  mix.signal = w.samples;
  mix.noise = mix.gain * looped;
  mix.mixed.sample_rate_hz = w.sample_rate_hz;
  mix.mixed.samples = (mix.signal + mix.noise).cwiseMax(-1.0).cwiseMin(1.0);
  return mix;
}

Waveform MixNoiseAtSnr(const Waveform& w, const Waveform& noise, double snr_db,
                       std::uint64_t seed) {
  return MixNoiseDetailed(w, noise, snr_db, seed).mixed;
}

namespace {

std::string FormatSnr(double snr) {
  std::ostringstream ss;
  ss << snr;
  return ss.str();
}

struct CopyChoice {
  std::size_t rir = 0;
  std::size_t noise = 0;
  double snr_db = 0;
  std::uint64_t mix_seed = 0;
};

CopyChoice ChooseCopy(const AugmentPlan& plan, const std::string& utt, int copy) {
  std::mt19937_64 rng(DeriveSeed(plan.seed, utt + "#" + std::to_string(copy)));
  CopyChoice c;
  c.rir = std::uniform_int_distribution<std::size_t>(0, plan.rirs.size() - 1)(rng);
  c.noise = std::uniform_int_distribution<std::size_t>(0, plan.noises.size() - 1)(rng);
  c.snr_db = plan.snr_grid_db[std::uniform_int_distribution<std::size_t>(
      0, plan.snr_grid_db.size() - 1)(rng)];
  c.mix_seed = rng();
  return c;
}

std::string CopyId(const std::string& utt, int copy) {
  return utt + "-aug" + std::to_string(copy);
}

}  // namespace

AugmentedCorpus BuildMulticonditionCorpus(const Manifest& manifest,
                                          const std::vector<Waveform>& audio,
                                          const AugmentPlan& plan) {
  plan.Validate();
  if (manifest.size() != audio.size()) throw Error("augment: manifest/audio size mismatch");
  AugmentedCorpus out;
  if (plan.n_copies == 0) {
    out.manifest = manifest;
    out.audio = audio;
    return out;
  }
  const std::size_t n = manifest.size();
  out.manifest.resize(n * (plan.n_copies + 1));
  out.audio.resize(out.manifest.size());
  for (std::size_t i = 0; i < n; ++i) {
    out.manifest[i] = manifest[i];
    out.manifest[i].rir_label = "-";
    out.manifest[i].snr_db = "-";
    out.audio[i] = audio[i];
  }
  ParallelFor(n * plan.n_copies, [&](std::size_t job) {
    const std::size_t i = job / plan.n_copies;
    const int copy = static_cast<int>(job % plan.n_copies) + 1;
    const CopyChoice c = ChooseCopy(plan, manifest[i].utterance, copy);
    const Waveform reverb = ConvolveRir(audio[i], plan.rirs[c.rir]);
    const std::size_t slot = n * copy + i;
    out.audio[slot] =
        QuantizePcm16(MixNoiseAtSnr(reverb, plan.noises[c.noise].wave, c.snr_db, c.mix_seed));
    ManifestEntry e = manifest[i];
    e.utterance = CopyId(manifest[i].utterance, copy);
    std::filesystem::path p(manifest[i].audio_path);
    e.audio_path = (p.parent_path() / (e.utterance + ".wav")).generic_string();
    e.rir_label = plan.rirs[c.rir].label;
    e.snr_db = FormatSnr(c.snr_db);
    out.manifest[slot] = std::move(e);
  });
  return out;
}

Manifest BuildMulticonditionCorpus(const Manifest& manifest, const std::string& in_root,
                                   const std::string& out_root, const AugmentPlan& plan) {
  std::vector<Waveform> audio;
  audio.reserve(manifest.size());
  for (const auto& e : manifest)
    audio.push_back(ReadWav((std::filesystem::path(in_root) / e.audio_path).string()));
  AugmentedCorpus aug = BuildMulticonditionCorpus(manifest, audio, plan);
  for (std::size_t i = 0; i < aug.manifest.size(); ++i)
    WriteWav((std::filesystem::path(out_root) / aug.manifest[i].audio_path).string(),
             aug.audio[i]);
  WriteManifest((std::filesystem::path(out_root) / "manifest.tsv").string(), aug.manifest);
  return aug.manifest;
}

}  // namespace xdasr
