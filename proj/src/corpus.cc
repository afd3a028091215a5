// src/corpus.cc
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

#include "xdasr/corpus.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <numbers>

namespace xdasr {

namespace {

constexpr double kPi = std::numbers::pi;

PhoneTemplate Voiced(std::string s, double f1, double f2, double f3, double gain = 1.0,
                     double b1 = 80, double b2 = 110, double b3 = 160) {
  return {std::move(s), {f1, f2, f3}, {b1, b2, b3}, true, gain};
}

PhoneTemplate Unvoiced(std::string s, double f1, double f2, double f3, double gain,
                       double b1, double b2, double b3) {
  return {std::move(s), {f1, f2, f3}, {b1, b2, b3}, false, gain};
}

// Templates shared by both languages.
std::vector<PhoneTemplate> SharedTemplates() {
  return {
      Voiced("i", 280, 2250, 2900),
      Voiced("e", 450, 2050, 2650),
      Voiced("a", 750, 1300, 2500),
      Voiced("o", 470, 820, 2400),
      Voiced("u", 320, 820, 2250),
      Voiced("ɯ", 350, 1350, 2450),
      Voiced("ɛ", 590, 1800, 2550),
      Voiced("m", 260, 1050, 2250, 0.5, 60, 200, 250),
      Voiced("n", 260, 1650, 2600, 0.5, 60, 200, 250),
      Voiced("l", 360, 1150, 2700, 0.7),
      Voiced("r", 450, 1350, 1750, 0.7),
      Voiced("j", 270, 2100, 3000, 0.6),
      Voiced("v", 300, 1200, 2300, 0.4, 100, 200, 300),
      Unvoiced("s", 2700, 3400, 3750, 0.5, 300, 400, 500),
      Unvoiced("ʃ", 1900, 2600, 3300, 0.6, 250, 350, 450),
      Unvoiced("f", 1200, 2400, 3600, 0.3, 800, 1000, 1000),
      Unvoiced("h", 600, 1500, 2500, 0.3, 400, 500, 600),
      Unvoiced("x", 1300, 2000, 3000, 0.45, 300, 400, 500),
  };
}

struct Resonator {
  double a = 0, b = 0, c = 0, y1 = 0, y2 = 0;
  Resonator(double freq, double bw, int sr) {
    const double t = 1.0 / sr;
    c = -std::exp(-2 * kPi * bw * t);
    b = 2 * std::exp(-kPi * bw * t) * std::cos(2 * kPi * freq * t);
    a = 1 - b - c;
  }
  double Step(double x) {
    const double y = a * x + b * y1 + c * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

// RBJ cookbook biquad, direct form I.
struct Biquad {
  double b0, b1, b2, a1, a2;
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  static Biquad Make(bool highpass, double freq, int sr) {
    const double w0 = 2 * kPi * freq / sr;
    const double alpha = std::sin(w0) / (2 * std::sqrt(0.5));
    const double cw = std::cos(w0);
    const double a0 = 1 + alpha;
    Biquad q;
    if (highpass) {
      q.b0 = (1 + cw) / 2 / a0;
      q.b1 = -(1 + cw) / a0;
      q.b2 = (1 + cw) / 2 / a0;
    } else {
      q.b0 = (1 - cw) / 2 / a0;
      q.b1 = (1 - cw) / a0;
      q.b2 = (1 - cw) / 2 / a0;
    }
    q.a1 = -2 * cw / a0;
    q.a2 = (1 - alpha) / a0;
    return q;
  }
  double Step(double x) {
    const double y = b0 * x + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = x;
    y2 = y1;
    y1 = y;
    return y;
  }
};

double Rms(const Eigen::VectorXd& x) {
  return x.size() ? std::sqrt(x.squaredNorm() / x.size()) : 0.0;
}

void NormalizeRms(Eigen::VectorXd& x, double target) {
  const double r = Rms(x);
  if (r > 0) x *= target / r;
}

Eigen::VectorXd WhiteNoise(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = g(rng);
  return x;
}

Eigen::VectorXd RenderPhone(const PhoneTemplate& ph, const SpeakerProfile& spk, Eigen::Index n,
                            int sr, double f0, std::mt19937_64& rng) {
  const double ceiling = 0.45 * sr;
  Eigen::VectorXd out(n);
  if (ph.voiced) {
    std::array<Resonator, 3> res = {
        Resonator(std::min(ceiling, ph.formants_hz[0] * spk.formant_scale), ph.bandwidths_hz[0], sr),
        Resonator(std::min(ceiling, ph.formants_hz[1] * spk.formant_scale), ph.bandwidths_hz[1], sr),
        Resonator(std::min(ceiling, ph.formants_hz[2] * spk.formant_scale), ph.bandwidths_hz[2], sr)};
    std::normal_distribution<double> g(0.0, 1.0);
    double phase = 1.0, tilt = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double progress = static_cast<double>(i) / n;
      phase += f0 * (1.0 + 0.04 * std::sin(2 * kPi * progress)) / sr;
      double e = 0;
      if (phase >= 1.0) {
        phase -= 1.0;
        e = 1.0;
      }
      tilt = 0.7 * tilt + e;
      double y = tilt + 0.02 * g(rng);
      for (auto& r : res) y = r.Step(y);
      out[i] = y;
    }
  } else {
    const Eigen::VectorXd noise = WhiteNoise(n, rng);
    std::array<Resonator, 3> res = {
        Resonator(std::min(ceiling, ph.formants_hz[0] * spk.formant_scale), ph.bandwidths_hz[0], sr),
        Resonator(std::min(ceiling, ph.formants_hz[1] * spk.formant_scale), ph.bandwidths_hz[1], sr),
        Resonator(std::min(ceiling, ph.formants_hz[2] * spk.formant_scale), ph.bandwidths_hz[2], sr)};
    constexpr std::array<double, 3> weights = {1.0, 0.7, 0.5};
    for (Eigen::Index i = 0; i < n; ++i) {
      double y = 0;
      for (int k = 0; k < 3; ++k) y += weights[k] * res[k].Step(noise[i]);
      out[i] = y;
    }
  }
  NormalizeRms(out, 0.1 * ph.gain);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// PhoneInventory

PhoneInventory::PhoneInventory(std::string name, std::vector<PhoneTemplate> phones)
    : name_(std::move(name)), phones_(std::move(phones)) {
  symbols_.push_back("<blk>");
  for (const auto& p : phones_) symbols_.push_back(p.symbol);
  for (const auto& m : Markers()) symbols_.push_back(m);
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    for (std::size_t j = i + 1; j < symbols_.size(); ++j)
      if (symbols_[i] == symbols_[j]) throw Error("inventory: duplicate symbol " + symbols_[i]);
}

PhoneInventory PhoneInventory::Target() {
  auto phones = SharedTemplates();
  phones.insert(phones.begin() + 5, Voiced("y", 290, 1750, 2200));
  phones.insert(phones.begin() + 6, Voiced("ø", 440, 1550, 2300));
  return PhoneInventory("target", std::move(phones));
}

PhoneInventory PhoneInventory::Source() {
  auto shared = SharedTemplates();
  std::vector<PhoneTemplate> phones = {
      Voiced("æ", 690, 1650, 2450),
      Voiced("ʊ", 420, 1050, 2300),
      Voiced("w", 300, 700, 2200, 0.6),
      Unvoiced("θ", 1600, 2900, 3700, 0.3, 700, 900, 900),
  };
  // A different label order from the target language.
  std::reverse(shared.begin(), shared.end());
  phones.insert(phones.end(), shared.begin(), shared.end());
  return PhoneInventory("source", std::move(phones));
}

PhoneInventory PhoneInventory::ByName(const std::string& name) {
  if (name == "target") return Target();
  if (name == "source") return Source();
  throw Error("unknown phone inventory: " + name);
}

const std::vector<std::string>& PhoneInventory::Markers() {
  static const std::vector<std::string> markers = {"sil", "nsn"};
  return markers;
}

int PhoneInventory::NumLabels() const { return static_cast<int>(symbols_.size()); }

int PhoneInventory::LabelId(const std::string& symbol) const {
  for (std::size_t i = 1; i < symbols_.size(); ++i)
    if (symbols_[i] == symbol) return static_cast<int>(i);
  throw Error("inventory " + name_ + ": unknown symbol '" + symbol + "'");
}

const std::string& PhoneInventory::Symbol(int id) const {
  if (id < 0 || id >= NumLabels()) throw Error("inventory: label id out of range");
  return symbols_[id];
}

std::vector<int> PhoneInventory::Encode(const std::vector<std::string>& symbols) const {
  std::vector<int> ids;
  ids.reserve(symbols.size());
  for (const auto& s : symbols) ids.push_back(LabelId(s));
  return ids;
}

std::vector<std::string> PhoneInventory::Decode(const std::vector<int>& ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(Symbol(id));
  return out;
}

void PhoneInventory::Validate(int sample_rate_hz) const {
  for (const auto& p : phones_)
    for (double f : p.formants_hz)
      if (f <= 0 || f >= 0.5 * sample_rate_hz)
        throw Error("inventory: formant of " + p.symbol + " outside (0, Nyquist)");
}

// ---------------------------------------------------------------------------
// Profiles

double Range::Draw(std::mt19937_64& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return lo + (hi - lo) * u;
}

NoiseKind NoiseKindFromString(const std::string& s) {
  if (s == "none") return NoiseKind::kNone;
  if (s == "white") return NoiseKind::kWhite;
  if (s == "pink") return NoiseKind::kPink;
  if (s == "babble") return NoiseKind::kBabble;
  throw Error("unknown noise kind: " + s);
}

std::string ToString(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone: return "none";
    case NoiseKind::kWhite: return "white";
    case NoiseKind::kPink: return "pink";
    case NoiseKind::kBabble: return "babble";
  }
  return "none";
}

DomainProfile DomainProfile::Conversational() {
  DomainProfile p;
  p.name = "conversational";
  p.band_lo_hz = {300, 300};
  p.band_hi_hz = {3400, 3400};
  p.noise = NoiseKind::kWhite;
  p.snr_db = {25, 35};
  p.duration_scale = {0.8, 0.8};
  p.gain_jitter_db = 6;
  p.noise_event_prob = 0.3;
  return p;
}

DomainProfile DomainProfile::Broadcast() {
  DomainProfile p;
  p.name = "broadcast";
  p.t60_s = {0.2, 0.5};
  p.noise = NoiseKind::kBabble;
  p.snr_db = {10, 20};
  return p;
}

DomainProfile DomainProfile::Scripted() {
  DomainProfile p;
  p.name = "scripted";
  p.duration_scale = {1.2, 1.2};
  return p;
}

DomainProfile DomainProfile::Source() {
  DomainProfile p;
  p.name = "source";
  p.band_lo_hz = {50, 400};
  p.band_hi_hz = {3000, 4000};
  p.duration_scale = {0.8, 1.2};
  p.gain_jitter_db = 3;
  return p;
}

DomainProfile DomainProfile::ByName(const std::string& name) {
  if (name == "conversational") return Conversational();
  if (name == "broadcast") return Broadcast();
  if (name == "scripted") return Scripted();
  if (name == "source") return Source();
  throw Error("unknown domain profile: " + name);
}

void DomainProfile::Validate(int sample_rate_hz) const {
  const double nyquist = 0.5 * sample_rate_hz;
  if (band_lo_hz.lo < 0 || band_lo_hz.hi >= nyquist || band_hi_hz.lo < 0)
    throw Error("domain " + name + ": band edges outside (0, Nyquist)");
  if (t60_s.lo < 0 || t60_s.hi < t60_s.lo) throw Error("domain " + name + ": bad reverb time");
  if (duration_scale.lo <= 0) throw Error("domain " + name + ": bad duration scale");
}

// ---------------------------------------------------------------------------
// Synthesis

std::vector<SpeakerProfile> MakeSpeakers(const std::string& prefix, int n, std::uint64_t seed) {
  std::vector<SpeakerProfile> out;
  for (int i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "s%02d", i);
    SpeakerProfile s;
    s.id = prefix + "-" + id;
    s.seed = DeriveSeed(seed, s.id);
    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) < 0.5) {
      s.f0_hz = 85 + 70 * u(rng);
      s.formant_scale = 0.85 + 0.15 * u(rng);
    } else {
      s.f0_hz = 165 + 95 * u(rng);
      s.formant_scale = 1.0 + 0.15 * u(rng);
    }
    out.push_back(s);
  }
  return out;
}

Waveform SynthesizeUtterance(const std::vector<std::string>& labels,
                             const SpeakerProfile& speaker, const PhoneInventory& inventory,
                             double duration_scale, int sample_rate_hz, std::uint64_t seed,
                             const Range& phone_ms) {
  if (labels.empty()) throw Error("synthesis: empty label sequence");
  std::mt19937_64 rng(seed);
  const int sr = sample_rate_hz;
  const Eigen::Index xfade = sr * 8 / 1000;
  std::vector<Eigen::VectorXd> segments;
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string& lab = labels[i];
    double ms;
    Eigen::VectorXd seg;
    if (lab == "sil") {
      ms = Range{100, 250}.Draw(rng);
      seg = 1e-4 * WhiteNoise(static_cast<Eigen::Index>(ms * sr / 1000) + xfade, rng);
    } else if (lab == "nsn") {
      ms = Range{120, 250}.Draw(rng);
      const Eigen::Index n = static_cast<Eigen::Index>(ms * sr / 1000) + xfade;
      Eigen::VectorXd noise = WhiteNoise(n, rng);
      Resonator r(500, 800, sr);
      seg.resize(n);
      for (Eigen::Index k = 0; k < n; ++k) seg[k] = r.Step(noise[k]);
      NormalizeRms(seg, 0.03);
    } else {
      const PhoneTemplate* tmpl = nullptr;
      for (const auto& p : inventory.phones())
        if (p.symbol == lab) tmpl = &p;
      if (!tmpl) throw Error("synthesis: unknown phone '" + lab + "'");
      ms = phone_ms.Draw(rng) * duration_scale;
      const double progress = static_cast<double>(i) / labels.size();
      const double f0 = speaker.f0_hz * (1.08 - 0.16 * progress) *
                        (1.0 + 0.03 * std::clamp(g(rng), -2.0, 2.0));
      seg = RenderPhone(*tmpl, speaker, static_cast<Eigen::Index>(ms * sr / 1000) + xfade, sr,
                        f0, rng);
    }
    for (Eigen::Index k = 0; k < xfade && k < seg.size(); ++k) {
      const double ramp = 0.5 - 0.5 * std::cos(kPi * (k + 0.5) / xfade);
      seg[k] *= ramp;
      seg[seg.size() - 1 - k] *= ramp;
    }
    segments.push_back(std::move(seg));
  }
  Eigen::Index total = xfade;
  for (const auto& s : segments) total += s.size() - xfade;
  Waveform w;
  w.sample_rate_hz = sr;
  w.samples = Eigen::VectorXd::Zero(total);
  Eigen::Index pos = 0;
  for (const auto& s : segments) {
    w.samples.segment(pos, s.size()) += s;
    pos += s.size() - xfade;
  }
  const double peak = w.samples.cwiseAbs().maxCoeff();
  if (peak > 0) w.samples *= 0.5 / peak;
  return w;
}

Waveform MakeNoise(NoiseKind kind, Eigen::Index num_samples, int sample_rate_hz,
                   std::uint64_t seed, const PhoneInventory& inventory) {
  std::mt19937_64 rng(seed);
  Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  switch (kind) {
    case NoiseKind::kNone:
      w.samples = Eigen::VectorXd::Zero(num_samples);
      return w;
    case NoiseKind::kWhite:
      w.samples = WhiteNoise(num_samples, rng);
      break;
    case NoiseKind::kPink: {
      // Paul Kellet's economy pink filter.
      const Eigen::VectorXd white = WhiteNoise(num_samples, rng);
      double b0 = 0, b1 = 0, b2 = 0;
      w.samples.resize(num_samples);
      for (Eigen::Index i = 0; i < num_samples; ++i) {
        b0 = 0.99765 * b0 + white[i] * 0.0990460;
        b1 = 0.96300 * b1 + white[i] * 0.2965164;
        b2 = 0.57000 * b2 + white[i] * 1.0526913;
        w.samples[i] = b0 + b1 + b2 + white[i] * 0.1848;
      }
      break;
    }
    case NoiseKind::kBabble: {
      w.samples = Eigen::VectorXd::Zero(num_samples);
      const auto& phones = inventory.phones();
      std::uniform_int_distribution<std::size_t> pick(0, phones.size() - 1);
      for (int stream = 0; stream < 8; ++stream) {
        SpeakerProfile spk;
        spk.f0_hz = Range{80, 300}.Draw(rng);
        spk.formant_scale = Range{0.85, 1.15}.Draw(rng);
        std::vector<std::string> labels;
        const double seconds = static_cast<double>(num_samples) / sample_rate_hz;
        const int n_phones = static_cast<int>(seconds / 0.06) + 2;
        for (int k = 0; k < n_phones; ++k) labels.push_back(phones[pick(rng)].symbol);
        Waveform s = SynthesizeUtterance(labels, spk, inventory, 1.0, sample_rate_hz, rng());
        const Eigen::Index n = std::min(num_samples, s.size());
        w.samples.head(n) += s.samples.head(n);
      }
      break;
    }
  }
  const double peak = w.samples.cwiseAbs().maxCoeff();
  if (peak > 0) w.samples *= 0.5 / peak;
  return w;
}

Eigen::VectorXd BandLimit(const Eigen::VectorXd& x, int sample_rate_hz, double lo_hz,
                          double hi_hz) {
  Eigen::VectorXd y = x;
  auto run = [&](bool highpass, double f) {
    for (int pass = 0; pass < 2; ++pass) {
      Biquad q = Biquad::Make(highpass, f, sample_rate_hz);
      for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = q.Step(y[i]);
    }
  };
  if (lo_hz > 0) run(true, lo_hz);
  if (hi_hz > 0 && hi_hz < 0.5 * sample_rate_hz * 0.98) run(false, hi_hz);
  return y;
}

Waveform ApplyChannel(const Waveform& dry, const DomainProfile& profile,
                      const PhoneInventory& inventory, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // Every draw happens unconditionally so the stream layout is fixed.
  const double t60 = profile.t60_s.Draw(rng);
  const std::uint64_t rir_seed = rng();
  const std::uint64_t noise_seed = rng();
  const std::uint64_t mix_seed = rng();
  const double snr = profile.snr_db.Draw(rng);
  const double lo = profile.band_lo_hz.Draw(rng);
  const double hi = profile.band_hi_hz.Draw(rng);
  const double gain_db = Range{-profile.gain_jitter_db, profile.gain_jitter_db}.Draw(rng);

  Waveform w = dry;
  if (t60 > 0) w = ConvolveRir(w, SynthRir(t60, w.sample_rate_hz, rir_seed));
  if (profile.noise != NoiseKind::kNone) {
    const Waveform noise =
        MakeNoise(profile.noise, w.size(), w.sample_rate_hz, noise_seed, inventory);
    w = MixNoiseAtSnr(w, noise, snr, mix_seed);
  }
  w.samples = BandLimit(w.samples, w.sample_rate_hz, lo, hi);
  w.samples *= std::pow(10.0, gain_db / 20.0);
  const double peak = w.samples.cwiseAbs().maxCoeff();
  if (peak > 0.99) w.samples *= 0.99 / peak;
  return w;
}

Corpus GenerateCorpus(const CorpusConfig& cfg) {
  if (cfg.n_speakers <= 0 || cfg.n_utts_per_speaker <= 0 || cfg.min_phones <= 0 ||
      cfg.max_phones < cfg.min_phones)
    throw Error("corpus: parameters must be positive");
  const PhoneInventory inventory = PhoneInventory::ByName(cfg.inventory);
  inventory.Validate(cfg.sample_rate_hz);
  cfg.domain.Validate(cfg.sample_rate_hz);
  const auto speakers = MakeSpeakers(cfg.name, cfg.n_speakers, DeriveSeed(cfg.seed, "speakers"));

  Corpus corpus;
  corpus.name = cfg.name;
  const std::size_t total = static_cast<std::size_t>(cfg.n_speakers) * cfg.n_utts_per_speaker;
  corpus.manifest.resize(total);
  corpus.audio.resize(total);
  ParallelFor(total, [&](std::size_t idx) {
    const auto& spk = speakers[idx / cfg.n_utts_per_speaker];
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "-u%03d", static_cast<int>(idx % cfg.n_utts_per_speaker));
    ManifestEntry e;
    e.utterance = spk.id + suffix;
    e.speaker = spk.id;
    e.domain = cfg.domain.name;
    e.audio_path = "wav/" + e.utterance + ".wav";

    std::mt19937_64 rng(DeriveSeed(cfg.seed, e.utterance));
    const int n_phones =
        std::uniform_int_distribution<int>(cfg.min_phones, cfg.max_phones)(rng);
    std::uniform_int_distribution<std::size_t> pick(0, inventory.phones().size() - 1);
    e.labels.push_back("sil");
    for (int k = 0; k < n_phones; ++k) e.labels.push_back(inventory.phones()[pick(rng)].symbol);
    const bool event = std::uniform_real_distribution<double>(0, 1)(rng) < cfg.domain.noise_event_prob;
    const std::size_t at = std::uniform_int_distribution<std::size_t>(
        2, std::max<std::size_t>(2, e.labels.size() - 1))(rng);
    if (event) e.labels.insert(e.labels.begin() + at, "nsn");
    e.labels.push_back("sil");

    const double scale = cfg.domain.duration_scale.Draw(rng);
    const std::uint64_t synth_seed = rng();
    const std::uint64_t channel_seed = rng();
    const Waveform dry = SynthesizeUtterance(e.labels, spk, inventory, scale, cfg.sample_rate_hz,
                                             synth_seed, cfg.phone_ms);
    corpus.audio[idx] = QuantizePcm16(ApplyChannel(dry, cfg.domain, inventory, channel_seed));
    corpus.manifest[idx] = std::move(e);
  });
  return corpus;
}

void WriteCorpus(const Corpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  for (std::size_t i = 0; i < corpus.manifest.size(); ++i)
    WriteWav((fs::path(dir) / corpus.manifest[i].audio_path).string(), corpus.audio[i]);
  WriteManifest((fs::path(dir) / "manifest.tsv").string(), corpus.manifest);
}

Corpus LoadCorpus(const std::string& dir) {
  namespace fs = std::filesystem;
  Corpus c;
  c.name = fs::path(dir).filename().string();
  c.manifest = ReadManifest((fs::path(dir) / "manifest.tsv").string());
  for (const auto& e : c.manifest) c.audio.push_back(ReadWav((fs::path(dir) / e.audio_path).string()));
  return c;
}

// ---------------------------------------------------------------------------
// Room impulse responses

RoomImpulseResponse SynthRir(double reverb_time_s, int sample_rate_hz, std::uint64_t seed) {
  if (reverb_time_s < 0) throw Error("rir: negative reverb time");
  RoomImpulseResponse rir;
  rir.sample_rate_hz = sample_rate_hz;
  char label[48];
  std::snprintf(label, sizeof(label), "synth-t60=%.3f", reverb_time_s);
  rir.label = label;
  const Eigen::Index len =
      std::max<Eigen::Index>(1, std::llround(reverb_time_s * sample_rate_hz));
  rir.taps = Eigen::VectorXd::Zero(len);
  rir.taps[0] = 1.0;
  if (len == 1) return rir;
  // Tail energy about half the direct path (DRR near +3 dB).
  const double decay_samples = reverb_time_s * sample_rate_hz;
  const double sigma = std::sqrt(0.5 * 6.0 * std::log(10.0) / decay_samples);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (Eigen::Index n = 1; n < len; ++n)
    rir.taps[n] = sigma * g(rng) * std::pow(10.0, -3.0 * n / decay_samples);
  return rir;
}

double MeasureT60(const Eigen::VectorXd& taps, int sample_rate_hz) {
  const Eigen::Index n = taps.size();
  Eigen::VectorXd edc(n);
  double acc = 0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    acc += taps[i] * taps[i];
    edc[i] = acc;
  }
  if (acc <= 0) return 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double db = 10 * std::log10(edc[i] / edc[0]);
    if (db > -5) continue;
    if (db < -25) break;
    const double t = static_cast<double>(i) / sample_rate_hz;
    sx += t;
    sy += db;
    sxx += t * t;
    sxy += t * db;
    ++count;
  }
  if (count < 2) return 0;
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return -60.0 / slope;
}

double SpectralCentroid(const Waveform& w) {
  FrontendConfig cfg;
  const SeqMatrixd frames = FrameAndWindow(w, cfg);
  Eigen::VectorXd ltas = Eigen::VectorXd::Zero(cfg.n_fft / 2 + 1);
  for (Eigen::Index t = 0; t < frames.rows(); ++t)
    ltas += PowerSpectrum(frames.row(t).transpose());
  const double e = ltas.sum();
  if (e <= 0) return 0.0;
  const Eigen::VectorXd hz = Eigen::VectorXd::LinSpaced(ltas.size(), 0, 0.5 * w.sample_rate_hz);
  return ltas.dot(hz) / e;
}

std::vector<RoomImpulseResponse> MakeRirPool(int n, Range t60_s, int sample_rate_hz,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<RoomImpulseResponse> pool;
  for (int i = 0; i < n; ++i) {
    const double t60 = t60_s.Draw(rng);
    RoomImpulseResponse r = SynthRir(t60, sample_rate_hz, rng());
    char label[64];
    std::snprintf(label, sizeof(label), "rir%02d-t60=%.2f", i, t60);
    r.label = label;
    pool.push_back(std::move(r));
  }
  return pool;
}

std::vector<NoiseSource> MakeNoisePool(int n_per_kind, double seconds, int sample_rate_hz,
                                       std::uint64_t seed, const PhoneInventory& inventory) {
  std::vector<NoiseSource> pool;
  const Eigen::Index n = static_cast<Eigen::Index>(seconds * sample_rate_hz);
  for (NoiseKind kind : {NoiseKind::kWhite, NoiseKind::kPink, NoiseKind::kBabble}) {
    for (int i = 0; i < n_per_kind; ++i) {
      const std::string label = ToString(kind) + std::to_string(i);
      pool.push_back({label, MakeNoise(kind, n, sample_rate_hz, DeriveSeed(seed, label), inventory)});
    }
  }
  return pool;
}

// ---------------------------------------------------------------------------
// WAV

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes little-endian");

namespace {

template <typename T>
void Put(std::string& out, T v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T Get(const std::string& bytes, std::size_t pos) {
  if (pos + sizeof(T) > bytes.size()) throw Error("wav: truncated header");
  T v;
  std::memcpy(&v, bytes.data() + pos, sizeof(T));
  return v;
}

}  // namespace

std::string SerializeWav(const Waveform& w) {
  w.Validate();
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(w.size() * 2);
  std::string out;
  out += "RIFF";
  Put<std::uint32_t>(out, 36 + data_bytes);
  out += "WAVEfmt ";
  Put<std::uint32_t>(out, 16);
  Put<std::uint16_t>(out, 1);  // PCM
  Put<std::uint16_t>(out, 1);  // mono
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(w.sample_rate_hz));
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(w.sample_rate_hz) * 2);
  Put<std::uint16_t>(out, 2);
  Put<std::uint16_t>(out, 16);
  out += "data";
  Put<std::uint32_t>(out, data_bytes);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double q = std::round(std::clamp(w.samples[i], -1.0, 1.0) * 32768.0);
    Put<std::int16_t>(out, static_cast<std::int16_t>(std::clamp(q, -32768.0, 32767.0)));
  }
  return out;
}

Waveform ParseWav(const std::string& bytes) {
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0)
    throw Error("wav: not a RIFF/WAVE file");
  std::size_t pos = 12;
  bool have_fmt = false;
  Waveform w;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const std::uint32_t size = Get<std::uint32_t>(bytes, pos + 4);
    pos += 8;
    if (id == "fmt ") {
      if (size < 16) throw Error("wav: short fmt chunk");
      const auto format = Get<std::uint16_t>(bytes, pos);
      const auto channels = Get<std::uint16_t>(bytes, pos + 2);
      w.sample_rate_hz = static_cast<int>(Get<std::uint32_t>(bytes, pos + 4));
      const auto bits = Get<std::uint16_t>(bytes, pos + 14);
      if (format != 1) throw Error("wav: unsupported encoding (only PCM)");
      if (channels != 1) throw Error("wav: only mono is supported");
      if (bits != 16) throw Error("wav: only 16-bit samples are supported");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw Error("wav: data chunk before fmt chunk");
      if (pos + size > bytes.size()) throw Error("wav: truncated data chunk");
      const std::size_t n = size / 2;
      w.samples.resize(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i)
        w.samples[static_cast<Eigen::Index>(i)] = Get<std::int16_t>(bytes, pos + 2 * i) / 32768.0;
      if (n == 0) throw Error("wav: no samples");
      return w;
    }
    pos += size + (size & 1);
  }
  throw Error("wav: missing data chunk");
}

Waveform ReadWav(const std::string& path) {
  try {
    return ParseWav(ReadFileBytes(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

void WriteWav(const std::string& path, const Waveform& w) { WriteFileBytes(path, SerializeWav(w)); }

}  // namespace xdasr
