// include/xdasr/corpus.h
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

// Synthetic multi-domain corpora: a formant-synthesis phone inventory,
// per-domain channel models (telephone band, broadcast reverb + babble,
// clean read speech), synthetic room impulse responses, and PCM16 WAV I/O.

#ifndef XDASR_CORPUS_H_
#define XDASR_CORPUS_H_

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "xdasr/augment.h"
#include "xdasr/dsp.h"
#include "xdasr/manifest.h"

namespace xdasr {

struct PhoneTemplate {
  std::string symbol;
  std::array<double, 3> formants_hz;
  std::array<double, 3> bandwidths_hz;
  bool voiced = true;
  double gain = 1.0;
};

/// Label ids: 0 is the CTC blank, 1..P the phones, then the non-speech
/// markers ("sil", "nsn").
class PhoneInventory {
 public:
  PhoneInventory() = default;
  PhoneInventory(std::string name, std::vector<PhoneTemplate> phones);

  /// 20 phones standing in for the low-resource target language.
  static PhoneInventory Target();
  /// The source-language inventory: shares most templates with Target()
  /// but lacks two of its vowels and adds four of its own.
  static PhoneInventory Source();
  static PhoneInventory ByName(const std::string& name);

  const std::string& name() const { return name_; }
  const std::vector<PhoneTemplate>& phones() const { return phones_; }
  static const std::vector<std::string>& Markers();

  int NumLabels() const;
  int LabelId(const std::string& symbol) const;
  const std::string& Symbol(int id) const;
  std::vector<int> Encode(const std::vector<std::string>& symbols) const;
  std::vector<std::string> Decode(const std::vector<int>& ids) const;
  void Validate(int sample_rate_hz) const;

 private:
  std::string name_;
  std::vector<PhoneTemplate> phones_;
  std::vector<std::string> symbols_;  // indexed by label id
};

struct Range {
  double lo = 0;
  double hi = 0;
  double Draw(std::mt19937_64& rng) const;
};

enum class NoiseKind { kNone, kWhite, kPink, kBabble };

NoiseKind NoiseKindFromString(const std::string& s);
std::string ToString(NoiseKind kind);

struct DomainProfile {
  std::string name;
  Range band_lo_hz;            // 0 disables the high-pass
  Range band_hi_hz;            // 0 or >= Nyquist disables the low-pass
  Range t60_s;                 // 0 disables reverberation
  NoiseKind noise = NoiseKind::kNone;
  Range snr_db{20, 20};
  Range duration_scale{1, 1};  // multiplies every phone duration
  double gain_jitter_db = 0;
  double noise_event_prob = 0; // chance of one "nsn" event per utterance

  static DomainProfile Conversational();
  static DomainProfile Broadcast();
  static DomainProfile Scripted();
  /// Wide-condition source-language channel used for the extractor corpus.
  static DomainProfile Source();
  static DomainProfile ByName(const std::string& name);

  void Validate(int sample_rate_hz) const;
};

struct SpeakerProfile {
  std::string id;
  double f0_hz = 120;
  double formant_scale = 1.0;
  std::uint64_t seed = 0;
};

struct CorpusConfig {
  std::string name = "corpus";
  std::string inventory = "target";
  DomainProfile domain = DomainProfile::Scripted();
  int sample_rate_hz = 8000;
  int n_speakers = 12;
  int n_utts_per_speaker = 30;
  int min_phones = 8;
  int max_phones = 30;
  Range phone_ms{60, 180};
  std::uint64_t seed = 1;
};

struct Corpus {
  std::string name;
  Manifest manifest;
  std::vector<Waveform> audio;
};

std::vector<SpeakerProfile> MakeSpeakers(const std::string& prefix, int n, std::uint64_t seed);

/// Dry formant synthesis of a label sequence ("sil"/"nsn" included).
Waveform SynthesizeUtterance(const std::vector<std::string>& labels,
                             const SpeakerProfile& speaker, const PhoneInventory& inventory,
                             double duration_scale, int sample_rate_hz, std::uint64_t seed,
                             const Range& phone_ms = {60, 180});

/// Noise of the given kind; babble is a sum of 8 detuned formant streams.
Waveform MakeNoise(NoiseKind kind, Eigen::Index num_samples, int sample_rate_hz,
                   std::uint64_t seed, const PhoneInventory& inventory);

/// Channel model of a domain applied to dry speech.
Waveform ApplyChannel(const Waveform& dry, const DomainProfile& profile,
                      const PhoneInventory& inventory, std::uint64_t seed);

/// Biquad Butterworth band-limiting (each edge applied as two cascaded
/// second-order sections); an edge of 0 is skipped.
Eigen::VectorXd BandLimit(const Eigen::VectorXd& x, int sample_rate_hz, double lo_hz,
                          double hi_hz);

/// Audio is quantized to the 16-bit PCM grid, so WriteCorpus/LoadCorpus is exact.
Corpus GenerateCorpus(const CorpusConfig& cfg);

void WriteCorpus(const Corpus& corpus, const std::string& dir);
Corpus LoadCorpus(const std::string& dir);

/// Unit direct path followed by an exponentially decaying noise tail that
/// falls 60 dB over reverb_time_s.
RoomImpulseResponse SynthRir(double reverb_time_s, int sample_rate_hz, std::uint64_t seed);

/// T60 from Schroeder backward integration of taps, fitted between -5 dB and
/// -25 dB and extrapolated to -60 dB.
double MeasureT60(const Eigen::VectorXd& taps, int sample_rate_hz);

/// Centroid in Hz of the long-term average power spectrum.
double SpectralCentroid(const Waveform& w);

Waveform ReadWav(const std::string& path);
Waveform ParseWav(const std::string& bytes);
std::string SerializeWav(const Waveform& w);
void WriteWav(const std::string& path, const Waveform& w);

/// Pools used by the multi-condition augmentation of a corpus.
std::vector<RoomImpulseResponse> MakeRirPool(int n, Range t60_s, int sample_rate_hz,
                                             std::uint64_t seed);
std::vector<NoiseSource> MakeNoisePool(int n_per_kind, double seconds, int sample_rate_hz,
                                       std::uint64_t seed, const PhoneInventory& inventory);

}  // namespace xdasr

#endif  // XDASR_CORPUS_H_
