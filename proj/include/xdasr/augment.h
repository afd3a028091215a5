// include/xdasr/augment.h
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

// Multi-condition data creation: reverberation with room impulse responses
// and additive noise at a chosen SNR.

#ifndef XDASR_AUGMENT_H_
#define XDASR_AUGMENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "xdasr/dsp.h"
#include "xdasr/manifest.h"

namespace xdasr {

struct RoomImpulseResponse {
  Eigen::VectorXd taps;
  int sample_rate_hz = 8000;
  std::string label;

  /// Non-empty, finite, and with its strongest early tap in the first 10 ms.
  void Validate() const;
};

struct NoiseSource {
  std::string label;
  Waveform wave;
};

struct AugmentPlan {
  int n_copies = 3;
  std::vector<double> snr_grid_db = {0, 5, 10, 15, 20};
  std::uint64_t seed = 0;
  std::vector<RoomImpulseResponse> rirs;
  std::vector<NoiseSource> noises;

  void Validate() const;
};

/// Full linear convolution truncated to the input length. Linear in w.
Eigen::VectorXd Convolve(const Eigen::VectorXd& x, const Eigen::VectorXd& kernel);

/// Reverberates w and rescales the result to w's peak amplitude.
Waveform ConvolveRir(const Waveform& w, const RoomImpulseResponse& rir);

/// Components of a noisy mix, kept apart so the realised SNR can be measured.
struct NoiseMix {
  Waveform mixed;             // clipped to [-1, 1]
  Eigen::VectorXd signal;     // the clean input
  Eigen::VectorXd noise;      // gain * looped/cropped noise
  double gain = 0;
};

/// Mean squared amplitude.
double MeanPower(const Eigen::VectorXd& x);

NoiseMix MixNoiseDetailed(const Waveform& w, const Waveform& noise, double snr_db,
                          std::uint64_t seed);
Waveform MixNoiseAtSnr(const Waveform& w, const Waveform& noise, double snr_db,
                       std::uint64_t seed);

/// Original utterances followed by plan.n_copies reverberated + noised copies
/// of each. Copies inherit labels, speaker and domain and record their RIR
/// label and SNR. Copy audio is quantized to the 16-bit PCM grid.
struct AugmentedCorpus {
  Manifest manifest;
  std::vector<Waveform> audio;
};

AugmentedCorpus BuildMulticonditionCorpus(const Manifest& manifest,
                                          const std::vector<Waveform>& audio,
                                          const AugmentPlan& plan);

/// File-backed variant: reads audio relative to in_root and writes all
/// audio plus manifest under out_root. Stops at the first unreadable file.
Manifest BuildMulticonditionCorpus(const Manifest& manifest, const std::string& in_root,
                                   const std::string& out_root, const AugmentPlan& plan);

}  // namespace xdasr

#endif  // XDASR_AUGMENT_H_
