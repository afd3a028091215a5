// include/xdasr/dsp.h
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

// Signal-to-feature front-end: framing, power spectra, log-mel filterbanks,
// an autocorrelation pitch tracker, regression deltas, per-speaker CMVN,
// frame stacking and strided copies. Everything here is a pure function of
// its inputs.

#ifndef XDASR_DSP_H_
#define XDASR_DSP_H_

#include <string>
#include <vector>

#include "xdasr/common.h"

namespace xdasr {

struct Waveform {
  Eigen::VectorXd samples;
  int sample_rate_hz = 8000;

  Eigen::Index size() const { return samples.size(); }
  /// Throws unless non-empty, finite and with a positive rate.
  void Validate() const;
};

struct FeatureMeta {
  std::string utterance;
  std::string speaker;
  std::string domain;
  std::string kind;
};

struct FeatureMatrix {
  SeqMatrixd data;  // frames x dims
  double frame_shift_ms = 10.0;
  FeatureMeta meta;

  Eigen::Index Frames() const { return data.rows(); }
  Eigen::Index Dims() const { return data.cols(); }
};

enum class WindowKind { kHamming, kHanning, kRectangular };

struct FrontendConfig {
  double frame_length_ms = 25.0;
  double frame_shift_ms = 10.0;
  int n_mels = 40;
  double pre_emphasis = 0.97;
  WindowKind window = WindowKind::kHamming;
  int n_fft = 256;
  double low_freq_hz = 20.0;
  double pitch_min_hz = 60.0;
  double pitch_max_hz = 400.0;
  double voicing_threshold = 0.3;
  double energy_floor = 1e-10;

  int FrameLength(int sample_rate_hz) const;
  int FrameShift(int sample_rate_hz) const;
  void Validate(int sample_rate_hz) const;
  /// Stable digest of every field, used to tie extractors to their front-end.
  std::string Digest() const;
};

inline double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

/// Rounds samples to the 16-bit PCM grid (k / 32768, clamped to [-1, 32767/32768]),
/// so that a WAV round trip is exact.
Waveform QuantizePcm16(Waveform w);

/// out[0] = w[0], out[t] = w[t] - alpha * w[t-1].
Waveform PreEmphasize(const Waveform& w, double alpha);

/// Number of whole frames that fit; zero when the input is shorter than one.
Eigen::Index NumFrames(Eigen::Index num_samples, int frame_length, int frame_shift);

/// Frames x n_fft matrix of windowed, zero-padded frames.
SeqMatrixd FrameAndWindow(const Waveform& w, const FrontendConfig& cfg);

/// |DFT|^2 for bins 0..N/2 of a real frame whose length is a power of two.
Eigen::VectorXd PowerSpectrum(const Eigen::Ref<const Eigen::VectorXd>& frame);

/// Triangular mel filters, n_mels x (n_fft/2 + 1).
Eigen::MatrixXd MelFilterbank(const FrontendConfig& cfg, int sample_rate_hz);

/// Natural log of mel energies of one power spectrum, floored at
/// cfg.energy_floor.
Eigen::VectorXd LogMel(const Eigen::Ref<const Eigen::VectorXd>& spectrum,
                       const FrontendConfig& cfg, int sample_rate_hz);

/// Frames x n_mels log filterbank energies (pre-emphasis included).
SeqMatrixd ComputeLogMel(const Waveform& w, const FrontendConfig& cfg);

/// Frames x 3: log F0, normalized autocorrelation peak, delta log F0.
SeqMatrixd PitchFeatures(const Waveform& w, const FrontendConfig& cfg);

/// Regression deltas over +-window frames with replicated edges.
SeqMatrixd Deltas(const SeqMatrixd& x, int window = 2);

/// [x, delta(x), delta(delta(x))] for order 2; dims grow by (order + 1).
FeatureMatrix AddDeltas(const FeatureMatrix& f, int order = 2);

/// Per-speaker pooled mean/variance normalization. Matrices are grouped by
/// meta.speaker; order and shapes are preserved.
std::vector<FeatureMatrix> CmvnPerSpeaker(const std::vector<FeatureMatrix>& features);

/// Mean/variance normalization over a single matrix.
FeatureMatrix CmvnUtterance(const FeatureMatrix& f);

/// Concatenates frames t-k..t+k (k = (window-1)/2) with replicated edges.
FeatureMatrix StackWindow(const FeatureMatrix& f, int window);

/// Copy j holds frames j, j+stride, j+2*stride, ...
std::vector<FeatureMatrix> SubsampleCopies(const FeatureMatrix& f, int stride);

/// [40 log-mel, 3 pitch] with first and second deltas (129 dims by
/// default), before CMVN.
FeatureMatrix ComputeBaselineFeatures(const Waveform& w, const FrontendConfig& cfg,
                                      const FeatureMeta& meta = {});

}  // namespace xdasr

#endif  // XDASR_DSP_H_
