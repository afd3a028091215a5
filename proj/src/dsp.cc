// src/dsp.cc
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

#include "xdasr/dsp.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

namespace xdasr {

namespace {

bool IsPowerOfTwo(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

Eigen::VectorXd WindowFunction(WindowKind kind, int length) {
  Eigen::VectorXd win(length);
  const double denom = length > 1 ? length - 1 : 1;
  for (int n = 0; n < length; ++n) {
    const double phase = 2.0 * std::numbers::pi * n / denom;
    switch (kind) {
      case WindowKind::kHamming: win[n] = 0.54 - 0.46 * std::cos(phase); break;
      case WindowKind::kHanning: win[n] = 0.5 - 0.5 * std::cos(phase); break;
      case WindowKind::kRectangular: win[n] = 1.0; break;
    }
  }
  return win;
}

Eigen::Index Clamp(Eigen::Index t, Eigen::Index n) {
  return std::clamp<Eigen::Index>(t, 0, n - 1);
}

}  // namespace

void Waveform::Validate() const {
  if (sample_rate_hz <= 0) throw Error("waveform: sample rate must be positive");
  if (samples.size() == 0) throw Error("waveform: empty");
  if (!samples.allFinite()) throw Error("waveform: non-finite sample");
}

int FrontendConfig::FrameLength(int sample_rate_hz) const {
  return static_cast<int>(std::lround(frame_length_ms * sample_rate_hz / 1000.0));
}

int FrontendConfig::FrameShift(int sample_rate_hz) const {
  return static_cast<int>(std::lround(frame_shift_ms * sample_rate_hz / 1000.0));
}

void FrontendConfig::Validate(int sample_rate_hz) const {
  if (frame_length_ms < frame_shift_ms || frame_shift_ms <= 0)
    throw Error("frontend: need frame_length_ms >= frame_shift_ms > 0");
  if (n_fft < FrameLength(sample_rate_hz))
    throw Error("frontend: n_fft smaller than the frame length");
  if (!IsPowerOfTwo(n_fft)) throw Error("frontend: n_fft must be a power of two");
  if (n_mels < 1) throw Error("frontend: n_mels must be >= 1");
  if (pre_emphasis < 0 || pre_emphasis >= 1)
    throw Error("frontend: pre_emphasis must lie in [0, 1)");
}

std::string FrontendConfig::Digest() const {
  std::ostringstream ss;
  ss.precision(17);
  ss << frame_length_ms << '|' << frame_shift_ms << '|' << n_mels << '|'
     << pre_emphasis << '|' << static_cast<int>(window) << '|' << n_fft << '|'
     << low_freq_hz << '|' << pitch_min_hz << '|' << pitch_max_hz << '|'
     << voicing_threshold << '|' << energy_floor;
  return HexDigest(Fnv1a64(ss.str()));
}

Waveform QuantizePcm16(Waveform w) {
  w.samples = (w.samples.array() * 32768.0).round().cwiseMax(-32768.0).cwiseMin(32767.0) / 32768.0;
  return w;
}

Waveform PreEmphasize(const Waveform& w, double alpha) {
  if (!(alpha >= 0 && alpha < 1)) throw Error("pre-emphasis: alpha must lie in [0, 1)");
  w.Validate();
  Waveform out = w;
  for (Eigen::Index t = w.size() - 1; t > 0; --t)
    out.samples[t] = w.samples[t] - alpha * w.samples[t - 1];
  return out;
}

Eigen::Index NumFrames(Eigen::Index num_samples, int frame_length, int frame_shift) {
  if (num_samples < frame_length) return 0;
  return 1 + (num_samples - frame_length) / frame_shift;
}

SeqMatrixd FrameAndWindow(const Waveform& w, const FrontendConfig& cfg) {
  w.Validate();
  cfg.Validate(w.sample_rate_hz);
  const int len = cfg.FrameLength(w.sample_rate_hz);
  const int shift = cfg.FrameShift(w.sample_rate_hz);
  const Eigen::Index frames = NumFrames(w.size(), len, shift);
  if (frames == 0) throw Error("utterance too short");
  const Eigen::VectorXd win = WindowFunction(cfg.window, len);
  SeqMatrixd out = SeqMatrixd::Zero(frames, cfg.n_fft);
  for (Eigen::Index t = 0; t < frames; ++t) {
    out.row(t).head(len) =
        (w.samples.segment(t * shift, len).array() * win.array()).transpose();
  }
  return out;
}

Eigen::VectorXd PowerSpectrum(const Eigen::Ref<const Eigen::VectorXd>& frame) {
  const Eigen::Index n = frame.size();
  if (!IsPowerOfTwo(n)) throw Error("power spectrum: frame length must be a power of two");
  Eigen::VectorXd out(n / 2 + 1);
  if (n == 1) {
    out[0] = frame[0] * frame[0];
    return out;
  }
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> in(frame.data(), frame.data() + n);
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, in);
  for (Eigen::Index k = 0; k <= n / 2; ++k) out[k] = std::norm(spec[k]);
  return out;
}

Eigen::MatrixXd MelFilterbank(const FrontendConfig& cfg, int sample_rate_hz) {
  const int bins = cfg.n_fft / 2 + 1;
  const double nyquist = 0.5 * sample_rate_hz;
  const double mel_lo = HzToMel(cfg.low_freq_hz);
  const double mel_hi = HzToMel(nyquist);
  const double step = (mel_hi - mel_lo) / (cfg.n_mels + 1);
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(cfg.n_mels, bins);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double left = mel_lo + m * step;
    const double center = left + step;
    const double right = center + step;
    for (int k = 0; k < bins; ++k) {
      const double mel = HzToMel(k * static_cast<double>(sample_rate_hz) / cfg.n_fft);
      if (mel > left && mel < right) {
        fb(m, k) = mel <= center ? (mel - left) / (center - left)
                                 : (right - mel) / (right - center);
      }
    }
  }
  return fb;
}

Eigen::VectorXd LogMel(const Eigen::Ref<const Eigen::VectorXd>& spectrum,
                       const FrontendConfig& cfg, int sample_rate_hz) {
  if (spectrum.size() != cfg.n_fft / 2 + 1)
    throw Error("log-mel: spectrum has the wrong number of bins");
  Eigen::VectorXd energies = MelFilterbank(cfg, sample_rate_hz) * spectrum;
  return energies.array().max(cfg.energy_floor).log();
}

SeqMatrixd ComputeLogMel(const Waveform& w, const FrontendConfig& cfg) {
  const Waveform emph = PreEmphasize(w, cfg.pre_emphasis);
  const SeqMatrixd frames = FrameAndWindow(emph, cfg);
  const Eigen::MatrixXd fb = MelFilterbank(cfg, w.sample_rate_hz);
  SeqMatrixd out(frames.rows(), cfg.n_mels);
  for (Eigen::Index t = 0; t < frames.rows(); ++t) {
    const Eigen::VectorXd spec = PowerSpectrum(frames.row(t).transpose());
    out.row(t) = (fb * spec).array().max(cfg.energy_floor).log().transpose();
  }
  return out;
}

SeqMatrixd PitchFeatures(const Waveform& w, const FrontendConfig& cfg) {
  w.Validate();
  const int sr = w.sample_rate_hz;
  if (sr < 2.0 * cfg.pitch_max_hz)
    throw Error("pitch: sample rate below twice the pitch search ceiling");
  const int len = cfg.FrameLength(sr);
  const int shift = cfg.FrameShift(sr);
  const Eigen::Index frames = NumFrames(w.size(), len, shift);
  if (frames == 0) throw Error("utterance too short");
  const int min_lag = std::max(1, static_cast<int>(std::floor(sr / cfg.pitch_max_hz)));
  const int max_lag = static_cast<int>(std::ceil(sr / cfg.pitch_min_hz));
  const double mid_f0 = 0.5 * (cfg.pitch_min_hz + cfg.pitch_max_hz);

  SeqMatrixd out(frames, 3);
  Eigen::VectorXd corr(max_lag + 1);
  double last_voiced = mid_f0;
  for (Eigen::Index t = 0; t < frames; ++t) {
    const Eigen::Index start = t * shift;
    const Eigen::Index avail = w.size() - start;
    const Eigen::Index span = std::min<Eigen::Index>(avail, len + max_lag);
    Eigen::VectorXd seg = w.samples.segment(start, span);
    seg.array() -= seg.head(std::min<Eigen::Index>(len, span)).mean();
    corr.setZero();
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      const Eigen::Index overlap = std::min<Eigen::Index>(len, span - lag);
      if (overlap < len / 2) break;
      const auto a = seg.head(overlap);
      const auto b = seg.segment(lag, overlap);
      const double ea = a.squaredNorm();
      const double eb = b.squaredNorm();
      if (ea <= 1e-12 || eb <= 1e-12) continue;
      corr[lag] = a.dot(b) / std::sqrt(ea * eb);
    }
    int best = min_lag;
    for (int lag = min_lag; lag <= max_lag; ++lag)
      if (corr[lag] > corr[best]) best = lag;
    const double peak = std::max(0.0, corr[best]);
    // Prefer the shortest lag that is a local maximum close to the global
    // peak; multiples of the period score almost as high.
    for (int lag = min_lag + 1; lag < best; ++lag) {
      if (corr[lag] >= 0.9 * corr[best] && corr[lag] >= corr[lag - 1] &&
          corr[lag] >= corr[lag + 1]) {
        best = lag;
        break;
      }
    }
    double refined = best;
    if (best > min_lag && best < max_lag) {
      const double y0 = corr[best - 1], y1 = corr[best], y2 = corr[best + 1];
      const double denom = y0 - 2 * y1 + y2;
      if (denom < 0) refined = best + 0.5 * (y0 - y2) / denom;
    }
    if (peak >= cfg.voicing_threshold) last_voiced = sr / refined;
    out(t, 0) = std::log(last_voiced);
    out(t, 1) = peak;
  }
  out.col(2) = Deltas(out.col(0)).col(0);
  return out;
}

SeqMatrixd Deltas(const SeqMatrixd& x, int window) {
  const Eigen::Index frames = x.rows();
  double denom = 0;
  for (int n = 1; n <= window; ++n) denom += n * n;
  denom *= 2;
  SeqMatrixd out = SeqMatrixd::Zero(frames, x.cols());
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (int n = 1; n <= window; ++n) {
      out.row(t) += n * (x.row(Clamp(t + n, frames)) - x.row(Clamp(t - n, frames)));
    }
  }
  return out / denom;
}

FeatureMatrix AddDeltas(const FeatureMatrix& f, int order) {
  if (f.Frames() < 1) throw Error("deltas: empty feature matrix");
  FeatureMatrix out;
  out.meta = f.meta;
  out.frame_shift_ms = f.frame_shift_ms;
  out.data.resize(f.Frames(), f.Dims() * (order + 1));
  SeqMatrixd cur = f.data;
  out.data.leftCols(f.Dims()) = cur;
  for (int o = 1; o <= order; ++o) {
    cur = Deltas(cur);
    out.data.middleCols(o * f.Dims(), f.Dims()) = cur;
  }
  return out;
}

std::vector<FeatureMatrix> CmvnPerSpeaker(const std::vector<FeatureMatrix>& features) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < features.size(); ++i)
    groups[features[i].meta.speaker].push_back(i);

  std::vector<FeatureMatrix> out = features;
  for (const auto& [speaker, members] : groups) {
    const Eigen::Index dims = features[members.front()].Dims();
    Eigen::Index count = 0;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dims);
    for (std::size_t i : members) {
      if (features[i].Dims() != dims) throw Error("cmvn: dimension mismatch for " + speaker);
      sum += features[i].data.colwise().sum().transpose();
      count += features[i].Frames();
    }
    if (count < 2) throw Error("cmvn: speaker " + speaker + " has fewer than 2 frames");
    const Eigen::VectorXd mean = sum / count;
    Eigen::VectorXd var = Eigen::VectorXd::Zero(dims);
    for (std::size_t i : members)
      var += (features[i].data.rowwise() - mean.transpose()).array().square()
                 .colwise().sum().matrix().transpose();
    var /= count;
    Eigen::VectorXd scale(dims);
    for (Eigen::Index d = 0; d < dims; ++d)
      scale[d] = var[d] <= 1e-18 * std::max(1.0, mean[d] * mean[d]) ? 1.0
                                                                   : 1.0 / std::sqrt(var[d]);
    for (std::size_t i : members) {
      out[i].data = ((features[i].data.rowwise() - mean.transpose()).array().rowwise() *
                     scale.transpose().array()).matrix();
    }
  }
  return out;
}

FeatureMatrix CmvnUtterance(const FeatureMatrix& f) {
  FeatureMatrix out = CmvnPerSpeaker({f}).front();
  out.meta = f.meta;
  return out;
}

FeatureMatrix StackWindow(const FeatureMatrix& f, int window) {
  if (window < 1 || window % 2 == 0) throw Error("stack window: window must be odd");
  const int k = (window - 1) / 2;
  const Eigen::Index frames = f.Frames(), dims = f.Dims();
  FeatureMatrix out;
  out.meta = f.meta;
  out.frame_shift_ms = f.frame_shift_ms;
  out.data.resize(frames, dims * window);
  for (Eigen::Index t = 0; t < frames; ++t)
    for (int o = -k; o <= k; ++o)
      out.data.row(t).segment((o + k) * dims, dims) = f.data.row(Clamp(t + o, frames));
  return out;
}

std::vector<FeatureMatrix> SubsampleCopies(const FeatureMatrix& f, int stride) {
  if (stride < 1) throw Error("subsample: stride must be >= 1");
  if (f.Frames() < stride) throw Error("subsample: fewer frames than the stride");
  std::vector<FeatureMatrix> copies;
  for (int j = 0; j < stride; ++j) {
    FeatureMatrix c;
    c.meta = f.meta;
    c.frame_shift_ms = f.frame_shift_ms * stride;
    const Eigen::Index n = (f.Frames() - j + stride - 1) / stride;
    c.data.resize(n, f.Dims());
    for (Eigen::Index i = 0; i < n; ++i) c.data.row(i) = f.data.row(j + i * stride);
    copies.push_back(std::move(c));
  }
  return copies;
}

FeatureMatrix ComputeBaselineFeatures(const Waveform& w, const FrontendConfig& cfg,
                                      const FeatureMeta& meta) {
  const SeqMatrixd fbank = ComputeLogMel(w, cfg);
  const SeqMatrixd pitch = PitchFeatures(w, cfg);
  FeatureMatrix static_part;
  static_part.meta = meta;
  static_part.frame_shift_ms = cfg.frame_shift_ms;
  static_part.data.resize(fbank.rows(), fbank.cols() + pitch.cols());
  static_part.data << fbank, pitch;
  FeatureMatrix out = AddDeltas(static_part, 2);
  out.meta.kind = "baseline";
  return out;
}

}  // namespace xdasr
