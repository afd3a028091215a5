// src/nnet.cc
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

#include "xdasr/nnet.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "json.hpp"

namespace xdasr {

// ---------------------------------------------------------------------------
// Specs

std::string ToString(LayerKind kind) {
  switch (kind) {
    case LayerKind::kBiLstm: return "bilstm";
    case LayerKind::kTdnn: return "tdnn";
    case LayerKind::kAffine: return "affine";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kSoftmax: return "softmax";
  }
  return "?";
}

LayerKind LayerKindFromString(const std::string& s) {
  for (LayerKind k : {LayerKind::kBiLstm, LayerKind::kTdnn, LayerKind::kAffine, LayerKind::kRelu,
                      LayerKind::kSoftmax})
    if (ToString(k) == s) return k;
  throw Error("unknown layer kind: " + s);
}

int LayerSpec::OutputDim(int input_dim) const {
  switch (kind) {
    case LayerKind::kBiLstm: return 2 * width;
    case LayerKind::kTdnn:
    case LayerKind::kAffine: return width;
    case LayerKind::kRelu:
    case LayerKind::kSoftmax: return input_dim;
  }
  return input_dim;
}

std::size_t LayerSpec::ParamCount(int input_dim) const {
  const std::size_t d = input_dim, w = width;
  switch (kind) {
    case LayerKind::kBiLstm: return 2 * (4 * w * d + 4 * w * w + 4 * w);
    case LayerKind::kTdnn: return w * d * offsets.size() + w;
    case LayerKind::kAffine: return w * d + w;
    default: return 0;
  }
}

void LayerSpec::Validate() const {
  const bool needs_width =
      kind == LayerKind::kBiLstm || kind == LayerKind::kTdnn || kind == LayerKind::kAffine;
  if (needs_width && width <= 0) throw Error("layer " + ToString(kind) + ": width must be > 0");
  if (kind == LayerKind::kTdnn) {
    if (offsets.empty()) throw Error("tdnn: empty splice offsets");
    for (std::size_t i = 1; i < offsets.size(); ++i)
      if (offsets[i] <= offsets[i - 1]) throw Error("tdnn: offsets must be sorted and unique");
  }
}

void Architecture::Validate() const {
  if (input_dim <= 0) throw Error("architecture: input_dim must be > 0");
  for (const auto& l : layers) l.Validate();
}

int Architecture::DimAfter(std::size_t k) const {
  int d = input_dim;
  for (std::size_t i = 0; i < k && i < layers.size(); ++i) d = layers[i].OutputDim(d);
  return d;
}

std::size_t Architecture::ParamCount() const { return ParamOffset(layers.size()); }

std::size_t Architecture::ParamOffset(std::size_t k) const {
  std::size_t total = 0;
  int d = input_dim;
  for (std::size_t i = 0; i < k && i < layers.size(); ++i) {
    total += layers[i].ParamCount(d);
    d = layers[i].OutputDim(d);
  }
  return total;
}

Architecture Architecture::BiLstmCtc(int input_dim, int n_layers, int cells, int n_labels) {
  Architecture a;
  a.input_dim = input_dim;
  for (int i = 0; i < n_layers; ++i) a.layers.push_back(LayerSpec::BiLstm(cells));
  a.layers.push_back(LayerSpec::Affine(n_labels));
  a.layers.push_back(LayerSpec::Softmax());
  a.Validate();
  return a;
}

Architecture Architecture::TdnnCtc(int input_dim, const std::vector<std::vector<int>>& splices,
                                   int width, int n_labels) {
  Architecture a;
  a.input_dim = input_dim;
  for (const auto& s : splices) a.layers.push_back(LayerSpec::Tdnn(width, s));
  a.layers.push_back(LayerSpec::Affine(n_labels));
  a.layers.push_back(LayerSpec::Softmax());
  a.Validate();
  return a;
}

// ---------------------------------------------------------------------------
// Layer kernels

namespace {

template <typename Scalar>
using ConstMap = Eigen::Map<const Matrix<Scalar>>;
template <typename Scalar>
using MutMap = Eigen::Map<Matrix<Scalar>>;

template <typename Scalar>
Scalar Sigmoid(Scalar x) {
  return Scalar(1) / (Scalar(1) + std::exp(-x));
}

// Gate layout inside the 4H pre-activation: input, forget, cell, output.
template <typename Scalar>
struct LstmParams {
  ConstMap<Scalar> wx, wh;
  Eigen::Map<const Vector<Scalar>> b;
  LstmParams(const Scalar* p, int in, int h)
      : wx(p, 4 * h, in), wh(p + 4 * h * in, 4 * h, h), b(p + 4 * h * in + 4 * h * h, 4 * h) {}
  static std::size_t Count(int in, int h) { return 4 * h * in + 4 * h * h + 4 * h; }
};

template <typename Scalar>
struct LstmGrads {
  MutMap<Scalar> wx, wh;
  Eigen::Map<Vector<Scalar>> b;
  LstmGrads(Scalar* p, int in, int h)
      : wx(p, 4 * h, in), wh(p + 4 * h * in, 4 * h, h), b(p + 4 * h * in + 4 * h * h, 4 * h) {}
};

// cache: gates (T x 4H, post-nonlinearity), cells (T x H), hidden (T x H)
template <typename Scalar>
void LstmForward(const SeqMatrix<Scalar>& x, const LstmParams<Scalar>& p, int h, bool reverse,
                 SeqMatrix<Scalar>& gates, SeqMatrix<Scalar>& cells, SeqMatrix<Scalar>& hidden) {
  const Eigen::Index frames = x.rows();
  gates.noalias() = x * p.wx.transpose();
  gates.rowwise() += p.b.transpose();
  cells.resize(frames, h);
  hidden.resize(frames, h);
  Vector<Scalar> h_prev = Vector<Scalar>::Zero(h), c_prev = Vector<Scalar>::Zero(h);
  Vector<Scalar> z(4 * h);
  for (Eigen::Index step = 0; step < frames; ++step) {
    const Eigen::Index t = reverse ? frames - 1 - step : step;
    z = gates.row(t).transpose();
    z.noalias() += p.wh * h_prev;
    for (int k = 0; k < h; ++k) {
      const Scalar i = Sigmoid(z[k]);
      const Scalar f = Sigmoid(z[h + k]);
      const Scalar g = std::tanh(z[2 * h + k]);
      const Scalar o = Sigmoid(z[3 * h + k]);
      const Scalar c = f * c_prev[k] + i * g;
      gates(t, k) = i;
      gates(t, h + k) = f;
      gates(t, 2 * h + k) = g;
      gates(t, 3 * h + k) = o;
      cells(t, k) = c;
      hidden(t, k) = o * std::tanh(c);
      c_prev[k] = c;
    }
    h_prev = hidden.row(t).transpose();
  }
}

template <typename Scalar>
void LstmBackward(const SeqMatrix<Scalar>& x, const LstmParams<Scalar>& p, int h, bool reverse,
                  const SeqMatrix<Scalar>& gates, const SeqMatrix<Scalar>& cells,
                  const SeqMatrix<Scalar>& hidden, const SeqMatrix<Scalar>& d_hidden,
                  LstmGrads<Scalar>& g, SeqMatrix<Scalar>& dx) {
  const Eigen::Index frames = x.rows();
  SeqMatrix<Scalar> dz(frames, 4 * h);
  SeqMatrix<Scalar> h_prev_all = SeqMatrix<Scalar>::Zero(frames, h);
  Vector<Scalar> dh_rec = Vector<Scalar>::Zero(h), dc_rec = Vector<Scalar>::Zero(h);
  for (Eigen::Index step = frames - 1; step >= 0; --step) {
    const Eigen::Index t = reverse ? frames - 1 - step : step;
    const bool first = step == 0;
    const Eigen::Index prev = reverse ? t + 1 : t - 1;
    for (int k = 0; k < h; ++k) {
      const Scalar i = gates(t, k), f = gates(t, h + k), gg = gates(t, 2 * h + k),
                   o = gates(t, 3 * h + k);
      const Scalar c = cells(t, k);
      const Scalar c_prev = first ? Scalar(0) : cells(prev, k);
      const Scalar tc = std::tanh(c);
      const Scalar dh = d_hidden(t, k) + dh_rec[k];
      const Scalar d_o = dh * tc;
      const Scalar dc = dh * o * (Scalar(1) - tc * tc) + dc_rec[k];
      dz(t, k) = dc * gg * i * (Scalar(1) - i);
      dz(t, h + k) = dc * c_prev * f * (Scalar(1) - f);
      dz(t, 2 * h + k) = dc * i * (Scalar(1) - gg * gg);
      dz(t, 3 * h + k) = d_o * o * (Scalar(1) - o);
      dc_rec[k] = dc * f;
    }
    if (!first) h_prev_all.row(t) = hidden.row(prev);
    dh_rec.noalias() = p.wh.transpose() * dz.row(t).transpose();
  }
  g.wx.noalias() += dz.transpose() * x;
  g.wh.noalias() += dz.transpose() * h_prev_all;
  g.b += dz.colwise().sum().transpose();
  dx.noalias() += dz * p.wx;
}

template <typename Scalar>
SeqMatrix<Scalar> Splice(const SeqMatrix<Scalar>& x, const std::vector<int>& offsets) {
  const Eigen::Index frames = x.rows(), d = x.cols();
  SeqMatrix<Scalar> s(frames, d * static_cast<Eigen::Index>(offsets.size()));
  for (Eigen::Index t = 0; t < frames; ++t)
    for (std::size_t k = 0; k < offsets.size(); ++k)
      s.row(t).segment(k * d, d) = x.row(std::clamp<Eigen::Index>(t + offsets[k], 0, frames - 1));
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Network

template <typename Scalar>
Network<Scalar>::Network(Architecture arch) : arch_(std::move(arch)) {
  arch_.Validate();
  params_ = Vec::Zero(static_cast<Eigen::Index>(arch_.ParamCount()));
}

template <typename Scalar>
Network<Scalar>::Network(Architecture arch, Vec params)
    : arch_(std::move(arch)), params_(std::move(params)) {
  arch_.Validate();
  if (static_cast<std::size_t>(params_.size()) != arch_.ParamCount())
    throw Error("network: parameter count does not match architecture");
}

template <typename Scalar>
void Network<Scalar>::Initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto fill_uniform = [&](Scalar* p, std::size_t n, double limit) {
    std::uniform_real_distribution<double> u(-limit, limit);
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<Scalar>(u(rng));
  };
  params_.setZero();
  int d = arch_.input_dim;
  for (std::size_t k = 0; k < arch_.layers.size(); ++k) {
    const LayerSpec& l = arch_.layers[k];
    Scalar* p = params_.data() + arch_.ParamOffset(k);
    const int w = l.width;
    switch (l.kind) {
      case LayerKind::kBiLstm:
        for (int dir = 0; dir < 2; ++dir) {
          Scalar* q = p + dir * LstmParams<Scalar>::Count(d, w);
          fill_uniform(q, 4 * w * d, std::sqrt(6.0 / (d + 4 * w)));
          fill_uniform(q + 4 * w * d, 4 * w * w, 1.0 / std::sqrt(static_cast<double>(w)));
          Scalar* b = q + 4 * w * d + 4 * w * w;
          for (int i = 0; i < w; ++i) b[w + i] = Scalar(1);
        }
        break;
      case LayerKind::kTdnn: {
        const int fan_in = d * static_cast<int>(l.offsets.size());
        fill_uniform(p, static_cast<std::size_t>(w) * fan_in, std::sqrt(6.0 / (fan_in + w)));
        break;
      }
      case LayerKind::kAffine:
        fill_uniform(p, static_cast<std::size_t>(w) * d, std::sqrt(6.0 / (d + w)));
        break;
      default:
        break;
    }
    d = l.OutputDim(d);
  }
}

template <typename Scalar>
typename Network<Scalar>::Seq Network<Scalar>::Forward(const Seq& input, Tape<Scalar>* tape,
                                                       int num_layers) const {
  if (input.cols() != arch_.input_dim)
    throw Error("network: input has " + std::to_string(input.cols()) + " dims, expected " +
                std::to_string(arch_.input_dim));
  if (input.rows() < 1) throw Error("network: empty input");
  const std::size_t n = num_layers < 0 ? arch_.layers.size()
                                       : std::min<std::size_t>(num_layers, arch_.layers.size());
  if (tape) {
    tape->inputs.assign(n, Seq());
    tape->caches.assign(n, {});
  }
  Seq x = input;
  int d = arch_.input_dim;
  for (std::size_t k = 0; k < n; ++k) {
    const LayerSpec& l = arch_.layers[k];
    const Scalar* p = params_.data() + arch_.ParamOffset(k);
    std::vector<Seq> cache;
    Seq y;
    switch (l.kind) {
      case LayerKind::kBiLstm: {
        const int h = l.width;
        y.resize(x.rows(), 2 * h);
        cache.resize(6);
        for (int dir = 0; dir < 2; ++dir) {
          LstmParams<Scalar> lp(p + dir * LstmParams<Scalar>::Count(d, h), d, h);
          LstmForward<Scalar>(x, lp, h, dir == 1, cache[3 * dir], cache[3 * dir + 1],
                              cache[3 * dir + 2]);
          y.middleCols(dir * h, h) = cache[3 * dir + 2];
        }
        break;
      }
      case LayerKind::kTdnn: {
        const int kd = d * static_cast<int>(l.offsets.size());
        ConstMap<Scalar> w(p, l.width, kd);
        Eigen::Map<const Vector<Scalar>> b(p + static_cast<std::size_t>(l.width) * kd, l.width);
        Seq spliced = Splice(x, l.offsets);
        y.noalias() = spliced * w.transpose();
        y.rowwise() += b.transpose();
        y = y.cwiseMax(Scalar(0));
        cache.push_back(std::move(spliced));
        break;
      }
      case LayerKind::kAffine: {
        ConstMap<Scalar> w(p, l.width, d);
        Eigen::Map<const Vector<Scalar>> b(p + static_cast<std::size_t>(l.width) * d, l.width);
        y.noalias() = x * w.transpose();
        y.rowwise() += b.transpose();
        break;
      }
      case LayerKind::kRelu:
        y = x.cwiseMax(Scalar(0));
        break;
      case LayerKind::kSoftmax: {
        y.resize(x.rows(), x.cols());
        for (Eigen::Index t = 0; t < x.rows(); ++t) {
          const Scalar mx = x.row(t).maxCoeff();
          const Scalar lse = mx + std::log((x.row(t).array() - mx).exp().sum());
          y.row(t) = x.row(t).array() - lse;
        }
        break;
      }
    }
    if (!y.allFinite())
      throw Error("network: non-finite activation after layer " + std::to_string(k) + " (" +
                  ToString(l.kind) + ")");
    if (tape) {
      tape->inputs[k] = std::move(x);
      tape->caches[k] = std::move(cache);
    }
    x = std::move(y);
    d = l.OutputDim(d);
  }
  if (tape) tape->output = x;
  return x;
}

template <typename Scalar>
typename Network<Scalar>::Vec Network<Scalar>::Backward(const Tape<Scalar>& tape,
                                                        const Seq& grad_output,
                                                        Seq* grad_input) const {
  const std::size_t n = tape.inputs.size();
  if (grad_output.rows() != tape.output.rows() || grad_output.cols() != tape.output.cols())
    throw Error("network: gradient shape does not match forward output");
  Vec grads = Vec::Zero(params_.size());
  Seq dy = grad_output;
  for (std::size_t kk = n; kk-- > 0;) {
    const LayerSpec& l = arch_.layers[kk];
    const Seq& x = tape.inputs[kk];
    const auto& cache = tape.caches[kk];
    const int d = static_cast<int>(x.cols());
    const Scalar* p = params_.data() + arch_.ParamOffset(kk);
    Scalar* gp = grads.data() + arch_.ParamOffset(kk);
    Seq dx;
    switch (l.kind) {
      case LayerKind::kBiLstm: {
        const int h = l.width;
        dx = Seq::Zero(x.rows(), d);
        for (int dir = 0; dir < 2; ++dir) {
          const std::size_t off = dir * LstmParams<Scalar>::Count(d, h);
          LstmParams<Scalar> lp(p + off, d, h);
          LstmGrads<Scalar> lg(gp + off, d, h);
          const Seq dh = dy.middleCols(dir * h, h);
          LstmBackward<Scalar>(x, lp, h, dir == 1, cache[3 * dir], cache[3 * dir + 1],
                               cache[3 * dir + 2], dh, lg, dx);
        }
        break;
      }
      case LayerKind::kTdnn: {
        const Seq& spliced = cache[0];
        const int kd = static_cast<int>(spliced.cols());
        ConstMap<Scalar> w(p, l.width, kd);
        MutMap<Scalar> gw(gp, l.width, kd);
        Eigen::Map<Vector<Scalar>> gb(gp + static_cast<std::size_t>(l.width) * kd, l.width);
        // Output of this layer is the next layer's input (or the tape output).
        const Seq& out = kk + 1 < n ? tape.inputs[kk + 1] : tape.output;
        const Seq dpre = (out.array() > Scalar(0)).select(dy, Scalar(0));
        gw.noalias() += dpre.transpose() * spliced;
        gb += dpre.colwise().sum().transpose();
        const Seq ds = dpre * w;
        dx = Seq::Zero(x.rows(), d);
        const Eigen::Index frames = x.rows();
        for (Eigen::Index t = 0; t < frames; ++t)
          for (std::size_t k = 0; k < l.offsets.size(); ++k)
            dx.row(std::clamp<Eigen::Index>(t + l.offsets[k], 0, frames - 1)) +=
                ds.row(t).segment(k * d, d);
        break;
      }
      case LayerKind::kAffine: {
        ConstMap<Scalar> w(p, l.width, d);
        MutMap<Scalar> gw(gp, l.width, d);
        Eigen::Map<Vector<Scalar>> gb(gp + static_cast<std::size_t>(l.width) * d, l.width);
        gw.noalias() += dy.transpose() * x;
        gb += dy.colwise().sum().transpose();
        dx.noalias() = dy * w;
        break;
      }
      case LayerKind::kRelu:
        dx = (x.array() > Scalar(0)).select(dy, Scalar(0));
        break;
      case LayerKind::kSoftmax: {
        const Seq& out = kk + 1 < n ? tape.inputs[kk + 1] : tape.output;
        const Seq soft = out.array().exp();
        dx = dy - (soft.array().colwise() * dy.rowwise().sum().array()).matrix();
        break;
      }
    }
    dy = std::move(dx);
  }
  if (grad_input) *grad_input = std::move(dy);
  return grads;
}

template class Network<float>;
template class Network<double>;

template <typename Scalar>
void SgdStep(Vector<Scalar>& params, const Vector<Scalar>& grads, Vector<Scalar>& velocity,
             const SgdConfig& cfg) {
  if (params.size() != grads.size()) throw Error("sgd: parameter/gradient size mismatch");
  if (velocity.size() != params.size()) velocity = Vector<Scalar>::Zero(params.size());
  const double norm = grads.template cast<double>().norm();
  double scale = 1.0;
  if (std::isfinite(cfg.clip) && norm > cfg.clip) scale = cfg.clip / norm;
  if (!std::isfinite(norm * scale)) throw Error("sgd: non-finite gradient");
  velocity = static_cast<Scalar>(cfg.momentum) * velocity -
             static_cast<Scalar>(cfg.learning_rate * scale) * grads;
  params += velocity;
}

template void SgdStep<float>(Vector<float>&, const Vector<float>&, Vector<float>&,
                             const SgdConfig&);
template void SgdStep<double>(Vector<double>&, const Vector<double>&, Vector<double>&,
                              const SgdConfig&);

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

using nlohmann::json;

constexpr char kCheckpointMagic[4] = {'X', 'D', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

json ArchToJson(const Architecture& a) {
  json layers = json::array();
  for (const auto& l : a.layers) {
    json j = {{"kind", ToString(l.kind)}, {"width", l.width}};
    if (l.kind == LayerKind::kTdnn) j["offsets"] = l.offsets;
    layers.push_back(j);
  }
  return {{"input_dim", a.input_dim}, {"layers", layers}};
}

Architecture ArchFromJson(const json& j) {
  Architecture a;
  a.input_dim = j.at("input_dim").get<int>();
  for (const auto& lj : j.at("layers")) {
    LayerSpec l;
    l.kind = LayerKindFromString(lj.at("kind").get<std::string>());
    l.width = lj.at("width").get<int>();
    if (lj.contains("offsets")) l.offsets = lj.at("offsets").get<std::vector<int>>();
    a.layers.push_back(l);
  }
  a.Validate();
  return a;
}

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& ck) {
  static_assert(std::endian::native == std::endian::little);
  if (static_cast<std::size_t>(ck.params.size()) != ck.arch.ParamCount())
    throw Error("checkpoint: parameter count does not match architecture");
  json header = {
      {"architecture", ArchToJson(ck.arch)},
      {"metadata",
       {{"epoch", ck.metadata.epoch},
        {"seed", ck.metadata.seed},
        {"feature_kind", ck.metadata.feature_kind},
        {"labels", ck.metadata.labels},
        {"extra", ck.metadata.extra}}},
      {"parameter_count", ck.params.size()},
  };
  const std::string text = header.dump();
  std::string out(kCheckpointMagic, 4);
  const std::uint32_t version = kCheckpointVersion;
  const std::uint32_t len = static_cast<std::uint32_t>(text.size());
  out.append(reinterpret_cast<const char*>(&version), 4);
  out.append(reinterpret_cast<const char*>(&len), 4);
  out += text;
  out.append(reinterpret_cast<const char*>(ck.params.data()),
             sizeof(float) * static_cast<std::size_t>(ck.params.size()));
  return out;
}

Checkpoint ParseCheckpoint(const std::string& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0)
    throw Error("checkpoint: bad magic");
  std::uint32_t version, len;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&len, bytes.data() + 8, 4);
  if (version != kCheckpointVersion) throw Error("checkpoint: unsupported version");
  if (bytes.size() < 12 + static_cast<std::size_t>(len)) throw Error("checkpoint: truncated header");
  json header;
  try {
    header = json::parse(bytes.substr(12, len));
  } catch (const json::exception& e) {
    throw Error(std::string("checkpoint: bad header: ") + e.what());
  }
  Checkpoint ck;
  ck.arch = ArchFromJson(header.at("architecture"));
  const auto& m = header.at("metadata");
  ck.metadata.epoch = m.at("epoch").get<int>();
  ck.metadata.seed = m.at("seed").get<std::uint64_t>();
  ck.metadata.feature_kind = m.at("feature_kind").get<std::string>();
  ck.metadata.labels = m.at("labels").get<std::vector<std::string>>();
  ck.metadata.extra = m.at("extra").get<std::map<std::string, std::string>>();
  const std::size_t count = header.at("parameter_count").get<std::size_t>();
  if (count != ck.arch.ParamCount()) throw Error("checkpoint: parameter count mismatch");
  const std::size_t payload = 12 + len;
  if (bytes.size() != payload + count * sizeof(float)) throw Error("checkpoint: truncated payload");
  ck.params.resize(static_cast<Eigen::Index>(count));
  std::memcpy(ck.params.data(), bytes.data() + payload, count * sizeof(float));
  return ck;
}

void SaveCheckpoint(const std::string& path, const Checkpoint& ck) {
  WriteFileBytes(path, SerializeCheckpoint(ck));
}

Checkpoint LoadCheckpoint(const std::string& path) { return ParseCheckpoint(ReadFileBytes(path)); }

}  // namespace xdasr
