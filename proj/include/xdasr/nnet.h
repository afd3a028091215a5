// include/xdasr/nnet.h
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

// A small reverse-mode network core: bidirectional LSTM, TDNN (spliced
// affine + ReLU), affine, ReLU and log-softmax layers over one utterance at
// a time, with SGD + momentum. Networks are templated on the scalar type:
// training runs in float, gradient checks in double.

#ifndef XDASR_NNET_H_
#define XDASR_NNET_H_

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "xdasr/common.h"

namespace xdasr {

enum class LayerKind { kBiLstm, kTdnn, kAffine, kRelu, kSoftmax };

std::string ToString(LayerKind kind);
LayerKind LayerKindFromString(const std::string& s);

struct LayerSpec {
  LayerKind kind = LayerKind::kAffine;
  int width = 0;             // per direction for bilstm; unused for relu/softmax
  std::vector<int> offsets;  // tdnn splice offsets, sorted and unique

  static LayerSpec BiLstm(int cells) { return {LayerKind::kBiLstm, cells, {}}; }
  static LayerSpec Tdnn(int width, std::vector<int> offsets) {
    return {LayerKind::kTdnn, width, std::move(offsets)};
  }
  static LayerSpec Affine(int width) { return {LayerKind::kAffine, width, {}}; }
  static LayerSpec Relu() { return {LayerKind::kRelu, 0, {}}; }
  static LayerSpec Softmax() { return {LayerKind::kSoftmax, 0, {}}; }

  int OutputDim(int input_dim) const;
  std::size_t ParamCount(int input_dim) const;
  void Validate() const;
  bool operator==(const LayerSpec&) const = default;
};

struct Architecture {
  int input_dim = 0;
  std::vector<LayerSpec> layers;

  void Validate() const;
  /// Output width after layers [0, k).
  int DimAfter(std::size_t k) const;
  int OutputDim() const { return DimAfter(layers.size()); }
  std::size_t ParamCount() const;
  /// Offset of layer k's parameters in the flat vector.
  std::size_t ParamOffset(std::size_t k) const;
  bool operator==(const Architecture&) const = default;

  /// bilstm x n_layers, then affine to n_labels and log-softmax.
  static Architecture BiLstmCtc(int input_dim, int n_layers, int cells, int n_labels);
  /// TDNN stack with the given splices, then affine to n_labels and log-softmax.
  static Architecture TdnnCtc(int input_dim, const std::vector<std::vector<int>>& splices,
                              int width, int n_labels);
};

/// Per-layer intermediate values kept by a forward pass for backward.
template <typename Scalar>
struct Tape {
  std::vector<SeqMatrix<Scalar>> inputs;               // input to each layer
  std::vector<std::vector<SeqMatrix<Scalar>>> caches;  // layer-specific
  SeqMatrix<Scalar> output;
};

template <typename Scalar>
class Network {
 public:
  using Seq = SeqMatrix<Scalar>;
  using Vec = Vector<Scalar>;

  Network() = default;
  explicit Network(Architecture arch);
  Network(Architecture arch, Vec params);

  /// Glorot-uniform affine/TDNN weights, scaled-uniform recurrent weights,
  /// forget-gate bias +1, other biases zero.
  void Initialize(std::uint64_t seed);

  const Architecture& arch() const { return arch_; }
  const Vec& params() const { return params_; }
  Vec& params() { return params_; }

  /// Runs layers [0, num_layers) (all when negative). Throws if an
  /// activation becomes non-finite.
  Seq Forward(const Seq& input, Tape<Scalar>* tape = nullptr, int num_layers = -1) const;

  /// Gradient of the loss w.r.t. every parameter, given the gradient at the
  /// output of the recorded forward pass.
  Vec Backward(const Tape<Scalar>& tape, const Seq& grad_output,
               Seq* grad_input = nullptr) const;

  template <typename Other>
  Network<Other> Cast() const {
    return Network<Other>(arch_, params_.template cast<Other>());
  }

 private:
  Architecture arch_;
  Vec params_;
};

extern template class Network<float>;
extern template class Network<double>;

struct SgdConfig {
  double learning_rate = 1e-3;
  double momentum = 0.9;
  double clip = 5.0;  // global L2 norm; infinity disables
};

/// Clips grads to cfg.clip global norm, then v <- mu v - lr g, p <- p + v.
/// Throws on a non-finite gradient.
template <typename Scalar>
void SgdStep(Vector<Scalar>& params, const Vector<Scalar>& grads, Vector<Scalar>& velocity,
             const SgdConfig& cfg);

extern template void SgdStep<float>(Vector<float>&, const Vector<float>&, Vector<float>&,
                                    const SgdConfig&);
extern template void SgdStep<double>(Vector<double>&, const Vector<double>&, Vector<double>&,
                                     const SgdConfig&);

struct TrainingMetadata {
  int epoch = 0;
  std::uint64_t seed = 0;
  std::string feature_kind;
  std::vector<std::string> labels;
  std::map<std::string, std::string> extra;
  bool operator==(const TrainingMetadata&) const = default;
};

struct Checkpoint {
  Architecture arch;
  Vector<float> params;
  TrainingMetadata metadata;
};

// "XDCK", u32 version, u32 header length, UTF-8 JSON header
// {architecture, metadata, parameter_count}, little-endian f32 parameters.
std::string SerializeCheckpoint(const Checkpoint& ck);
Checkpoint ParseCheckpoint(const std::string& bytes);
void SaveCheckpoint(const std::string& path, const Checkpoint& ck);
Checkpoint LoadCheckpoint(const std::string& path);

}  // namespace xdasr

#endif  // XDASR_NNET_H_
