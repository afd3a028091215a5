// include/xdasr/ctc.h
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

// Connectionist temporal classification: log-space forward-backward loss
// with gradients, an exhaustive path-enumeration oracle, and greedy /
// prefix-beam decoding. Blank is always label 0.

#ifndef XDASR_CTC_H_
#define XDASR_CTC_H_

#include <limits>
#include <vector>

#include "xdasr/common.h"

namespace xdasr {

using LabelSeq = std::vector<int>;

inline constexpr int kBlank = 0;
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)); -inf is absorbing on both sides.
inline double LogAdd(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

/// Row-wise log-softmax.
template <typename Derived>
SeqMatrix<typename Derived::Scalar> LogSoftmaxRows(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  SeqMatrix<Scalar> out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const Scalar mx = logits.row(t).maxCoeff();
    const Scalar lse = mx + std::log((logits.row(t).array() - mx).exp().sum());
    out.row(t) = logits.row(t).array() - lse;
  }
  return out;
}

struct CtcResult {
  double neg_log_likelihood = 0;
  /// d nll / d logits, assuming log_probs = log_softmax(logits): softmax - gamma.
  SeqMatrixd grad_logits;
  /// gamma: per-frame label occupancy; d nll / d log_probs = -gamma.
  SeqMatrixd occupancy;
};

/// Minimum number of frames needed to emit labels (length + adjacent repeats).
int RequiredFrames(const LabelSeq& labels);

/// Log-space alpha/beta recursion over the blank-expanded label sequence.
/// Throws "label too long for input" when the target cannot fit in T frames.
CtcResult CtcLoss(const SeqMatrixd& log_probs, const LabelSeq& labels);

/// Sums the probability of every frame-level path that collapses to labels.
/// Returns +inf when no path does. Refuses instances with V^T > 1e7.
double BruteForceCtc(const SeqMatrixd& log_probs, const LabelSeq& labels);

/// Merges repeats, then drops blanks.
LabelSeq CollapsePath(const std::vector<int>& path);

LabelSeq GreedyDecode(const SeqMatrixd& log_probs);

/// CTC prefix beam search without a language model.
LabelSeq PrefixBeamDecode(const SeqMatrixd& log_probs, int beam);

}  // namespace xdasr

#endif  // XDASR_CTC_H_
