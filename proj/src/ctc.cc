// src/ctc.cc
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

#include "xdasr/ctc.h"

#include <algorithm>
#include <cmath>
#include <map>

namespace xdasr {

int RequiredFrames(const LabelSeq& labels) {
  int n = static_cast<int>(labels.size());
  for (std::size_t i = 1; i < labels.size(); ++i)
    if (labels[i] == labels[i - 1]) ++n;
  return n;
}

CtcResult CtcLoss(const SeqMatrixd& log_probs, const LabelSeq& labels) {
  const Eigen::Index frames = log_probs.rows();
  const Eigen::Index vocab = log_probs.cols();
  for (int l : labels)
    if (l <= kBlank || l >= vocab) throw Error("ctc: label id out of range");
  if (frames < RequiredFrames(labels)) throw Error("label too long for input");

  // Expanded sequence: blank, l1, blank, l2, ..., blank.
  const Eigen::Index states = 2 * static_cast<Eigen::Index>(labels.size()) + 1;
  std::vector<int> ext(states, kBlank);
  for (std::size_t i = 0; i < labels.size(); ++i) ext[2 * i + 1] = labels[i];
  auto can_skip = [&](Eigen::Index s) {
    return s >= 2 && ext[s] != kBlank && ext[s] != ext[s - 2];
  };

  SeqMatrixd alpha = SeqMatrixd::Constant(frames, states, kLogZero);
  SeqMatrixd beta = SeqMatrixd::Constant(frames, states, kLogZero);
  alpha(0, 0) = log_probs(0, ext[0]);
  if (states > 1) alpha(0, 1) = log_probs(0, ext[1]);
  for (Eigen::Index t = 1; t < frames; ++t) {
    for (Eigen::Index s = 0; s < states; ++s) {
      double a = alpha(t - 1, s);
      if (s >= 1) a = LogAdd(a, alpha(t - 1, s - 1));
      if (can_skip(s)) a = LogAdd(a, alpha(t - 1, s - 2));
      const double y = log_probs(t, ext[s]);
      alpha(t, s) = (a == kLogZero || y == kLogZero) ? kLogZero : a + y;
    }
  }
  // beta(t, s) excludes the emission at t.
  beta(frames - 1, states - 1) = 0.0;
  if (states > 1) beta(frames - 1, states - 2) = 0.0;
  for (Eigen::Index t = frames - 2; t >= 0; --t) {
    for (Eigen::Index s = 0; s < states; ++s) {
      double b = kLogZero;
      for (Eigen::Index next : {s, s + 1, s + 2}) {
        if (next >= states) break;
        if (next == s + 2 && !can_skip(next)) continue;
        const double y = log_probs(t + 1, ext[next]);
        const double nb = beta(t + 1, next);
        if (y != kLogZero && nb != kLogZero) b = LogAdd(b, nb + y);
      }
      beta(t, s) = b;
    }
  }

  double log_p = alpha(frames - 1, states - 1);
  if (states > 1) log_p = LogAdd(log_p, alpha(frames - 1, states - 2));

  CtcResult result;
  result.occupancy = SeqMatrixd::Zero(frames, vocab);
  if (log_p == kLogZero) {
    result.neg_log_likelihood = std::numeric_limits<double>::infinity();
    result.grad_logits = SeqMatrixd::Zero(frames, vocab);
    return result;
  }
  result.neg_log_likelihood = -log_p;
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (Eigen::Index s = 0; s < states; ++s) {
      const double ab = alpha(t, s) + beta(t, s);
      if (alpha(t, s) == kLogZero || beta(t, s) == kLogZero) continue;
      result.occupancy(t, ext[s]) += std::exp(ab - log_p);
    }
  }
  result.grad_logits = log_probs.array().exp().matrix() - result.occupancy;
  return result;
}

LabelSeq CollapsePath(const std::vector<int>& path) {
  LabelSeq out;
  int prev = -1;
  for (int p : path) {
    if (p != prev && p != kBlank) out.push_back(p);
    prev = p;
  }
  return out;
}

double BruteForceCtc(const SeqMatrixd& log_probs, const LabelSeq& labels) {
  const Eigen::Index frames = log_probs.rows();
  const Eigen::Index vocab = log_probs.cols();
  const double count = std::pow(static_cast<double>(vocab), static_cast<double>(frames));
  if (count > 1e7) throw Error("brute-force ctc: instance too large");
  std::vector<int> path(frames, 0);
  double total = kLogZero;
  for (long long n = 0; n < static_cast<long long>(count); ++n) {
    long long rem = n;
    for (Eigen::Index t = 0; t < frames; ++t) {
      path[t] = static_cast<int>(rem % vocab);
      rem /= vocab;
    }
    if (CollapsePath(path) != labels) continue;
    double lp = 0;
    for (Eigen::Index t = 0; t < frames && lp != kLogZero; ++t) {
      const double y = log_probs(t, path[t]);
      lp = y == kLogZero ? kLogZero : lp + y;
    }
    total = LogAdd(total, lp);
  }
  return total == kLogZero ? std::numeric_limits<double>::infinity() : -total;
}

LabelSeq GreedyDecode(const SeqMatrixd& log_probs) {
  std::vector<int> path(log_probs.rows());
  for (Eigen::Index t = 0; t < log_probs.rows(); ++t) {
    Eigen::Index best;
    log_probs.row(t).maxCoeff(&best);
    path[t] = static_cast<int>(best);
  }
  return CollapsePath(path);
}

LabelSeq PrefixBeamDecode(const SeqMatrixd& log_probs, int beam) {
  if (beam < 1) throw Error("prefix beam: beam must be >= 1");
  struct Score {
    double blank = kLogZero;
    double non_blank = kLogZero;
    double Total() const { return LogAdd(blank, non_blank); }
  };
  std::map<LabelSeq, Score> hyps;
  hyps[{}].blank = 0.0;
  const Eigen::Index vocab = log_probs.cols();
  for (Eigen::Index t = 0; t < log_probs.rows(); ++t) {
    std::map<LabelSeq, Score> next;
    for (const auto& [prefix, score] : hyps) {
      const double total = score.Total();
      // Stay on the same prefix by emitting blank.
      Score& same = next[prefix];
      same.blank = LogAdd(same.blank, total + log_probs(t, kBlank));
      for (Eigen::Index c = 1; c < vocab; ++c) {
        const double y = log_probs(t, c);
        if (y == kLogZero) continue;
        const int label = static_cast<int>(c);
        if (!prefix.empty() && prefix.back() == label) {
          // Repeat without a blank collapses into the same prefix.
          Score& s = next[prefix];
          s.non_blank = LogAdd(s.non_blank, score.non_blank + y);
          LabelSeq extended = prefix;
          extended.push_back(label);
          Score& e = next[extended];
          e.non_blank = LogAdd(e.non_blank, score.blank + y);
        } else {
          LabelSeq extended = prefix;
          extended.push_back(label);
          Score& e = next[extended];
          e.non_blank = LogAdd(e.non_blank, total + y);
        }
      }
    }
    std::vector<std::pair<LabelSeq, Score>> ranked(next.begin(), next.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.second.Total() > b.second.Total();
    });
    if (ranked.size() > static_cast<std::size_t>(beam)) ranked.resize(beam);
    hyps = std::map<LabelSeq, Score>(ranked.begin(), ranked.end());
  }
  const LabelSeq* best = nullptr;
  double best_score = kLogZero;
  for (const auto& [prefix, score] : hyps) {
    if (!best || score.Total() > best_score) {
      best = &prefix;
      best_score = score.Total();
    }
  }
  return best ? *best : LabelSeq{};
}

}  // namespace xdasr
