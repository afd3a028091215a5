// include/xdasr/scoring.h
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

// Phone error rate scoring and train x test PER matrices.

#ifndef XDASR_SCORING_H_
#define XDASR_SCORING_H_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xdasr/common.h"
#include "xdasr/manifest.h"

namespace xdasr {

struct EditCounts {
  long substitutions = 0;
  long insertions = 0;
  long deletions = 0;
  long Total() const { return substitutions + insertions + deletions; }
};

/// Unit-cost Levenshtein alignment. Among minimal alignments the backtrace
/// prefers substitutions over insertion + deletion pairs.
template <typename T>
EditCounts EditDistance(const std::vector<T>& ref, const std::vector<T>& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::vector<long>> cost(n + 1, std::vector<long>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) cost[i][0] = static_cast<long>(i);
  for (std::size_t j = 0; j <= m; ++j) cost[0][j] = static_cast<long>(j);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      cost[i][j] = std::min({cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1),
                             cost[i - 1][j] + 1, cost[i][j - 1] + 1});
  EditCounts e;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        cost[i][j] == cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++e.substitutions;
      --i;
      --j;
    } else if (i > 0 && cost[i][j] == cost[i - 1][j] + 1) {
      ++e.deletions;
      --i;
    } else {
      ++e.insertions;
      --j;
    }
  }
  return e;
}

struct PerReport {
  long substitutions = 0;
  long insertions = 0;
  long deletions = 0;
  long ref_length = 0;
  double per = 0;  // percent
};

/// Default non-scored markers of the synthetic phone set.
const std::set<std::string>& DefaultFilterTags();

/// Corpus-level PER: total edits over total reference length, after
/// removing filter_tags from both sides. Hypotheses are matched by id.
PerReport ComputePer(const Manifest& refs, const Manifest& hyps,
                     const std::set<std::string>& filter_tags = DefaultFilterTags());

/// 100 * (baseline - proposed) / baseline.
double RelativeImprovement(double baseline_per, double new_per);

struct PerMatrix {
  std::string model;
  std::vector<std::string> rows;  // training corpora
  std::vector<std::string> cols;  // test corpora
  std::vector<std::vector<std::optional<PerReport>>> cells;

  PerMatrix() = default;
  PerMatrix(std::string model, std::vector<std::string> rows, std::vector<std::string> cols);
  std::optional<PerReport>& at(std::size_t r, std::size_t c) { return cells.at(r).at(c); }
  const std::optional<PerReport>& at(std::size_t r, std::size_t c) const {
    return cells.at(r).at(c);
  }
  std::optional<double> Per(std::size_t r, std::size_t c) const;
};

/// Aligned plain-text grid, one decimal place, "-" for absent cells.
std::string RenderMatrix(const PerMatrix& m);

/// train_corpus,test_corpus,per,S,I,D,N
std::string MatrixToCsv(const PerMatrix& m);

/// Cell-wise relative improvement of proposed over baseline.
struct ImprovementTable {
  std::vector<std::string> rows, cols;
  std::vector<std::vector<std::optional<double>>> cells;
  std::vector<std::vector<bool>> cross_domain;
};

/// cross_domain(r, c) is true when rows[r] != cols[c].
ImprovementTable CompareRuns(const PerMatrix& baseline, const PerMatrix& proposed);
std::string RenderImprovements(const ImprovementTable& t);

}  // namespace xdasr

#endif  // XDASR_SCORING_H_
