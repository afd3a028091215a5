// src/scoring.cc
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

#include "xdasr/scoring.h"

#include <cstdio>
#include <map>
#include <sstream>

#include "xdasr/common.h"

namespace xdasr {

const std::set<std::string>& DefaultFilterTags() {
  static const std::set<std::string> tags = {"sil", "nsn", "<noise>", "<spnoise>"};
  return tags;
}

PerReport ComputePer(const Manifest& refs, const Manifest& hyps,
                     const std::set<std::string>& filter_tags) {
  if (refs.size() != hyps.size())
    throw Error("per: " + std::to_string(refs.size()) + " references but " +
                std::to_string(hyps.size()) + " hypotheses");
  std::map<std::string, const ManifestEntry*> by_id;
  for (const auto& h : hyps) by_id[h.utterance] = &h;
  auto filtered = [&](const std::vector<std::string>& labels) {
    std::vector<std::string> out;
    for (const auto& l : labels)
      if (!filter_tags.count(l)) out.push_back(l);
    return out;
  };
  PerReport r;
  for (const auto& ref : refs) {
    auto it = by_id.find(ref.utterance);
    if (it == by_id.end()) throw Error("per: no hypothesis for " + ref.utterance);
    const auto rl = filtered(ref.labels);
    const EditCounts e = EditDistance(rl, filtered(it->second->labels));
    r.substitutions += e.substitutions;
    r.insertions += e.insertions;
    r.deletions += e.deletions;
    r.ref_length += static_cast<long>(rl.size());
  }
  if (r.ref_length == 0) throw Error("no reference frames");
  r.per = 100.0 * (r.substitutions + r.insertions + r.deletions) / r.ref_length;
  return r;
}

double RelativeImprovement(double baseline_per, double new_per) {
  if (!(baseline_per > 0)) throw Error("relative improvement: baseline PER must be > 0");
  return 100.0 * (baseline_per - new_per) / baseline_per;
}

PerMatrix::PerMatrix(std::string model_name, std::vector<std::string> row_ids,
                     std::vector<std::string> col_ids)
    : model(std::move(model_name)), rows(std::move(row_ids)), cols(std::move(col_ids)) {
  cells.assign(rows.size(), std::vector<std::optional<PerReport>>(cols.size()));
}

std::optional<double> PerMatrix::Per(std::size_t r, std::size_t c) const {
  const auto& cell = at(r, c);
  if (!cell) return std::nullopt;
  return cell->per;
}

namespace {

std::string Fixed1(double v, bool sign = false) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), sign ? "%+.1f" : "%.1f", v);
  return buf;
}

std::string Grid(const std::string& corner, const std::vector<std::string>& rows,
                 const std::vector<std::string>& cols,
                 const std::vector<std::vector<std::string>>& text) {
  std::size_t w0 = corner.size();
  for (const auto& r : rows) w0 = std::max(w0, r.size());
  std::vector<std::size_t> w(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    w[c] = cols[c].size();
    for (const auto& row : text) w[c] = std::max(w[c], row[c].size());
  }
  auto pad = [](const std::string& s, std::size_t width) {
    return s + std::string(width - s.size(), ' ');
  };
  std::ostringstream out;
  out << pad(corner, w0);
  for (std::size_t c = 0; c < cols.size(); ++c) out << " | " << pad(cols[c], w[c]);
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << pad(rows[r], w0);
    for (std::size_t c = 0; c < cols.size(); ++c) out << " | " << pad(text[r][c], w[c]);
    out << '\n';
  }
  return out.str();
}

}  // namespace

std::string RenderMatrix(const PerMatrix& m) {
  std::vector<std::vector<std::string>> text(m.rows.size());
  for (std::size_t r = 0; r < m.rows.size(); ++r)
    for (std::size_t c = 0; c < m.cols.size(); ++c) {
      const auto v = m.Per(r, c);
      text[r].push_back(v ? Fixed1(*v) : "-");
    }
  return Grid("train \\ test", m.rows, m.cols, text);
}

std::string MatrixToCsv(const PerMatrix& m) {
  std::ostringstream out;
  out << "train_corpus,test_corpus,per,S,I,D,N\n";
  for (std::size_t r = 0; r < m.rows.size(); ++r)
    for (std::size_t c = 0; c < m.cols.size(); ++c) {
      out << m.rows[r] << ',' << m.cols[c] << ',';
      if (const auto& cell = m.at(r, c)) {
        char per[32];
        std::snprintf(per, sizeof(per), "%.4f", cell->per);
        out << per << ',' << cell->substitutions << ',' << cell->insertions << ','
            << cell->deletions << ',' << cell->ref_length;
      } else {
        out << "-,-,-,-,-";
      }
      out << '\n';
    }
  return out.str();
}

ImprovementTable CompareRuns(const PerMatrix& baseline, const PerMatrix& proposed) {
  if (baseline.rows != proposed.rows || baseline.cols != proposed.cols)
    throw Error("compare: matrices cover different train/test grids");
  ImprovementTable t;
  t.rows = baseline.rows;
  t.cols = baseline.cols;
  t.cells.assign(t.rows.size(), std::vector<std::optional<double>>(t.cols.size()));
  t.cross_domain.assign(t.rows.size(), std::vector<bool>(t.cols.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.cols.size(); ++c) {
      t.cross_domain[r][c] = t.rows[r] != t.cols[c];
      const auto b = baseline.Per(r, c);
      const auto p = proposed.Per(r, c);
      if (b && p && *b > 0) t.cells[r][c] = RelativeImprovement(*b, *p);
    }
  return t;
}

std::string RenderImprovements(const ImprovementTable& t) {
  std::vector<std::vector<std::string>> text(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.cols.size(); ++c) {
      std::string cell = t.cells[r][c] ? Fixed1(*t.cells[r][c], true) + "%" : "-";
      if (t.cross_domain[r][c]) cell += " *";
      text[r].push_back(cell);
    }
  return Grid("train \\ test", t.rows, t.cols, text) + "(* cross-domain)\n";
}

}  // namespace xdasr
