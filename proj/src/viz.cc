// src/viz.cc
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

#include "xdasr/viz.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace xdasr {

LabeledFrames SampleFrames(const std::vector<DomainFrames>& domains,
                           Eigen::Index n_per_domain, std::uint64_t seed,
                           std::vector<std::string>* warnings) {
  if (domains.empty()) throw Error("sample frames: no domains");
  LabeledFrames out;
  Eigen::Index dim = -1;
  std::vector<std::pair<const DomainFrames*, std::vector<std::pair<int, Eigen::Index>>>> picks;
  Eigen::Index total = 0;
  for (const auto& d : domains) {
    std::vector<std::pair<int, Eigen::Index>> index;
    for (std::size_t u = 0; u < d.features.size(); ++u) {
      const auto& f = d.features[u];
      if (f.Frames() == 0) continue;
      if (dim < 0) dim = f.Dims();
      if (f.Dims() != dim) throw Error("sample frames: dimension mismatch in " + d.domain);
      for (Eigen::Index t = 0; t < f.Frames(); ++t) index.emplace_back(static_cast<int>(u), t);
    }
    if (index.empty()) throw Error("sample frames: domain " + d.domain + " is empty");
    const auto n = static_cast<Eigen::Index>(index.size());
    if (n <= n_per_domain) {
      if (n < n_per_domain && warnings)
        warnings->push_back("domain " + d.domain + " has only " + std::to_string(n) +
                            " frames; taking all");
    } else {
      std::mt19937_64 rng(DeriveSeed(seed, "sample:" + d.domain));
      // Partial Fisher-Yates: first n_per_domain entries are the sample.
      for (Eigen::Index i = 0; i < n_per_domain; ++i) {
        std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
        std::swap(index[i], index[pick(rng)]);
      }
      index.resize(n_per_domain);
    }
    total += static_cast<Eigen::Index>(index.size());
    picks.emplace_back(&d, std::move(index));
  }
  out.frames.resize(total, dim);
  Eigen::Index row = 0;
  for (const auto& [d, index] : picks)
    for (const auto& [u, t] : index) {
      out.frames.row(row++) = d->features[u].data.row(t);
      out.domain.push_back(d->domain);
    }
  return out;
}

Projector PcaFit(const Eigen::Ref<const Eigen::MatrixXd>& x, int k, const PcaOptions& opts) {
  const Eigen::Index n = x.rows(), d = x.cols();
  if (k < 0 || d < k) throw Error("pca: need D >= k");
  if (n < k + 1) throw Error("pca: need at least k+1 frames");
  Projector p;
  p.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - p.mean.transpose();
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  const double total = cov.trace();
  const double floor = 1e-12 * std::max(1.0, total);
  p.axes.setZero(d, k);
  p.variances.setZero(k);
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> gauss;
  int found = 0;
  for (; found < k; ++found) {
    if (cov.trace() <= floor) break;
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = gauss(rng);
    v -= p.axes.leftCols(found) * (p.axes.leftCols(found).transpose() * v);
    v.normalize();
    double lambda = 0, residual = 0;
    bool converged = false;
    for (int it = 0; it < opts.max_iterations; ++it) {
      Eigen::VectorXd w = cov * v;
      w -= p.axes.leftCols(found) * (p.axes.leftCols(found).transpose() * w);
      lambda = v.dot(w);
      const double norm = w.norm();
      if (norm <= floor) {
        lambda = 0;
        converged = true;
        break;
      }
      residual = (w - lambda * v).norm() / std::max(norm, 1e-300);
      w /= norm;
      if (w.dot(v) < 0) w = -w;
      v = w;
      if (residual < opts.tolerance) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      char msg[128];
      std::snprintf(msg, sizeof(msg),
                    "pca: power iteration did not converge on axis %d (residual %.3e)", found,
                    residual);
      throw Error(msg);
    }
    if (lambda <= floor) break;
    p.axes.col(found) = v;
    p.variances(found) = lambda;
    cov -= lambda * v * v.transpose();
  }
  // Rank-deficient remainder: complete an orthonormal basis.
  for (Eigen::Index i = 0; found < k && i < d; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(d, i);
    e -= p.axes.leftCols(found) * (p.axes.leftCols(found).transpose() * e);
    if (e.norm() < 1e-6) continue;
    p.axes.col(found++) = e.normalized();
  }
  p.explained_fraction = total > 0 ? Eigen::VectorXd(p.variances / total)
                                   : Eigen::VectorXd::Zero(k);
  return p;
}

Eigen::MatrixXd Project(const Projector& p, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  if (x.cols() != p.InputDim())
    throw Error("project: expected " + std::to_string(p.InputDim()) + " dims, got " +
                std::to_string(x.cols()));
  return (x.rowwise() - p.mean.transpose()) * p.axes;
}

double DomainSeparation(const Eigen::Ref<const Eigen::MatrixXd>& points,
                        const std::vector<std::string>& domain) {
  if (points.rows() != static_cast<Eigen::Index>(domain.size()))
    throw Error("domain separation: label count mismatch");
  std::map<std::string, std::vector<Eigen::Index>> groups;
  for (std::size_t i = 0; i < domain.size(); ++i) groups[domain[i]].push_back(i);
  if (groups.size() < 2) throw Error("domain separation: need at least 2 domains");
  const Eigen::Index d = points.cols();
  std::vector<Eigen::VectorXd> centroids;
  Eigen::VectorXd within = Eigen::VectorXd::Zero(d);
  for (const auto& [name, rows] : groups) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
    for (auto r : rows) c += points.row(r).transpose();
    c /= static_cast<double>(rows.size());
    for (auto r : rows) within += (points.row(r).transpose() - c).array().square().matrix();
    centroids.push_back(std::move(c));
  }
  const auto dof = static_cast<double>(points.rows()) - static_cast<double>(groups.size());
  if (dof <= 0) throw Error("domain separation: not enough points");
  const double pooled_sd = std::sqrt(within.sum() / dof / static_cast<double>(d));
  double dist = 0;
  int pairs = 0;
  for (std::size_t a = 0; a < centroids.size(); ++a)
    for (std::size_t b = a + 1; b < centroids.size(); ++b, ++pairs)
      dist += (centroids[a] - centroids[b]).norm();
  dist /= pairs;
  if (pooled_sd <= 0) return dist > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  return dist / pooled_sd;
}

Eigen::MatrixXd GlobalStandardize(const Eigen::Ref<const Eigen::MatrixXd>& x) {
  if (x.rows() == 0) return x;
  const Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::MatrixXd out = x.rowwise() - mean;
  const Eigen::RowVectorXd sd =
      (out.array().square().colwise().sum() / static_cast<double>(x.rows())).sqrt();
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    if (sd(c) > 1e-12) out.col(c) /= sd(c);
  return out;
}

std::string DomainColor(const std::string& domain) {
  if (domain == "conversational") return "#d62728";
  if (domain == "broadcast") return "#2ca02c";
  if (domain == "scripted") return "#1f77b4";
  static const char* palette[] = {"#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return palette[Fnv1a64(domain) % 5];
}

namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string XmlEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string ScatterSvg(const Eigen::Ref<const Eigen::MatrixXd>& points,
                       const std::vector<std::string>& domain, const std::string& title) {
  if (points.rows() != static_cast<Eigen::Index>(domain.size()))
    throw Error("scatter: label count mismatch");
  if (points.rows() > 0 && points.cols() != 2) throw Error("scatter: points must be n x 2");
  constexpr double kSize = 800, kMargin = 40;
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" "
         "height=\"800\" viewBox=\"0 0 800 800\">\n"
      << "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
  if (!title.empty())
    svg << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">"
        << XmlEscape(title) << "</text>\n";
  if (points.rows() > 0) {
    const Eigen::RowVector2d lo = points.colwise().minCoeff();
    const Eigen::RowVector2d hi = points.colwise().maxCoeff();
    const Eigen::RowVector2d span = (hi - lo).cwiseMax(1e-12);
    const double scale = (kSize - 2 * kMargin);
    std::vector<std::string> order;
    for (const auto& d : domain)
      if (std::find(order.begin(), order.end(), d) == order.end()) order.push_back(d);
    for (const auto& name : order) {
      svg << "<g fill=\"" << DomainColor(name) << "\" fill-opacity=\"0.5\">\n";
      for (Eigen::Index i = 0; i < points.rows(); ++i) {
        if (domain[i] != name) continue;
        const double x = kMargin + scale * (points(i, 0) - lo(0)) / span(0);
        const double y = kSize - kMargin - scale * (points(i, 1) - lo(1)) / span(1);
        svg << "<circle cx=\"" << Num(x) << "\" cy=\"" << Num(y) << "\" r=\"1.5\"/>\n";
      }
      svg << "</g>\n";
    }
    double ly = 50;
    for (const auto& name : order) {
      svg << "<text x=\"" << Num(kSize - 200) << "\" y=\"" << Num(ly) << "\" fill=\""
          << DomainColor(name) << "\" font-family=\"sans-serif\" font-size=\"14\">"
          << XmlEscape(name) << "</text>\n";
      ly += 20;
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string ScatterCsv(const Eigen::Ref<const Eigen::MatrixXd>& points,
                       const std::vector<std::string>& domain) {
  if (points.rows() != static_cast<Eigen::Index>(domain.size()))
    throw Error("scatter: label count mismatch");
  std::ostringstream csv;
  csv << "x,y,domain\n";
  char buf[64];
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g,", points(i, 0), points(i, 1));
    csv << buf << domain[i] << '\n';
  }
  return csv.str();
}

void EmitScatter(const Eigen::Ref<const Eigen::MatrixXd>& points,
                 const std::vector<std::string>& domain, const std::string& path,
                 const std::string& title) {
  const std::string svg = ScatterSvg(points, domain, title);
  const std::string csv = ScatterCsv(points, domain);
  WriteFileBytes(path + ".svg", svg);
  WriteFileBytes(path + ".csv", csv);
}

}  // namespace xdasr
