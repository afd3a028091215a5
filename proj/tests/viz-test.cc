// tests/viz-test.cc
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

#include <random>
#include <regex>
#include <set>

#include "doctest.h"
#include "oracles.h"
#include "xdasr/viz.h"

using namespace xdasr;

namespace {

Eigen::MatrixXd Gaussian(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, 1);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = g(rng);
  return x;
}

DomainFrames Domain(const std::string& name, std::vector<Eigen::Index> lengths,
                    std::uint64_t seed) {
  DomainFrames d{name, {}};
  for (auto t : lengths) {
    FeatureMatrix f;
    f.data = Gaussian(t, 3, seed++);
    d.features.push_back(f);
  }
  return d;
}

}  // namespace

TEST_CASE("frame sampling") {
  const std::vector<DomainFrames> doms = {Domain("a", {4000, 4000, 4000}, 1),
                                          Domain("b", {5000, 6000}, 10),
                                          Domain("c", {3000, 7001}, 20)};
  std::vector<std::string> warn;
  const LabeledFrames s = SampleFrames(doms, 10000, 5, &warn);
  CHECK(s.frames.rows() == 30000);
  CHECK(warn.empty());
  CHECK(std::count(s.domain.begin(), s.domain.end(), "b") == 10000);
  const LabeledFrames again = SampleFrames(doms, 10000, 5);
  CHECK(again.frames == s.frames);
  // Without replacement: no duplicated rows within a domain.
  std::set<double> firsts;
  for (Eigen::Index i = 0; i < 10000; ++i) firsts.insert(s.frames(i, 0));
  CHECK(firsts.size() == 10000);
  const LabeledFrames small = SampleFrames({Domain("a", {50}, 1), Domain("b", {60}, 2)}, 100, 5, &warn);
  CHECK(small.frames.rows() == 110);
  CHECK(warn.size() == 2);
  CHECK_THROWS_AS(SampleFrames({Domain("a", {10}, 1), DomainFrames{"b", {}}}, 5, 1), Error);
}

TEST_CASE("pca on simple data") {
  Eigen::MatrixXd line(50, 2);
  for (int i = 0; i < 50; ++i) line.row(i) << 0.5 * i, 1.5 * i;
  const Projector p = PcaFit(line, 2);
  CHECK(std::abs(std::abs(p.axes.col(0).dot(Eigen::Vector2d(1, 3).normalized())) - 1) < 1e-9);
  CHECK(p.variances(1) < 1e-9 * p.variances(0));
  CHECK(std::abs(p.axes.col(0).dot(p.axes.col(1))) < 1e-9);

  const Projector iso = PcaFit(Gaussian(10000, 5, 3), 5);
  for (int k = 0; k < 5; ++k) CHECK(std::abs(iso.explained_fraction(k) - 0.2) <= 0.02);
  CHECK_THROWS_AS(PcaFit(Gaussian(2, 5, 1), 2), Error);
  CHECK_THROWS_AS(PcaFit(Gaussian(20, 1, 1), 2), Error);
}

TEST_CASE("pca matches jacobi oracle") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index d = 3 + trial * 17 % 18;
    // Anisotropic data with a clear spectrum.
    Eigen::MatrixXd x = Gaussian(400, d, 100 + trial);
    for (Eigen::Index j = 0; j < d; ++j) x.col(j) *= 1.0 + 3.0 * j;
    const Eigen::MatrixXd rot = Eigen::HouseholderQR<Eigen::MatrixXd>(Gaussian(d, d, 200 + trial))
                                    .householderQ();
    x = x * rot.transpose();
    const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    oracle::JacobiEigen(c.transpose() * c / double(x.rows() - 1), &values, &vectors);
    const int k = 2;
    const Projector p = PcaFit(x, k);
    CHECK((p.axes.transpose() * p.axes - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(p.variances(0) >= p.variances(1));
    for (int j = 0; j < k; ++j) {
      CHECK(std::abs(std::abs(p.axes.col(j).dot(vectors.col(j))) - 1) < 1e-6);
      CHECK(p.variances(j) == doctest::Approx(values(j)).epsilon(1e-8));
    }
    // Principal angles between the two subspaces.
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(p.axes.transpose() * vectors.leftCols(k));
    const double min_cos = svd.singularValues().minCoeff();
    CHECK(std::acos(std::min(1.0, min_cos)) < 1e-4);
  }
}

TEST_CASE("projection") {
  const Eigen::MatrixXd x = Gaussian(300, 4, 8);
  const Projector p = PcaFit(x, 2);
  CHECK(Project(p, p.mean.transpose()).norm() < 1e-12);
  const Eigen::MatrixXd y = Project(p, x);
  CHECK(y.cols() == 2);
  // Inner products along kept axes are preserved by reconstruction.
  const Eigen::MatrixXd recon = (y * p.axes.transpose()).rowwise() + p.mean.transpose();
  CHECK((Project(p, recon) - y).cwiseAbs().maxCoeff() < 1e-10);
  const Eigen::MatrixXd centered = x.rowwise() - p.mean.transpose();
  const Eigen::MatrixXd sub = centered * p.axes * p.axes.transpose();
  CHECK(((sub * sub.transpose()) - (y * y.transpose())).cwiseAbs().maxCoeff() < 1e-9);
  CHECK_THROWS_AS(Project(p, Gaussian(3, 5, 1)), Error);
}

TEST_CASE("domain separation") {
  const Eigen::MatrixXd a = Gaussian(500, 2, 1);
  Eigen::MatrixXd same(1000, 2);
  same << a, a;
  std::vector<std::string> lab(1000, "a");
  std::fill(lab.begin() + 500, lab.end(), "b");
  CHECK(DomainSeparation(same, lab) == doctest::Approx(0.0));

  Eigen::MatrixXd shifted(40000, 2);
  shifted << Gaussian(20000, 2, 2), Gaussian(20000, 2, 3);
  shifted.bottomRows(20000).col(0).array() += 10.0;
  std::vector<std::string> lab2(40000, "a");
  std::fill(lab2.begin() + 20000, lab2.end(), "b");
  CHECK(DomainSeparation(shifted, lab2) == doctest::Approx(10.0).epsilon(0.03));

  const double base = DomainSeparation(shifted, lab2);
  const double th = 0.7;
  Eigen::Matrix2d r;
  r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  Eigen::MatrixXd moved = (shifted * r.transpose()).rowwise() + Eigen::RowVector2d(3, -4);
  CHECK(DomainSeparation(moved, lab2) == doctest::Approx(base).epsilon(1e-9));
  Eigen::MatrixXd translated = shifted.rowwise() + Eigen::RowVector2d(100, 7);
  CHECK(DomainSeparation(translated, lab2) == doctest::Approx(base).epsilon(1e-9));
  CHECK_THROWS_AS(DomainSeparation(a, std::vector<std::string>(500, "x")), Error);
}

TEST_CASE("scatter output") {
  const Eigen::MatrixXd none(0, 2);
  const std::string empty = ScatterSvg(none, {});
  CHECK(empty.find("<svg") != std::string::npos);
  CHECK(empty.find("</svg>") != std::string::npos);
  CHECK(ScatterCsv(none, {}) == "x,y,domain\n");
  const Eigen::MatrixXd pts = Gaussian(30, 2, 9);
  std::vector<std::string> dom;
  for (int i = 0; i < 30; ++i)
    dom.push_back(i % 3 == 0 ? "conversational" : i % 3 == 1 ? "broadcast" : "scripted");
  const std::string svg = ScatterSvg(pts, dom);
  CHECK(svg == ScatterSvg(pts, dom));
  CHECK(svg.find("width=\"800\" height=\"800\"") != std::string::npos);
  std::set<std::string> colors;
  const std::regex fill("<g fill=\"(#[0-9a-f]{6})\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), fill); it != std::sregex_iterator(); ++it)
    colors.insert((*it)[1]);
  CHECK(colors.size() == 3);
  CHECK(DomainColor("conversational") == "#d62728");
  const std::string csv = ScatterCsv(pts, dom);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 31);
}
