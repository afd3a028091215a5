// tests/oracles.h
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

// Slow reference implementations used only by the tests.

#ifndef XDASR_TESTS_ORACLES_H_
#define XDASR_TESTS_ORACLES_H_

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace xdasr::oracle {

/// |sum_t x_t e^{-2 pi i k t / N}|^2 for k = 0..N/2.
inline Eigen::VectorXd NaiveDftPower(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd out(n / 2 + 1);
  for (Eigen::Index k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0;
    for (Eigen::Index t = 0; t < n; ++t)
      acc += x(t) * std::polar(1.0, -2.0 * M_PI * double(k) * double(t) / double(n));
    out(k) = std::norm(acc);
  }
  return out;
}

/// Linear convolution truncated to x.size().
inline Eigen::VectorXd NaiveConvolve(const Eigen::VectorXd& x, const Eigen::VectorXd& h) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index n = 0; n < x.size(); ++n)
    for (Eigen::Index k = 0; k < h.size() && k <= n; ++k) y(n) += h(k) * x(n - k);
  return y;
}

/// Minimum unit-cost edit distance by exhaustive recursion over alignments.
inline int ExhaustiveEditDistance(const std::vector<int>& a, const std::vector<int>& b,
                                  std::size_t i = 0, std::size_t j = 0) {
  if (i == a.size()) return static_cast<int>(b.size() - j);
  if (j == b.size()) return static_cast<int>(a.size() - i);
  const int sub = (a[i] != b[j]) + ExhaustiveEditDistance(a, b, i + 1, j + 1);
  const int del = 1 + ExhaustiveEditDistance(a, b, i + 1, j);
  const int ins = 1 + ExhaustiveEditDistance(a, b, i, j + 1);
  return std::min({sub, del, ins});
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenvalues are
/// returned in decreasing order with matching eigenvector columns.
inline void JacobiEigen(Eigen::MatrixXd a, Eigen::VectorXd* values, Eigen::MatrixXd* vectors) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  std::vector<Eigen::Index> idx(n);
  for (Eigen::Index i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return a(x, x) > a(y, y); });
  values->resize(n);
  vectors->resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    (*values)(i) = a(idx[i], idx[i]);
    vectors->col(i) = v.col(idx[i]);
  }
}

/// CTC negative log-likelihood by enumerating all V^T frame paths, with blank
/// id 0. Infinity when no path collapses to the labels.
inline double PathSumCtc(const Eigen::MatrixXd& log_probs, const std::vector<int>& labels) {
  const Eigen::Index t = log_probs.rows(), v = log_probs.cols();
  std::vector<int> path(static_cast<std::size_t>(t), 0);
  long double total = 0;
  while (true) {
    std::vector<int> collapsed;
    int prev = -1;
    for (int s : path) {
      if (s != prev && s != 0) collapsed.push_back(s);
      prev = s;
    }
    if (collapsed == labels) {
      long double lp = 0;
      for (Eigen::Index i = 0; i < t; ++i) lp += log_probs(i, path[static_cast<std::size_t>(i)]);
      total += std::exp(lp);
    }
    std::size_t k = 0;
    while (k < path.size() && ++path[k] == v) path[k++] = 0;
    if (k == path.size()) break;
  }
  return total > 0 ? -static_cast<double>(std::log(total)) : std::numeric_limits<double>::infinity();
}

/// Central difference of f at x along coordinate i.
inline double CentralDifference(const std::function<double(const Eigen::VectorXd&)>& f,
                                Eigen::VectorXd x, Eigen::Index i, double h) {
  const double x0 = x(i);
  x(i) = x0 + h;
  const double up = f(x);
  x(i) = x0 - h;
  const double down = f(x);
  return (up - down) / (2 * h);
}

}  // namespace xdasr::oracle

#endif  // XDASR_TESTS_ORACLES_H_
