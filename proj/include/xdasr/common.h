// include/xdasr/common.h
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

#ifndef XDASR_COMMON_H_
#define XDASR_COMMON_H_

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace xdasr {

/// Every recoverable failure in the toolkit is reported as an xdasr::Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sequence data (frames x dims) is stored row-major so a frame is contiguous.
template <typename Scalar>
using SeqMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using SeqMatrixd = SeqMatrix<double>;
using SeqMatrixf = SeqMatrix<float>;

/// Number of worker threads, from XDASR_THREADS (default: hardware threads).
int NumThreads();

/// Runs fn(i) for i in [0, n). Each index is visited exactly once; callers
/// write results into per-index slots so output never depends on scheduling.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn);

/// 64-bit FNV-1a.
std::uint64_t Fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string HexDigest(std::uint64_t h);

/// Derives a child seed from a parent seed and a label, stable across runs.
std::uint64_t DeriveSeed(std::uint64_t parent, std::string_view label);

std::string ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::string_view bytes);

}  // namespace xdasr

#endif  // XDASR_COMMON_H_
