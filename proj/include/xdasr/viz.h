// include/xdasr/viz.h
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

// Frame sampling, PCA by power iteration, domain-separation statistic and
// scatter output.

#ifndef XDASR_VIZ_H_
#define XDASR_VIZ_H_

#include <string>
#include <vector>

#include "xdasr/common.h"
#include "xdasr/dsp.h"

namespace xdasr {

struct LabeledFrames {
  SeqMatrixd frames;                // N x D
  std::vector<std::string> domain;  // N labels
};

struct DomainFrames {
  std::string domain;
  std::vector<FeatureMatrix> features;
};

/// Seeded uniform sample without replacement of n_per_domain frames from each
/// domain. Smaller domains are taken whole and reported in *warnings.
LabeledFrames SampleFrames(const std::vector<DomainFrames>& domains,
                           Eigen::Index n_per_domain, std::uint64_t seed,
                           std::vector<std::string>* warnings = nullptr);

struct PcaOptions {
  double tolerance = 1e-10;
  int max_iterations = 10000;
};

struct Projector {
  Eigen::VectorXd mean;
  Eigen::MatrixXd axes;               // D x k, orthonormal columns
  Eigen::VectorXd variances;          // k, non-increasing
  Eigen::VectorXd explained_fraction; // variances / total variance

  Eigen::Index InputDim() const { return mean.size(); }
  Eigen::Index OutputDim() const { return axes.cols(); }
};

/// Top-k principal axes of the rows of x by power iteration with deflation
/// on the sample covariance. Once the covariance is exhausted the remaining
/// axes are completed by Gram-Schmidt with zero variance.
Projector PcaFit(const Eigen::Ref<const Eigen::MatrixXd>& x, int k,
                 const PcaOptions& opts = {});

Eigen::MatrixXd Project(const Projector& p, const Eigen::Ref<const Eigen::MatrixXd>& x);

/// Mean pairwise distance between per-domain centroids divided by the pooled
/// within-domain standard deviation, sqrt(trace(S_within) / D), which keeps
/// the ratio invariant under rotations.
double DomainSeparation(const Eigen::Ref<const Eigen::MatrixXd>& points,
                        const std::vector<std::string>& domain);

/// Zero mean, unit variance per column over all rows. Constant columns are
/// only centred.
Eigen::MatrixXd GlobalStandardize(const Eigen::Ref<const Eigen::MatrixXd>& x);

/// Fixed colors: conversational red, broadcast green, scripted blue; other
/// domains cycle through a fixed palette.
std::string DomainColor(const std::string& domain);

std::string ScatterSvg(const Eigen::Ref<const Eigen::MatrixXd>& points,
                       const std::vector<std::string>& domain,
                       const std::string& title = "");
std::string ScatterCsv(const Eigen::Ref<const Eigen::MatrixXd>& points,
                       const std::vector<std::string>& domain);

/// Writes <path>.svg and <path>.csv.
void EmitScatter(const Eigen::Ref<const Eigen::MatrixXd>& points,
                 const std::vector<std::string>& domain, const std::string& path,
                 const std::string& title = "");

}  // namespace xdasr

#endif  // XDASR_VIZ_H_
