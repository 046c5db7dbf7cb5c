// Copyright 2026 The sublab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sublab/core/dataset.hpp"

namespace sublab {

Dataset Dataset::permuted(const std::vector<std::size_t>& perm) const {
  if (perm.size() != n()) throw std::invalid_argument("Dataset::permuted: size mismatch");
  Dataset out;
  out.covariates.resize(covariates.rows(), covariates.cols());
  out.responses.resize(responses.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out.covariates.row(static_cast<Eigen::Index>(i)) =
        covariates.row(static_cast<Eigen::Index>(perm[i]));
    out.responses[static_cast<Eigen::Index>(i)] =
        responses[static_cast<Eigen::Index>(perm[i])];
  }
  out.true_param = true_param;
  return out;
}

}  // namespace sublab
