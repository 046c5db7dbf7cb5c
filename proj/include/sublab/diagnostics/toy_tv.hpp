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

#ifndef SUBLAB_DIAGNOSTICS_TOY_TV_HPP_
#define SUBLAB_DIAGNOSTICS_TOY_TV_HPP_

#include <cstddef>

#include "sublab/core/dataset.hpp"
#include "sublab/models/toy.hpp"

namespace sublab::diagnostics {

struct SubsampleTv {
  std::size_t n = 0;
  std::size_t m = 0;
  double closed_form = 0.0;
  double quadrature = 0.0;
};

/// TV between the posterior given all observations and the posterior given
/// the first m, in closed form and by 1-D quadrature.
SubsampleTv subsample_posterior_tv(const models::ToyModel& model, const Dataset& data,
                                   std::size_t m, double tolerance = 1e-9);

/// ceil(sqrt(n)).
std::size_t sqrt_subsample_size(std::size_t n);

}  // namespace sublab::diagnostics

#endif  // SUBLAB_DIAGNOSTICS_TOY_TV_HPP_
