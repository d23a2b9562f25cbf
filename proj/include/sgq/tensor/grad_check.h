// Copyright 2026 The SGQ Map Authors
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

#ifndef SGQ_TENSOR_GRAD_CHECK_H_
#define SGQ_TENSOR_GRAD_CHECK_H_

#include <cstdint>
#include <functional>

#include "sgq/tensor/tensor.h"

namespace sgq {

struct GradCheckReport {
  double max_relative_error = 0.0;
  double mean_relative_error = 0.0;
  std::int64_t worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::int64_t checked = 0;
};

// Relative error |a - b| / max(|a|, |b|, 1e-8).
double relative_error(double a, double b);

// Compares the tape gradient of `loss` with respect to `param` (a leaf that
// requires grad, read by `loss` on every call) against central differences
// with step h. `param` is perturbed in place and restored.
// `max_entries` > 0 checks an evenly strided subset.
GradCheckReport grad_check(const std::function<Tensor<double>()>& loss,
                           Tensor<double> param, double h = 1e-6,
                           std::int64_t max_entries = 0);

// Convenience form for a function of one input tensor.
GradCheckReport grad_check(
    const std::function<Tensor<double>(const Tensor<double>&)>& f,
    const Tensor<double>& input, double h = 1e-6);

}  // namespace sgq

#endif  // SGQ_TENSOR_GRAD_CHECK_H_
