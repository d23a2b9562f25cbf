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

#include "sgq/tensor/grad_check.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgq {

double relative_error(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / denom;
}

GradCheckReport grad_check(const std::function<Tensor<double>()>& loss,
                           Tensor<double> param, double h,
                           std::int64_t max_entries) {
  if (!param.requires_grad()) {
    throw std::invalid_argument("grad_check: parameter does not require grad");
  }
  std::vector<double> analytic;
  {
    Tape<double> tape;
    Tensor<double> l = loss();
    GradientMap<double> grads = tape.backward(l);
    if (const Tensor<double>* g = grads.find(param)) {
      analytic = g->to_vector();
    } else {
      analytic.assign(static_cast<std::size_t>(param.numel()), 0.0);
    }
  }

  GradCheckReport report;
  std::span<double> values = param.mutable_data();
  const std::int64_t n = param.numel();
  const std::int64_t stride =
      (max_entries > 0 && n > max_entries) ? (n + max_entries - 1) / max_entries
                                           : 1;
  double total = 0.0;
  NoGradGuard<double> no_grad;
  for (std::int64_t i = 0; i < n; i += stride) {
    const double saved = values[static_cast<std::size_t>(i)];
    values[static_cast<std::size_t>(i)] = saved + h;
    const double up = loss().item();
    values[static_cast<std::size_t>(i)] = saved - h;
    const double down = loss().item();
    values[static_cast<std::size_t>(i)] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic[static_cast<std::size_t>(i)];
    const double err = relative_error(a, numeric);
    total += err;
    ++report.checked;
    if (err > report.max_relative_error || report.worst_index < 0) {
      report.max_relative_error = err;
      report.worst_index = i;
      report.worst_analytic = a;
      report.worst_numeric = numeric;
    }
  }
  if (report.checked > 0) {
    report.mean_relative_error = total / static_cast<double>(report.checked);
  }
  return report;
}

GradCheckReport grad_check(
    const std::function<Tensor<double>(const Tensor<double>&)>& f,
    const Tensor<double>& input, double h) {
  Tensor<double> leaf = Tensor<double>::parameter(input.shape(), input.data());
  return grad_check([&]() { return f(leaf); }, leaf, h);
}

}  // namespace sgq
