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

#ifndef SGQ_TESTS_SUPPORT_GRADIENT_SUITE_H_
#define SGQ_TESTS_SUPPORT_GRADIENT_SUITE_H_

#include <functional>
#include <string>
#include <vector>

#include "sgq/tensor/grad_check.h"

namespace sgq::testing {

struct GradientCase {
  std::string name;
  std::function<GradCheckReport()> run;
};

// Every differentiable op at 64-bit, each reduced to a scalar through a
// fixed random weighting so gradients are O(1).
std::vector<GradientCase> op_gradient_cases();

// Tiny decoder (N=4, n=3, D=16, 8x8 BEV) and tiny encoder, end to end,
// checked against every parameter.
std::vector<GradientCase> model_gradient_cases();

}  // namespace sgq::testing

#endif  // SGQ_TESTS_SUPPORT_GRADIENT_SUITE_H_
