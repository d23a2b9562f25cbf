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

#include <gtest/gtest.h>

#include "support/gradient_suite.h"

namespace sgq::testing {
namespace {

constexpr double kTolerance = 1e-4;

void expect_passes(const std::vector<GradientCase>& cases) {
  for (const GradientCase& c : cases) {
    SCOPED_TRACE(c.name);
    const GradCheckReport r = c.run();
    EXPECT_GT(r.checked, 0);
    EXPECT_LT(r.max_relative_error, kTolerance)
        << c.name << " worst entry " << r.worst_index << ": analytic " << r.worst_analytic
        << " numeric " << r.worst_numeric;
  }
}

TEST(GradientTest, EveryOpMatchesCentralDifferences) { expect_passes(op_gradient_cases()); }

TEST(GradientTest, TinyModelsMatchCentralDifferences) { expect_passes(model_gradient_cases()); }

}  // namespace
}  // namespace sgq::testing
