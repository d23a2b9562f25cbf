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

#include "sgq/eval/chamfer.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgq::eval {
namespace {

double directed(std::span<const map::Point2> a, std::span<const map::Point2> b) {
  double total = 0.0;
  for (const map::Point2& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const map::Point2& q : b) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
    total += best;
  }
  return total / static_cast<double>(a.size());
}

}  // namespace

double chamfer_distance(std::span<const map::Point2> p, std::span<const map::Point2> g) {
  if (p.empty() || g.empty()) {
    throw std::invalid_argument("chamfer_distance: point sets must be nonempty");
  }
  return 0.5 * (directed(p, g) + directed(g, p));
}

}  // namespace sgq::eval
