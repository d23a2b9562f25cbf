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

#include "support/oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sgq::testing {

double brute_force_assignment_cost(std::span<const double> cost, int rows, int cols) {
  const bool wide = rows <= cols;
  const int small = wide ? rows : cols;
  const int large = wide ? cols : rows;
  std::vector<int> perm(static_cast<std::size_t>(large));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  // The first `small` entries of each permutation of the larger side pick
  // the partners; duplicates in the tail are harmless.
  do {
    double total = 0.0;
    for (int i = 0; i < small; ++i) {
      const int r = wide ? i : perm[static_cast<std::size_t>(i)];
      const int c = wide ? perm[static_cast<std::size_t>(i)] : i;
      total += cost[static_cast<std::size_t>(r * cols + c)];
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double assignment_cost(std::span<const double> cost, int cols, std::span<const int> row_to_col) {
  double total = 0.0;
  for (std::size_t r = 0; r < row_to_col.size(); ++r) {
    if (row_to_col[r] >= 0) total += cost[r * static_cast<std::size_t>(cols) + static_cast<std::size_t>(row_to_col[r])];
  }
  return total;
}

std::vector<std::vector<int>> enumerate_orderings(int n, bool closed) {
  std::vector<std::vector<int>> out;
  if (!closed) {
    std::vector<int> fwd(static_cast<std::size_t>(n)), bwd(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      fwd[static_cast<std::size_t>(k)] = k;
      bwd[static_cast<std::size_t>(k)] = n - 1 - k;
    }
    out.push_back(fwd);
    out.push_back(bwd);
    return out;
  }
  for (int dir : {1, -1}) {
    for (int s = 0; s < n; ++s) {
      std::vector<int> o(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) o[static_cast<std::size_t>(k)] = ((s + dir * k) % n + n) % n;
      out.push_back(o);
    }
  }
  return out;
}

double manhattan_sum(std::span<const map::Point2> pred, std::span<const map::Point2> gt,
                     std::span<const int> order) {
  double total = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const map::Point2& g = gt[static_cast<std::size_t>(order[k])];
    total += std::abs(pred[k].x - g.x) + std::abs(pred[k].y - g.y);
  }
  return total;
}

double best_ordering_cost(std::span<const map::Point2> pred, std::span<const map::Point2> gt,
                          bool closed) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& o : enumerate_orderings(static_cast<int>(gt.size()), closed)) {
    best = std::min(best, manhattan_sum(pred, gt, o));
  }
  return best;
}

double chamfer_oracle(std::span<const map::Point2> a, std::span<const map::Point2> b) {
  auto one_way = [](std::span<const map::Point2> from, std::span<const map::Point2> to) {
    double total = 0.0;
    for (const map::Point2& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const map::Point2& q : to) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
      total += best;
    }
    return total / static_cast<double>(from.size());
  };
  return 0.5 * (one_way(a, b) + one_way(b, a));
}

std::vector<double> random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> m(static_cast<std::size_t>(rows * cols));
  for (double& x : m) x = u(rng);
  return m;
}

}  // namespace sgq::testing
