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

#include "sgq/loss/matching.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sgq/loss/hungarian.h"

namespace sgq::loss {
namespace {

void check_sizes(std::span<const map::Point2> pred, const ElementTarget& gt) {
  if (pred.size() != gt.points.size() || pred.empty()) {
    throw std::invalid_argument("matching: prediction has " + std::to_string(pred.size()) +
                                " points, target has " + std::to_string(gt.points.size()));
  }
}

// Summed Manhattan distance between pred[j] and gt[order[j]].
double ordered_distance(std::span<const map::Point2> pred,
                        std::span<const map::Point2> gt, const map::Ordering& order) {
  double s = 0.0;
  for (std::size_t j = 0; j < pred.size(); ++j) {
    const map::Point2& g = gt[static_cast<std::size_t>(order[j])];
    s += std::abs(pred[j].x - g.x) + std::abs(pred[j].y - g.y);
  }
  return s;
}

std::pair<map::Ordering, double> best_ordering(std::span<const map::Point2> pred,
                                               const ElementTarget& gt) {
  check_sizes(pred, gt);
  const int n = static_cast<int>(gt.points.size());
  map::Ordering best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const map::Ordering& o : map::equivalent_permutations(n, gt.closed)) {
    const double d = ordered_distance(pred, gt.points, o);
    if (d < best_d) {
      best_d = d;
      best = o;
    }
  }
  return {best, best_d};
}

}  // namespace

double mean_manhattan(std::span<const map::Point2> a, std::span<const map::Point2> b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("mean_manhattan: point counts differ or are zero");
  }
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    s += std::abs(a[j].x - b[j].x) + std::abs(a[j].y - b[j].y);
  }
  return s / static_cast<double>(a.size());
}

map::Ordering point_assignment(std::span<const map::Point2> pred, const ElementTarget& gt) {
  return best_ordering(pred, gt).first;
}

double instance_match_cost(const PredictionView& pred, const ElementTarget& gt,
                           const MatchWeights& weights) {
  const double d = best_ordering(pred.points, gt).second /
                   static_cast<double>(gt.points.size());
  return weights.lambda_cls * -pred.probs[static_cast<std::size_t>(gt.cls)] +
         weights.lambda_pts * d;
}

MatchResult match(std::span<const PredictionView> preds, std::span<const ElementTarget> gts,
                  const MatchWeights& weights) {
  const int m = static_cast<int>(preds.size());
  const int g = static_cast<int>(gts.size());
  std::vector<double> cost(static_cast<std::size_t>(m) * g);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < g; ++j) {
      cost[static_cast<std::size_t>(i) * g + j] =
          instance_match_cost(preds[static_cast<std::size_t>(i)], gts[static_cast<std::size_t>(j)], weights);
    }
  }
  const Assignment a = hungarian(cost, m, g);
  MatchResult r;
  r.pred_to_gt = a.row_to_col;
  r.gt_to_pred = a.col_to_row;
  r.total_cost = a.total;
  r.gt_ordering.resize(static_cast<std::size_t>(g));
  for (int j = 0; j < g; ++j) {
    const int i = r.gt_to_pred[static_cast<std::size_t>(j)];
    if (i < 0) continue;
    r.gt_ordering[static_cast<std::size_t>(j)] =
        point_assignment(preds[static_cast<std::size_t>(i)].points, gts[static_cast<std::size_t>(j)]);
  }
  return r;
}

}  // namespace sgq::loss
