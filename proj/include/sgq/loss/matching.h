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

#ifndef SGQ_LOSS_MATCHING_H_
#define SGQ_LOSS_MATCHING_H_

#include <array>
#include <span>
#include <vector>

#include "sgq/map/geometry.h"
#include "sgq/map/map_element.h"
#include "sgq/synth/scene_synth.h"

namespace sgq::loss {

using synth::ElementTarget;

struct MatchWeights {
  double lambda_cls = 2.0;
  double lambda_pts = 5.0;
};

// Host copy of one prediction: class probabilities (3 classes then
// background) and n normalized points.
struct PredictionView {
  std::array<double, map::kNumClasses + 1> probs{};
  std::vector<map::Point2> points;
};

// Mean over point pairs of |dx| + |dy|.
double mean_manhattan(std::span<const map::Point2> a,
                      std::span<const map::Point2> b);

// Ordering of the target's points (from equivalent_permutations) with the
// smallest summed Manhattan distance to `pred`; the earliest ordering wins
// ties, so a perfect match in the stored order gives the identity.
map::Ordering point_assignment(std::span<const map::Point2> pred,
                               const ElementTarget& gt);

// lambda_cls * -p(gt class) + lambda_pts * min over orderings of the mean
// Manhattan distance.
double instance_match_cost(const PredictionView& pred, const ElementTarget& gt,
                           const MatchWeights& weights = {});

struct MatchResult {
  std::vector<int> pred_to_gt;  // -1 for unmatched predictions
  std::vector<int> gt_to_pred;  // -1 when there are fewer predictions
  std::vector<map::Ordering> gt_ordering;  // per GT, empty when unmatched
  double total_cost = 0.0;
};

// Instance-level Hungarian assignment, then per matched pair the best
// equivalent ordering of the GT points.
MatchResult match(std::span<const PredictionView> preds,
                  std::span<const ElementTarget> gts,
                  const MatchWeights& weights = {});

}  // namespace sgq::loss

#endif  // SGQ_LOSS_MATCHING_H_
