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

#ifndef SGQ_EVAL_AVERAGE_PRECISION_H_
#define SGQ_EVAL_AVERAGE_PRECISION_H_

#include <array>
#include <span>
#include <string>
#include <vector>

#include "sgq/map/map_element.h"

namespace sgq::eval {

struct EvalConfig {
  std::vector<double> thresholds = {0.5, 1.0, 1.5};  // meters
  double confidence_floor = 0.0;
  int interpolation_points = 101;

  static EvalConfig map1() { return {{0.2, 0.5, 1.0}, 0.0, 101}; }
  static EvalConfig map2() { return {{0.5, 1.0, 1.5}, 0.0, 101}; }
};

// Thresholds strictly increasing and positive, >= 2 interpolation points.
void validate_config(const EvalConfig& config);

struct PredictedElement {
  map::ElementClass cls = map::ElementClass::kDivider;
  double confidence = 0.0;
  std::array<double, map::kNumClasses> class_scores{};
  std::vector<map::Point2> points;  // meters
  bool closed = false;
};

struct PredictedScene {
  std::string id;
  std::vector<PredictedElement> elements;
};

struct PrPoint {
  double precision = 0.0;
  double recall = 0.0;
};

// Precision/recall after each prediction of one class, in the order the
// predictions are consumed (descending confidence, ties by scene then
// element order). A prediction is a true positive when an unmatched GT of
// its class in its scene lies closer than tau in Chamfer distance; the
// closest such GT is taken.
std::vector<PrPoint> pr_curve(std::span<const PredictedScene> preds,
                              std::span<const map::Scene> gts,
                              map::ElementClass cls, double tau,
                              double confidence_floor = 0.0);

// Mean over recall levels k / (points - 1) of the best precision at
// recall >= level (0 when none).
double interpolated_ap(std::span<const PrPoint> curve, int points = 101);

struct ApResult {
  std::vector<double> thresholds;
  // [class][threshold]
  std::array<std::vector<double>, map::kNumClasses> ap;
  std::array<double, map::kNumClasses> class_ap{};  // mean over thresholds
  std::array<int, map::kNumClasses> gt_count{};
  double map = 0.0;  // mean of the three class APs
};

// Predictions are paired with GT scenes by id; a GT scene without
// predictions contributes only false negatives and predictions for an
// unknown scene throw. A class without GT has AP 0.
ApResult evaluate_ap(std::span<const PredictedScene> preds,
                     std::span<const map::Scene> gts, const EvalConfig& config);

// Table with one row per class and the mean; columns per threshold.
std::string format_ap_table(const ApResult& map1, const ApResult& map2);

}  // namespace sgq::eval

#endif  // SGQ_EVAL_AVERAGE_PRECISION_H_
