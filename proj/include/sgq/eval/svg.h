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

#ifndef SGQ_EVAL_SVG_H_
#define SGQ_EVAL_SVG_H_

#include <string>

#include "sgq/eval/average_precision.h"
#include "sgq/map/map_element.h"

namespace sgq::eval {

struct SvgOptions {
  double pixels_per_meter = 10.0;
  double margin = 48.0;       // pixels around the plot, room for tick labels
  double legend_width = 130.0;
};

// Top-down view with x to the right and y (forward) up. Ground truth is
// drawn solid, predictions dashed inside <g id="predictions">.
std::string render_svg(const map::Scene& scene, const PredictedScene* predictions = nullptr,
                       const SvgOptions& options = {});

void write_svg_file(const std::string& path, const std::string& svg);

}  // namespace sgq::eval

#endif  // SGQ_EVAL_SVG_H_
