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

#ifndef SGQ_EVAL_PREDICTION_IO_H_
#define SGQ_EVAL_PREDICTION_IO_H_

// Prediction files use the scene file layout (one JSON object per line)
// with two extra per-element fields:
//   "confidence": number in [0, 1]   (defaults to 1)
//   "class_scores": [divider, ped_crossing, boundary]   (defaults to one-hot)
// so a scene file is also a valid prediction file.

#include <string>
#include <vector>

#include "sgq/eval/average_precision.h"

namespace sgq::eval {

std::string serialize_prediction(const PredictedScene& scene,
                                 const map::BevRange& range);
PredictedScene parse_prediction(const std::string& line);

// Errors carry "path:line: message".
std::vector<PredictedScene> read_prediction_file(const std::string& path);
void write_prediction_file(const std::string& path,
                           const std::vector<PredictedScene>& scenes,
                           const map::BevRange& range);

}  // namespace sgq::eval

#endif  // SGQ_EVAL_PREDICTION_IO_H_
