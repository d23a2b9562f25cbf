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

#ifndef SGQ_EVAL_CHAMFER_H_
#define SGQ_EVAL_CHAMFER_H_

#include <span>

#include "sgq/map/map_element.h"

namespace sgq::eval {

// 0.5 * (mean_p min_g |p - g| + mean_g min_p |p - g|), Euclidean.
// Empty sets throw std::invalid_argument.
double chamfer_distance(std::span<const map::Point2> p,
                        std::span<const map::Point2> g);

}  // namespace sgq::eval

#endif  // SGQ_EVAL_CHAMFER_H_
