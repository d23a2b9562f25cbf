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

#ifndef SGQ_LOSS_HUNGARIAN_H_
#define SGQ_LOSS_HUNGARIAN_H_

#include <span>
#include <vector>

namespace sgq::loss {

struct Assignment {
  std::vector<int> row_to_col;  // -1 when unassigned
  std::vector<int> col_to_row;  // -1 when unassigned
  double total = 0.0;           // summed over assigned rows in row order
};

// Minimum-cost assignment for a row-major rows x cols matrix. Every element
// of the smaller side is assigned. Shortest augmenting paths with
// potentials, O(k^2 * max) for k = min(rows, cols); among equally cheap
// choices the lower index wins. Non-finite entries throw
// std::invalid_argument.
Assignment hungarian(std::span<const double> cost, int rows, int cols);

}  // namespace sgq::loss

#endif  // SGQ_LOSS_HUNGARIAN_H_
