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

#ifndef SGQ_DECODER_POSITIONAL_H_
#define SGQ_DECODER_POSITIONAL_H_

#include "sgq/tensor/tensor.h"

namespace sgq::decoder {

inline constexpr double kDefaultPeTemperature = 20.0;

// Sinusoidal embedding of normalized 2-D coordinates: [P, 2] -> [P, dim].
// x fills the first dim/2 entries and y the rest; within a half, entry i
// is sin (even i) or cos (odd i) of 2*pi*v / t^(2*floor(i/2) / (dim/2)).
// dim must be divisible by 4. Differentiable with respect to coords.
template <typename T>
Tensor<T> sine_embedding(const Tensor<T>& coords, int dim,
                         double temperature = kDefaultPeTemperature);

}  // namespace sgq::decoder

#endif  // SGQ_DECODER_POSITIONAL_H_
