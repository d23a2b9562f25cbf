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

#ifndef SGQ_TENSOR_OPTIMIZER_H_
#define SGQ_TENSOR_OPTIMIZER_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sgq/tensor/parameters.h"

namespace sgq {

// Adam with decoupled weight decay. The learning rate default is the one
// reported for the full-scale model; betas/eps follow common practice.
struct AdamConfig {
  double learning_rate = 6e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

template <typename T>
struct AdamState {
  std::int64_t step = 0;
  std::map<std::string, std::vector<T>> first_moment;
  std::map<std::string, std::vector<T>> second_moment;
};

// Applies one update. Validates everything before touching any parameter:
// key sets must match and every gradient must be finite, otherwise
// std::invalid_argument / std::domain_error names the offending parameter.
template <typename T>
void adam_step(ParameterStore<T>& params, const NamedGradients<T>& grads,
               AdamState<T>& state, const AdamConfig& config);

// Rescales all gradients so their global L2 norm is at most max_norm.
// Returns the norm before clipping.
template <typename T>
double clip_gradient_norm(NamedGradients<T>& grads, double max_norm);

}  // namespace sgq

#endif  // SGQ_TENSOR_OPTIMIZER_H_
