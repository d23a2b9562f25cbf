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

#ifndef SGQ_TENSOR_PARAMETERS_H_
#define SGQ_TENSOR_PARAMETERS_H_

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sgq/tensor/tensor.h"

namespace sgq {

template <typename T>
using NamedGradients = std::map<std::string, std::vector<T>>;

// Named learnable tensors in registration order.
template <typename T>
class ParameterStore {
 public:
  Tensor<T> add(const std::string& name, const Shape& shape,
                std::span<const T> init);
  // Uniform in [-bound, bound].
  Tensor<T> add_uniform(const std::string& name, const Shape& shape,
                        double bound, std::mt19937_64& rng);
  Tensor<T> add_constant(const std::string& name, const Shape& shape,
                         T value);

  bool contains(const std::string& name) const {
    return index_.count(name) > 0;
  }
  const Tensor<T>& get(const std::string& name) const;
  Tensor<T>& get(const std::string& name);
  const std::vector<std::pair<std::string, Tensor<T>>>& entries() const {
    return entries_;
  }
  std::vector<std::pair<std::string, Tensor<T>>>& entries() {
    return entries_;
  }
  std::int64_t parameter_count() const;

  // Gradient per parameter name; parameters the loss did not reach get
  // zeros, so the key set always equals the store's.
  NamedGradients<T> collect(const GradientMap<T>& grads) const;

 private:
  std::vector<std::pair<std::string, Tensor<T>>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace sgq

#endif  // SGQ_TENSOR_PARAMETERS_H_
