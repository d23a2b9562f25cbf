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

#include "sgq/tensor/parameters.h"

#include <stdexcept>

namespace sgq {

template <typename T>
Tensor<T> ParameterStore<T>::add(const std::string& name, const Shape& shape,
                                 std::span<const T> init) {
  if (contains(name)) {
    throw std::invalid_argument("parameter '" + name + "' registered twice");
  }
  Tensor<T> t = Tensor<T>::parameter(shape, init);
  index_[name] = entries_.size();
  entries_.emplace_back(name, t);
  return t;
}

template <typename T>
Tensor<T> ParameterStore<T>::add_uniform(const std::string& name,
                                         const Shape& shape, double bound,
                                         std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<T> values(static_cast<std::size_t>(shape_numel(shape)));
  for (auto& v : values) v = static_cast<T>(dist(rng));
  return add(name, shape, values);
}

template <typename T>
Tensor<T> ParameterStore<T>::add_constant(const std::string& name,
                                          const Shape& shape, T value) {
  std::vector<T> values(static_cast<std::size_t>(shape_numel(shape)), value);
  return add(name, shape, values);
}

template <typename T>
const Tensor<T>& ParameterStore<T>::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw std::out_of_range("unknown parameter '" + name + "'");
  }
  return entries_[it->second].second;
}

template <typename T>
Tensor<T>& ParameterStore<T>::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw std::out_of_range("unknown parameter '" + name + "'");
  }
  return entries_[it->second].second;
}

template <typename T>
std::int64_t ParameterStore<T>::parameter_count() const {
  std::int64_t n = 0;
  for (const auto& [name, t] : entries_) n += t.numel();
  return n;
}

template <typename T>
NamedGradients<T> ParameterStore<T>::collect(
    const GradientMap<T>& grads) const {
  NamedGradients<T> out;
  for (const auto& [name, t] : entries_) {
    if (const Tensor<T>* g = grads.find(t)) {
      out[name] = g->to_vector();
    } else {
      out[name] = std::vector<T>(static_cast<std::size_t>(t.numel()), T(0));
    }
  }
  return out;
}

template class ParameterStore<float>;
template class ParameterStore<double>;

}  // namespace sgq
