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

#include "sgq/tensor/nn.h"

#include <cmath>
#include <stdexcept>

namespace sgq::nn {

template <typename T>
Tensor<T> Mlp<T>::operator()(const Tensor<T>& x) const {
  Tensor<T> h = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    h = layers[i](h);
    if (i + 1 < layers.size()) h = relu(h);
  }
  return h;
}

template <typename T>
Linear<T> make_linear(ParameterStore<T>& store, const std::string& name,
                      int in, int out, std::mt19937_64& rng, bool bias) {
  if (in < 1 || out < 1) {
    throw std::invalid_argument("linear '" + name + "': extents must be positive");
  }
  Linear<T> l;
  const double bound = std::sqrt(6.0 / (in + out));
  l.w = store.add_uniform(name + ".w", {in, out}, bound, rng);
  if (bias) l.b = store.add_constant(name + ".b", {out}, T(0));
  return l;
}

template <typename T>
LayerNorm<T> make_layer_norm(ParameterStore<T>& store, const std::string& name,
                             int dim) {
  LayerNorm<T> n;
  n.gamma = store.add_constant(name + ".gamma", {dim}, T(1));
  n.beta = store.add_constant(name + ".beta", {dim}, T(0));
  return n;
}

template <typename T>
Mlp<T> make_mlp(ParameterStore<T>& store, const std::string& name,
                const std::vector<int>& dims, std::mt19937_64& rng) {
  if (dims.size() < 2) {
    throw std::invalid_argument("mlp '" + name + "': need at least two extents");
  }
  Mlp<T> m;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    m.layers.push_back(make_linear(store, name + "." + std::to_string(i),
                                   dims[i], dims[i + 1], rng));
  }
  return m;
}

#define SGQ_INSTANTIATE_NN(T)                                                  \
  template struct Mlp<T>;                                                      \
  template Linear<T> make_linear(ParameterStore<T>&, const std::string&, int,  \
                                 int, std::mt19937_64&, bool);                 \
  template LayerNorm<T> make_layer_norm(ParameterStore<T>&,                    \
                                        const std::string&, int);              \
  template Mlp<T> make_mlp(ParameterStore<T>&, const std::string&,             \
                           const std::vector<int>&, std::mt19937_64&);

SGQ_INSTANTIATE_NN(float)
SGQ_INSTANTIATE_NN(double)

}  // namespace sgq::nn
