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

#ifndef SGQ_TENSOR_NN_H_
#define SGQ_TENSOR_NN_H_

#include <random>
#include <string>
#include <vector>

#include "sgq/tensor/ops.h"
#include "sgq/tensor/parameters.h"

namespace sgq::nn {

// x [..., in] -> [..., out]. `b` is undefined for bias-free layers.
template <typename T>
struct Linear {
  Tensor<T> w;  // [in, out]
  Tensor<T> b;  // [out]

  Tensor<T> operator()(const Tensor<T>& x) const { return linear(x, w, b); }
  std::int64_t in_features() const { return w.dim(0); }
  std::int64_t out_features() const { return w.dim(1); }
};

template <typename T>
struct LayerNorm {
  Tensor<T> gamma;
  Tensor<T> beta;

  Tensor<T> operator()(const Tensor<T>& x) const {
    return layer_norm(x, gamma, beta);
  }
};

// Linear layers with relu between them (none after the last).
template <typename T>
struct Mlp {
  std::vector<Linear<T>> layers;

  Tensor<T> operator()(const Tensor<T>& x) const;
};

// Xavier-uniform weights, zero bias. Registers "<name>.w" and "<name>.b".
template <typename T>
Linear<T> make_linear(ParameterStore<T>& store, const std::string& name,
                      int in, int out, std::mt19937_64& rng, bool bias = true);

// Registers "<name>.gamma" (ones) and "<name>.beta" (zeros).
template <typename T>
LayerNorm<T> make_layer_norm(ParameterStore<T>& store, const std::string& name,
                             int dim);

// dims = {in, hidden..., out}; layer k is "<name>.<k>".
template <typename T>
Mlp<T> make_mlp(ParameterStore<T>& store, const std::string& name,
                const std::vector<int>& dims, std::mt19937_64& rng);

}  // namespace sgq::nn

#endif  // SGQ_TENSOR_NN_H_
