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

#include "sgq/decoder/positional.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sgq::decoder {

template <typename T>
Tensor<T> sine_embedding(const Tensor<T>& coords, int dim, double temperature) {
  if (dim < 4 || dim % 4 != 0) {
    throw std::invalid_argument("sine_embedding: dim " + std::to_string(dim) +
                                " is not a positive multiple of 4");
  }
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("sine_embedding: temperature must be positive");
  }
  if (coords.rank() != 2 || coords.dim(1) != 2) {
    shape_error("sine_embedding", "expects [P, 2], got " + shape_string(coords.shape()));
  }
  const std::size_t points = static_cast<std::size_t>(coords.dim(0));
  const std::size_t half = static_cast<std::size_t>(dim) / 2;
  std::vector<double> freq(half);
  for (std::size_t i = 0; i < half; ++i) {
    freq[i] = 2.0 * std::numbers::pi /
              std::pow(temperature, 2.0 * static_cast<double>(i / 2) / static_cast<double>(half));
  }
  Buffer<T> out(points * static_cast<std::size_t>(dim), T(0));
  auto c = coords.data();
  for (std::size_t p = 0; p < points; ++p) {
    for (std::size_t axis = 0; axis < 2; ++axis) {
      const double v = static_cast<double>(c[p * 2 + axis]);
      T* dst = out.data() + p * static_cast<std::size_t>(dim) + axis * half;
      for (std::size_t i = 0; i < half; ++i) {
        const double a = v * freq[i];
        dst[i] = static_cast<T>(i % 2 == 0 ? std::sin(a) : std::cos(a));
      }
    }
  }
  return make_result<T>(
      "sine_embedding", {coords.dim(0), dim}, std::move(out), {coords},
      [freq, points, half, dim](Node<T>& self) {
        auto& C = self.inputs[0];
        auto& gc = C->ensure_grad();
        for (std::size_t p = 0; p < points; ++p) {
          for (std::size_t axis = 0; axis < 2; ++axis) {
            const double v = static_cast<double>(C->value[p * 2 + axis]);
            const T* g = self.grad.data() + p * static_cast<std::size_t>(dim) + axis * half;
            double acc = 0.0;
            for (std::size_t i = 0; i < half; ++i) {
              const double a = v * freq[i];
              acc += static_cast<double>(g[i]) *
                     (i % 2 == 0 ? freq[i] * std::cos(a) : -freq[i] * std::sin(a));
            }
            gc[p * 2 + axis] += static_cast<T>(acc);
          }
        }
      });
}

template Tensor<float> sine_embedding(const Tensor<float>&, int, double);
template Tensor<double> sine_embedding(const Tensor<double>&, int, double);

}  // namespace sgq::decoder
