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

#include "sgq/tensor/optimizer.h"

#include <cmath>
#include <stdexcept>

namespace sgq {

template <typename T>
void adam_step(ParameterStore<T>& params, const NamedGradients<T>& grads,
               AdamState<T>& state, const AdamConfig& config) {
  if (grads.size() != params.entries().size()) {
    throw std::invalid_argument(
        "adam_step: gradient key set differs from parameter set");
  }
  for (const auto& [name, tensor] : params.entries()) {
    auto it = grads.find(name);
    if (it == grads.end()) {
      throw std::invalid_argument("adam_step: no gradient for parameter '" +
                                  name + "'");
    }
    if (static_cast<std::int64_t>(it->second.size()) != tensor.numel()) {
      throw std::invalid_argument("adam_step: gradient size mismatch for '" +
                                  name + "'");
    }
    for (T g : it->second) {
      if (!std::isfinite(static_cast<double>(g))) {
        throw std::domain_error("adam_step: non-finite gradient for '" + name +
                                "'");
      }
    }
  }

  state.step += 1;
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (auto& [name, tensor] : params.entries()) {
    const std::vector<T>& g = grads.at(name);
    auto& m = state.first_moment[name];
    auto& v = state.second_moment[name];
    if (m.empty()) m.assign(g.size(), T(0));
    if (v.empty()) v.assign(g.size(), T(0));
    std::span<T> p = tensor.mutable_data();
    for (std::size_t i = 0; i < g.size(); ++i) {
      m[i] = static_cast<T>(b1 * m[i] + (1.0 - b1) * g[i]);
      v[i] = static_cast<T>(b2 * v[i] + (1.0 - b2) * g[i] * g[i]);
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      const double update =
          config.learning_rate * mhat / (std::sqrt(vhat) + config.epsilon);
      double next = static_cast<double>(p[i]);
      if (config.weight_decay != 0.0) {
        next -= config.learning_rate * config.weight_decay * next;
      }
      if (update != 0.0) next -= update;
      p[i] = static_cast<T>(next);
    }
  }
}

template <typename T>
double clip_gradient_norm(NamedGradients<T>& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& [name, g] : grads)
    for (T x : g) sq += static_cast<double>(x) * static_cast<double>(x);
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double f = max_norm / norm;
    for (auto& [name, g] : grads)
      for (T& x : g) x = static_cast<T>(x * f);
  }
  return norm;
}

template void adam_step(ParameterStore<float>&, const NamedGradients<float>&,
                        AdamState<float>&, const AdamConfig&);
template void adam_step(ParameterStore<double>&,
                        const NamedGradients<double>&, AdamState<double>&,
                        const AdamConfig&);
template double clip_gradient_norm(NamedGradients<float>&, double);
template double clip_gradient_norm(NamedGradients<double>&, double);

}  // namespace sgq
