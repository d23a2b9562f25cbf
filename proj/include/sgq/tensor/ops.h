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

#ifndef SGQ_TENSOR_OPS_H_
#define SGQ_TENSOR_OPS_H_

// Differentiable tensor operations.
//
// Broadcasting for binary elementwise ops (add, sub, mul, div) only ever
// expands the second operand, and only in these ways:
//   * identical shapes;
//   * the second operand has one element (scalar);
//   * the second operand's shape equals the trailing dimensions of the first
//     (e.g. a [D] bias over a [M, D] matrix).
// Anything else is a shape error naming the op and both shapes.

#include <cstdint>
#include <span>
#include <vector>

#include "sgq/tensor/alloc.h"
#include "sgq/tensor/tensor.h"

namespace sgq {

inline constexpr double kInverseSigmoidEps = 1e-5;

template <typename T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> div(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> scale(const Tensor<T>& a, double s);
template <typename T> Tensor<T> add_scalar(const Tensor<T>& a, double s);

// [M, K] x [K, N] -> [M, N].
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

// x [..., K] times w [K, N] plus b [N]; leading dims of x are flattened.
// `b` may be undefined.
template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b);

template <typename T> Tensor<T> transpose(const Tensor<T>& a);  // 2-D only
template <typename T>
Tensor<T> reshape(const Tensor<T>& a, const Shape& shape);
template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, int axis);
template <typename T>
Tensor<T> slice(const Tensor<T>& a, int axis, std::int64_t begin,
                std::int64_t end);
// Selects rows along axis 0; indices may repeat.
template <typename T>
Tensor<T> index_rows(const Tensor<T>& a,
                     std::span<const std::int64_t> indices);

template <typename T> Tensor<T> relu(const Tensor<T>& a);
template <typename T> Tensor<T> sigmoid(const Tensor<T>& a);
// log(x / (1 - x)) with x clamped to [1e-5, 1 - 1e-5]. The clamp is part of
// the forward map, so the gradient is zero outside the clamp band.
template <typename T> Tensor<T> inverse_sigmoid(const Tensor<T>& a);
template <typename T> Tensor<T> exp(const Tensor<T>& a);
// Natural log; inputs must be positive.
template <typename T> Tensor<T> log(const Tensor<T>& a);
// x^p for x > 0 (p integral values also accept x <= 0).
template <typename T> Tensor<T> pow(const Tensor<T>& a, double p);
template <typename T>
Tensor<T> clamp(const Tensor<T>& a, double lo, double hi);

template <typename T> Tensor<T> softmax(const Tensor<T>& a, int axis);
template <typename T> Tensor<T> log_softmax(const Tensor<T>& a, int axis);

// Normalizes over the last axis; gamma/beta ([last]) may be undefined.
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& a, const Tensor<T>& gamma,
                     const Tensor<T>& beta, double eps = 1e-5);

template <typename T> Tensor<T> sum(const Tensor<T>& a);
template <typename T> Tensor<T> mean(const Tensor<T>& a);
// Reduces one axis away.
template <typename T> Tensor<T> sum(const Tensor<T>& a, int axis);
template <typename T> Tensor<T> mean(const Tensor<T>& a, int axis);

// Sum of |a - b| over the last axis: [..., K] -> [...].
template <typename T>
Tensor<T> l1_distance(const Tensor<T>& a, const Tensor<T>& b);

// Cosine similarity over the last axis, a.b / (sqrt(|a|^2+eps^2) *
// sqrt(|b|^2+eps^2)). The eps keeps it smooth at the origin.
template <typename T>
Tensor<T> cosine_similarity(const Tensor<T>& a, const Tensor<T>& b,
                            double eps = 1e-9);

// Elementwise binary cross-entropy on logits against fixed targets.
template <typename T>
Tensor<T> bce_with_logits(const Tensor<T>& logits, const Tensor<T>& targets);

// Scaled dot-product attention over already-projected q [Lq, D],
// k [Lk, D], v [Lk, D] split into `heads` heads of D / heads channels.
// Keys visible to a query are selected in one of three ways:
//   * keys_per_query > 0: `key_index` holds Lq * keys_per_query entries
//     naming the keys of each query, -1 marks an unused slot;
//   * `groups` non-empty (self-attention): query i sees key j iff
//     groups[i] == groups[j];
//   * otherwise every key is visible.
// A query with no visible key outputs zeros. The probability tensor is
// reported to the allocation counters: heads * Lq * keys_per_query with a
// key index, heads * Lq * Lk otherwise (group masks do not shrink it).
struct AttentionSpec {
  int heads = 1;
  AttentionKind kind = AttentionKind::kOther;
  int keys_per_query = 0;
  std::vector<std::int64_t> key_index;
  std::vector<int> groups;
};

template <typename T>
Tensor<T> attention(const Tensor<T>& q, const Tensor<T>& k,
                    const Tensor<T>& v, const AttentionSpec& spec);

// Per-query attention probabilities from the most recent forward pass are
// not exposed; this helper recomputes them (no tape) for inspection.
template <typename T>
std::vector<T> attention_weights(const Tensor<T>& q, const Tensor<T>& k,
                                 const AttentionSpec& spec);

}  // namespace sgq

#endif  // SGQ_TENSOR_OPS_H_
