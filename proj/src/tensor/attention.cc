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

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgq/tensor/kernels.h"
#include "sgq/tensor/ops.h"

namespace sgq {
namespace {

enum class Mode { kDense, kGrouped, kIndexed };

struct Layout {
  Mode mode = Mode::kDense;
  std::size_t lq = 0, lk = 0, d = 0, heads = 1, dh = 0;
  std::size_t slots = 0;  // keys considered per query
};

Layout make_layout(const char* op, const Shape& q, const Shape& k,
                   const Shape& v, const AttentionSpec& spec) {
  if (q.size() != 2 || k.size() != 2 || v.size() != 2 || q[1] != k[1] ||
      k != v) {
    shape_error(op, "expects q [Lq,D], k [Lk,D], v [Lk,D]; got " +
                        shape_string(q) + ", " + shape_string(k) + ", " +
                        shape_string(v));
  }
  Layout l;
  l.lq = static_cast<std::size_t>(q[0]);
  l.lk = static_cast<std::size_t>(k[0]);
  l.d = static_cast<std::size_t>(q[1]);
  if (spec.heads < 1 || l.d % static_cast<std::size_t>(spec.heads) != 0) {
    shape_error(op, "dimension " + std::to_string(l.d) +
                        " not divisible by heads " +
                        std::to_string(spec.heads));
  }
  l.heads = static_cast<std::size_t>(spec.heads);
  l.dh = l.d / l.heads;
  if (spec.keys_per_query > 0) {
    l.mode = Mode::kIndexed;
    l.slots = static_cast<std::size_t>(spec.keys_per_query);
    if (spec.key_index.size() != l.lq * l.slots) {
      shape_error(op, "key_index has " + std::to_string(spec.key_index.size()) +
                          " entries, expected " +
                          std::to_string(l.lq * l.slots));
    }
    for (std::int64_t idx : spec.key_index) {
      if (idx < -1 || idx >= static_cast<std::int64_t>(l.lk)) {
        shape_error(op, "key index " + std::to_string(idx) + " out of range");
      }
    }
  } else if (!spec.groups.empty()) {
    l.mode = Mode::kGrouped;
    l.slots = l.lk;
    if (l.lq != l.lk || spec.groups.size() != l.lq) {
      shape_error(op, "grouped attention needs Lq == Lk == groups.size()");
    }
  } else {
    l.slots = l.lk;
  }
  return l;
}

// Column-major copy of one head: out[c * rows + r] = src[r * d + off + c].
template <typename T>
void head_transpose(const T* src, std::size_t rows, std::size_t d,
                    std::size_t off, std::size_t dh, T* out) {
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < dh; ++c) out[c * rows + r] = src[r * d + off + c];
}

template <typename T>
void softmax_row(T* s, std::size_t n) {
  T mx = -std::numeric_limits<T>::infinity();
  for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, s[j]);
  if (mx == -std::numeric_limits<T>::infinity()) {
    std::fill(s, s + n, T(0));
    return;
  }
  T z = T(0);
  for (std::size_t j = 0; j < n; ++j) {
    s[j] = std::exp(s[j] - mx);
    z += s[j];
  }
  const T inv = T(1) / z;
  for (std::size_t j = 0; j < n; ++j) s[j] *= inv;
}

// Fills probs (heads * lq * slots) and, when out != nullptr, the output.
template <typename T>
void attention_forward(const Layout& l, const AttentionSpec& spec, const T* q,
                       const T* k, const T* v, T* probs, T* out) {
  const T scale = T(1) / std::sqrt(static_cast<T>(l.dh));
  const T neg_inf = -std::numeric_limits<T>::infinity();
  if (l.mode == Mode::kIndexed) {
    for (std::size_t h = 0; h < l.heads; ++h) {
      const std::size_t off = h * l.dh;
      for (std::size_t i = 0; i < l.lq; ++i) {
        T* p = probs + (h * l.lq + i) * l.slots;
        const T* qi = q + i * l.d + off;
        for (std::size_t s = 0; s < l.slots; ++s) {
          const std::int64_t j = spec.key_index[i * l.slots + s];
          p[s] = j < 0 ? neg_inf
                       : scale * kernels::dot(qi, k + static_cast<std::size_t>(j) * l.d + off, l.dh);
        }
        softmax_row(p, l.slots);
        if (out == nullptr) continue;
        T* oi = out + i * l.d + off;
        for (std::size_t s = 0; s < l.slots; ++s) {
          const std::int64_t j = spec.key_index[i * l.slots + s];
          if (j < 0 || p[s] == T(0)) continue;
          kernels::axpy(p[s], v + static_cast<std::size_t>(j) * l.d + off, oi, l.dh);
        }
      }
    }
    return;
  }
  Buffer<T> kt(l.dh * l.lk), vt(l.dh * l.lk);
  for (std::size_t h = 0; h < l.heads; ++h) {
    const std::size_t off = h * l.dh;
    head_transpose(k, l.lk, l.d, off, l.dh, kt.data());
    head_transpose(v, l.lk, l.d, off, l.dh, vt.data());
    for (std::size_t i = 0; i < l.lq; ++i) {
      T* p = probs + (h * l.lq + i) * l.slots;
      std::fill(p, p + l.lk, T(0));
      const T* qi = q + i * l.d + off;
      for (std::size_t c = 0; c < l.dh; ++c) {
        kernels::axpy(scale * qi[c], kt.data() + c * l.lk, p, l.lk);
      }
      if (l.mode == Mode::kGrouped) {
        for (std::size_t j = 0; j < l.lk; ++j)
          if (spec.groups[j] != spec.groups[i]) p[j] = neg_inf;
      }
      softmax_row(p, l.lk);
      if (out == nullptr) continue;
      T* oi = out + i * l.d + off;
      for (std::size_t c = 0; c < l.dh; ++c) {
        oi[c] += kernels::dot(p, vt.data() + c * l.lk, l.lk);
      }
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> attention(const Tensor<T>& q, const Tensor<T>& k,
                    const Tensor<T>& v, const AttentionSpec& spec) {
  const Layout l = make_layout("attention", q.shape(), k.shape(), v.shape(), spec);
  Buffer<T> probs(l.heads * l.lq * l.slots, T(0));
  record_score_matrix(spec.kind, static_cast<std::int64_t>(probs.size()));
  Buffer<T> out(l.lq * l.d, T(0));
  attention_forward(l, spec, q.data().data(), k.data().data(), v.data().data(),
                    probs.data(), out.data());

  std::vector<std::int64_t> key_index;
  if (l.mode == Mode::kIndexed) key_index = spec.key_index;
  return make_result<T>(
      "attention", {q.dim(0), q.dim(1)}, std::move(out), {q, k, v},
      [l, probs = std::move(probs),
       key_index = std::move(key_index)](Node<T>& self) {
        auto& Q = self.inputs[0];
        auto& K = self.inputs[1];
        auto& V = self.inputs[2];
        const T scale = T(1) / std::sqrt(static_cast<T>(l.dh));
        const T* qv = Q->value.data();
        const T* kv = K->value.data();
        const T* vv = V->value.data();
        const T* go = self.grad.data();
        T* gq = Q->requires_grad ? Q->ensure_grad().data() : nullptr;
        T* gk = K->requires_grad ? K->ensure_grad().data() : nullptr;
        T* gv = V->requires_grad ? V->ensure_grad().data() : nullptr;
        std::vector<T> ds(l.slots);

        if (l.mode == Mode::kIndexed) {
          for (std::size_t h = 0; h < l.heads; ++h) {
            const std::size_t off = h * l.dh;
            for (std::size_t i = 0; i < l.lq; ++i) {
              const T* p = probs.data() + (h * l.lq + i) * l.slots;
              const T* doi = go + i * l.d + off;
              T total = T(0);
              for (std::size_t s = 0; s < l.slots; ++s) {
                const std::int64_t j = key_index[i * l.slots + s];
                ds[s] = (j < 0 || p[s] == T(0))
                            ? T(0)
                            : kernels::dot(doi, vv + static_cast<std::size_t>(j) * l.d + off, l.dh);
                total += p[s] * ds[s];
              }
              for (std::size_t s = 0; s < l.slots; ++s) {
                const std::int64_t j = key_index[i * l.slots + s];
                if (j < 0 || p[s] == T(0)) continue;
                const std::size_t row = static_cast<std::size_t>(j) * l.d + off;
                const T dsc = p[s] * (ds[s] - total) * scale;
                if (gq) kernels::axpy(dsc, kv + row, gq + i * l.d + off, l.dh);
                if (gk) kernels::axpy(dsc, qv + i * l.d + off, gk + row, l.dh);
                if (gv) kernels::axpy(p[s], doi, gv + row, l.dh);
              }
            }
          }
          return;
        }

        std::vector<T> kt(l.dh * l.lk), vt(l.dh * l.lk);
        std::vector<T> gkt(l.dh * l.lk), gvt(l.dh * l.lk);
        for (std::size_t h = 0; h < l.heads; ++h) {
          const std::size_t off = h * l.dh;
          head_transpose(kv, l.lk, l.d, off, l.dh, kt.data());
          head_transpose(vv, l.lk, l.d, off, l.dh, vt.data());
          std::fill(gkt.begin(), gkt.end(), T(0));
          std::fill(gvt.begin(), gvt.end(), T(0));
          for (std::size_t i = 0; i < l.lq; ++i) {
            const T* p = probs.data() + (h * l.lq + i) * l.lk;
            const T* doi = go + i * l.d + off;
            std::fill(ds.begin(), ds.end(), T(0));
            for (std::size_t c = 0; c < l.dh; ++c) {
              kernels::axpy(doi[c], vt.data() + c * l.lk, ds.data(), l.lk);
            }
            const T total = kernels::dot(p, ds.data(), l.lk);
            for (std::size_t j = 0; j < l.lk; ++j)
              ds[j] = p[j] * (ds[j] - total) * scale;
            const T* qi = qv + i * l.d + off;
            for (std::size_t c = 0; c < l.dh; ++c) {
              if (gq) gq[i * l.d + off + c] += kernels::dot(ds.data(), kt.data() + c * l.lk, l.lk);
              if (gk) kernels::axpy(qi[c], ds.data(), gkt.data() + c * l.lk, l.lk);
              if (gv) kernels::axpy(doi[c], p, gvt.data() + c * l.lk, l.lk);
            }
          }
          for (std::size_t j = 0; j < l.lk; ++j) {
            for (std::size_t c = 0; c < l.dh; ++c) {
              if (gk) gk[j * l.d + off + c] += gkt[c * l.lk + j];
              if (gv) gv[j * l.d + off + c] += gvt[c * l.lk + j];
            }
          }
        }
      });
}

template <typename T>
std::vector<T> attention_weights(const Tensor<T>& q, const Tensor<T>& k,
                                 const AttentionSpec& spec) {
  const Layout l =
      make_layout("attention_weights", q.shape(), k.shape(), k.shape(), spec);
  std::vector<T> probs(l.heads * l.lq * l.slots, T(0));
  attention_forward<T>(l, spec, q.data().data(), k.data().data(),
                       k.data().data(), probs.data(), nullptr);
  return probs;
}

template Tensor<float> attention(const Tensor<float>&, const Tensor<float>&,
                                 const Tensor<float>&, const AttentionSpec&);
template Tensor<double> attention(const Tensor<double>&,
                                  const Tensor<double>&,
                                  const Tensor<double>&,
                                  const AttentionSpec&);
template std::vector<float> attention_weights(const Tensor<float>&,
                                              const Tensor<float>&,
                                              const AttentionSpec&);
template std::vector<double> attention_weights(const Tensor<double>&,
                                               const Tensor<double>&,
                                               const AttentionSpec&);

}  // namespace sgq
