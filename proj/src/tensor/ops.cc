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

#include "sgq/tensor/ops.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgq/tensor/kernels.h"

namespace sgq {
namespace {

enum class Broadcast { kSame, kScalar, kTrailing };

Broadcast broadcast_mode(const char* op, const Shape& a, const Shape& b) {
  if (a == b) return Broadcast::kSame;
  if (shape_numel(b) == 1) return Broadcast::kScalar;
  if (b.size() <= a.size() &&
      std::equal(b.begin(), b.end(), a.end() - static_cast<long>(b.size()))) {
    return Broadcast::kTrailing;
  }
  shape_error(op, "cannot broadcast " + shape_string(b) + " onto " +
                      shape_string(a));
}

inline std::size_t bindex(Broadcast mode, std::size_t i, std::size_t bn) {
  switch (mode) {
    case Broadcast::kSame:
      return i;
    case Broadcast::kScalar:
      return 0;
    case Broadcast::kTrailing:
      return i % bn;
  }
  return 0;
}

template <typename T>
Buffer<T> alloc(std::size_t n) {
  return Buffer<T>(n, T(0));
}

template <typename T>
bool wants(const std::shared_ptr<Node<T>>& n) {
  return n->requires_grad;
}

// Shared implementation for the four broadcasting binaries. `fa` and `fb`
// give d(out)/d(a) and d(out)/d(b) from (a, b, out).
template <typename T, typename F, typename DA, typename DB>
Tensor<T> binary(const char* op, const Tensor<T>& a, const Tensor<T>& b, F f,
                 DA fa, DB fb) {
  const Broadcast mode = broadcast_mode(op, a.shape(), b.shape());
  const std::size_t n = static_cast<std::size_t>(a.numel());
  const std::size_t bn = static_cast<std::size_t>(b.numel());
  auto av = a.data();
  auto bv = b.data();
  Buffer<T> out = alloc<T>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f(av[i], bv[bindex(mode, i, bn)]);
  return make_result<T>(
      op, a.shape(), std::move(out), {a, b},
      [mode, n, bn, fa, fb](Node<T>& self) {
        auto& A = self.inputs[0];
        auto& B = self.inputs[1];
        const Buffer<T>& g = self.grad;
        if (wants(A)) {
          auto& ga = A->ensure_grad();
          for (std::size_t i = 0; i < n; ++i) {
            ga[i] += g[i] * fa(A->value[i], B->value[bindex(mode, i, bn)],
                               self.value[i]);
          }
        }
        if (wants(B)) {
          auto& gb = B->ensure_grad();
          for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = bindex(mode, i, bn);
            gb[j] += g[i] * fb(A->value[i], B->value[j], self.value[i]);
          }
        }
      });
}

template <typename T, typename F, typename D>
Tensor<T> unary(const char* op, const Tensor<T>& a, F f, D df) {
  const std::size_t n = static_cast<std::size_t>(a.numel());
  auto av = a.data();
  Buffer<T> out = alloc<T>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f(av[i]);
  return make_result<T>(op, a.shape(), std::move(out), {a},
                        [n, df](Node<T>& self) {
                          auto& A = self.inputs[0];
                          auto& ga = A->ensure_grad();
                          for (std::size_t i = 0; i < n; ++i) {
                            ga[i] += self.grad[i] * df(A->value[i],
                                                       self.value[i]);
                          }
                        });
}

int normalize_axis(const char* op, int axis, int rank) {
  if (axis < 0) axis += rank;
  if (axis < 0 || axis >= rank) {
    shape_error(op, "axis " + std::to_string(axis) + " out of range for rank " +
                        std::to_string(rank));
  }
  return axis;
}

// outer x extent x inner decomposition around one axis.
struct AxisSplit {
  std::size_t outer = 1, extent = 1, inner = 1;
};

AxisSplit split_axis(const Shape& s, int axis) {
  AxisSplit r;
  for (int i = 0; i < axis; ++i) r.outer *= static_cast<std::size_t>(s[i]);
  r.extent = static_cast<std::size_t>(s[axis]);
  for (std::size_t i = static_cast<std::size_t>(axis) + 1; i < s.size(); ++i) {
    r.inner *= static_cast<std::size_t>(s[i]);
  }
  return r;
}

}  // namespace

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  return binary<T>(
      "add", a, b, [](T x, T y) { return x + y; },
      [](T, T, T) { return T(1); }, [](T, T, T) { return T(1); });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  return binary<T>(
      "sub", a, b, [](T x, T y) { return x - y; },
      [](T, T, T) { return T(1); }, [](T, T, T) { return T(-1); });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  return binary<T>(
      "mul", a, b, [](T x, T y) { return x * y; },
      [](T, T y, T) { return y; }, [](T x, T, T) { return x; });
}

template <typename T>
Tensor<T> div(const Tensor<T>& a, const Tensor<T>& b) {
  return binary<T>(
      "div", a, b, [](T x, T y) { return x / y; },
      [](T, T y, T) { return T(1) / y; },
      [](T, T y, T out) { return -out / y; });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, double s) {
  const T st = static_cast<T>(s);
  return unary<T>(
      "scale", a, [st](T x) { return x * st; }, [st](T, T) { return st; });
}

template <typename T>
Tensor<T> add_scalar(const Tensor<T>& a, double s) {
  const T st = static_cast<T>(s);
  return unary<T>(
      "add_scalar", a, [st](T x) { return x + st; },
      [](T, T) { return T(1); });
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    shape_error("matmul", "incompatible shapes " + shape_string(a.shape()) +
                              " and " + shape_string(b.shape()));
  }
  const std::size_t m = static_cast<std::size_t>(a.dim(0));
  const std::size_t k = static_cast<std::size_t>(a.dim(1));
  const std::size_t n = static_cast<std::size_t>(b.dim(1));
  Buffer<T> out = alloc<T>(m * n);
  kernels::gemm_nn(a.data().data(), b.data().data(), out.data(), m, k, n);
  return make_result<T>("matmul", {a.dim(0), b.dim(1)}, std::move(out), {a, b},
                        [m, k, n](Node<T>& self) {
                          auto& A = self.inputs[0];
                          auto& B = self.inputs[1];
                          if (wants(A)) {
                            kernels::gemm_nt(self.grad.data(), B->value.data(),
                                             A->ensure_grad().data(), m, n, k);
                          }
                          if (wants(B)) {
                            kernels::gemm_tn(A->value.data(), self.grad.data(),
                                             B->ensure_grad().data(), m, k, n);
                          }
                        });
}

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  if (w.rank() != 2 || x.rank() < 1 || x.dim(-1) != w.dim(0)) {
    shape_error("linear", "input " + shape_string(x.shape()) +
                              " incompatible with weight " +
                              shape_string(w.shape()));
  }
  const bool has_bias = b.defined();
  if (has_bias && (b.rank() != 1 || b.dim(0) != w.dim(1))) {
    shape_error("linear", "bias " + shape_string(b.shape()) +
                              " does not match weight " +
                              shape_string(w.shape()));
  }
  const std::size_t k = static_cast<std::size_t>(w.dim(0));
  const std::size_t n = static_cast<std::size_t>(w.dim(1));
  const std::size_t m = static_cast<std::size_t>(x.numel()) / k;
  Buffer<T> out = alloc<T>(m * n);
  if (has_bias) {
    auto bv = b.data();
    for (std::size_t i = 0; i < m; ++i) {
      std::copy(bv.begin(), bv.end(), out.begin() + static_cast<long>(i * n));
    }
  }
  kernels::gemm_nn(x.data().data(), w.data().data(), out.data(), m, k, n);
  Shape shape = x.shape();
  shape.back() = w.dim(1);
  std::vector<Tensor<T>> inputs = {x, w};
  if (has_bias) inputs.push_back(b);
  return make_result<T>(
      "linear", std::move(shape), std::move(out), std::move(inputs),
      [m, k, n, has_bias](Node<T>& self) {
        auto& X = self.inputs[0];
        auto& W = self.inputs[1];
        if (wants(X)) {
          kernels::gemm_nt(self.grad.data(), W->value.data(),
                           X->ensure_grad().data(), m, n, k);
        }
        if (wants(W)) {
          kernels::gemm_tn(X->value.data(), self.grad.data(),
                           W->ensure_grad().data(), m, k, n);
        }
        if (has_bias && wants(self.inputs[2])) {
          auto& gb = self.inputs[2]->ensure_grad();
          for (std::size_t i = 0; i < m; ++i) {
            const T* row = self.grad.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) gb[j] += row[j];
          }
        }
      });
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& a) {
  if (a.rank() != 2) {
    shape_error("transpose", "expects rank 2, got " + shape_string(a.shape()));
  }
  const std::size_t r = static_cast<std::size_t>(a.dim(0));
  const std::size_t c = static_cast<std::size_t>(a.dim(1));
  Buffer<T> out = alloc<T>(r * c);
  auto av = a.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = av[i * c + j];
  return make_result<T>("transpose", {a.dim(1), a.dim(0)}, std::move(out), {a},
                        [r, c](Node<T>& self) {
                          auto& ga = self.inputs[0]->ensure_grad();
                          for (std::size_t i = 0; i < r; ++i)
                            for (std::size_t j = 0; j < c; ++j)
                              ga[i * c + j] += self.grad[j * r + i];
                        });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, const Shape& shape) {
  if (shape_numel(shape) != a.numel()) {
    shape_error("reshape", "cannot reshape " + shape_string(a.shape()) +
                               " to " + shape_string(shape));
  }
  Buffer<T> out(a.data().begin(), a.data().end());
  return make_result<T>("reshape", shape, std::move(out), {a},
                        [](Node<T>& self) {
                          auto& ga = self.inputs[0]->ensure_grad();
                          for (std::size_t i = 0; i < ga.size(); ++i)
                            ga[i] += self.grad[i];
                        });
}

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, int axis) {
  if (parts.empty()) shape_error("concat", "no inputs");
  const Shape& first = parts[0].shape();
  axis = normalize_axis("concat", axis, static_cast<int>(first.size()));
  Shape out_shape = first;
  out_shape[static_cast<std::size_t>(axis)] = 0;
  for (const auto& p : parts) {
    Shape s = p.shape();
    if (s.size() != first.size()) {
      shape_error("concat", "rank mismatch " + shape_string(s) + " vs " +
                                shape_string(first));
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (static_cast<int>(i) != axis && s[i] != first[i]) {
        shape_error("concat", "shape mismatch " + shape_string(s) + " vs " +
                                  shape_string(first));
      }
    }
    out_shape[static_cast<std::size_t>(axis)] += s[static_cast<std::size_t>(axis)];
  }
  const AxisSplit total = split_axis(out_shape, axis);
  std::vector<std::size_t> widths;
  for (const auto& p : parts) {
    widths.push_back(static_cast<std::size_t>(p.dim(axis)) * total.inner);
  }
  const std::size_t row = total.extent * total.inner;
  Buffer<T> out = alloc<T>(total.outer * row);
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    auto pv = parts[p].data();
    for (std::size_t o = 0; o < total.outer; ++o) {
      std::copy_n(pv.begin() + static_cast<long>(o * widths[p]), widths[p],
                  out.begin() + static_cast<long>(o * row + offset));
    }
    offset += widths[p];
  }
  return make_result<T>(
      "concat", out_shape, std::move(out), parts,
      [widths, row, outer = total.outer](Node<T>& self) {
        std::size_t offset = 0;
        for (std::size_t p = 0; p < self.inputs.size(); ++p) {
          auto& in = self.inputs[p];
          if (wants(in)) {
            auto& g = in->ensure_grad();
            for (std::size_t o = 0; o < outer; ++o)
              for (std::size_t i = 0; i < widths[p]; ++i)
                g[o * widths[p] + i] += self.grad[o * row + offset + i];
          }
          offset += widths[p];
        }
      });
}

template <typename T>
Tensor<T> slice(const Tensor<T>& a, int axis, std::int64_t begin,
                std::int64_t end) {
  axis = normalize_axis("slice", axis, a.rank());
  const std::int64_t extent = a.dim(axis);
  if (begin < 0 || end > extent || begin > end) {
    shape_error("slice", "range [" + std::to_string(begin) + "," +
                             std::to_string(end) + ") invalid for " +
                             shape_string(a.shape()) + " axis " +
                             std::to_string(axis));
  }
  const AxisSplit s = split_axis(a.shape(), axis);
  Shape out_shape = a.shape();
  out_shape[static_cast<std::size_t>(axis)] = end - begin;
  const std::size_t width = static_cast<std::size_t>(end - begin) * s.inner;
  const std::size_t in_row = s.extent * s.inner;
  const std::size_t start = static_cast<std::size_t>(begin) * s.inner;
  Buffer<T> out = alloc<T>(s.outer * width);
  auto av = a.data();
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::copy_n(av.begin() + static_cast<long>(o * in_row + start), width,
                out.begin() + static_cast<long>(o * width));
  }
  return make_result<T>("slice", out_shape, std::move(out), {a},
                        [width, in_row, start, outer = s.outer](Node<T>& self) {
                          auto& g = self.inputs[0]->ensure_grad();
                          for (std::size_t o = 0; o < outer; ++o)
                            for (std::size_t i = 0; i < width; ++i)
                              g[o * in_row + start + i] +=
                                  self.grad[o * width + i];
                        });
}

template <typename T>
Tensor<T> index_rows(const Tensor<T>& a,
                     std::span<const std::int64_t> indices) {
  if (a.rank() < 1) shape_error("index_rows", "expects rank >= 1");
  const std::int64_t rows = a.dim(0);
  const std::size_t width = static_cast<std::size_t>(a.numel() / std::max<std::int64_t>(rows, 1));
  std::vector<std::int64_t> idx(indices.begin(), indices.end());
  for (std::int64_t i : idx) {
    if (i < 0 || i >= rows) {
      shape_error("index_rows", "row " + std::to_string(i) +
                                    " out of range for " +
                                    shape_string(a.shape()));
    }
  }
  Shape out_shape = a.shape();
  out_shape[0] = static_cast<std::int64_t>(idx.size());
  Buffer<T> out = alloc<T>(idx.size() * width);
  auto av = a.data();
  for (std::size_t r = 0; r < idx.size(); ++r) {
    std::copy_n(av.begin() + static_cast<long>(static_cast<std::size_t>(idx[r]) * width),
                width, out.begin() + static_cast<long>(r * width));
  }
  return make_result<T>("index_rows", out_shape, std::move(out), {a},
                        [idx = std::move(idx), width](Node<T>& self) {
                          auto& g = self.inputs[0]->ensure_grad();
                          for (std::size_t r = 0; r < idx.size(); ++r) {
                            T* dst = g.data() + static_cast<std::size_t>(idx[r]) * width;
                            const T* src = self.grad.data() + r * width;
                            for (std::size_t i = 0; i < width; ++i) dst[i] += src[i];
                          }
                        });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& a) {
  return unary<T>(
      "relu", a, [](T x) { return x > T(0) ? x : T(0); },
      [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a) {
  return unary<T>(
      "sigmoid", a,
      [](T x) {
        if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
        const T e = std::exp(x);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> inverse_sigmoid(const Tensor<T>& a) {
  const T lo = static_cast<T>(kInverseSigmoidEps);
  const T hi = T(1) - lo;
  return unary<T>(
      "inverse_sigmoid", a,
      [lo, hi](T x) {
        const T c = std::clamp(x, lo, hi);
        return std::log(c / (T(1) - c));
      },
      [lo, hi](T x, T) {
        if (x < lo || x > hi) return T(0);
        return T(1) / (x * (T(1) - x));
      });
}

template <typename T>
Tensor<T> exp(const Tensor<T>& a) {
  return unary<T>(
      "exp", a, [](T x) { return std::exp(x); }, [](T, T y) { return y; });
}

template <typename T>
Tensor<T> log(const Tensor<T>& a) {
  return unary<T>(
      "log", a, [](T x) { return std::log(x); },
      [](T x, T) { return T(1) / x; });
}

template <typename T>
Tensor<T> pow(const Tensor<T>& a, double p) {
  const T pt = static_cast<T>(p);
  return unary<T>(
      "pow", a, [pt](T x) { return std::pow(x, pt); },
      [pt](T x, T) {
        if (pt == T(0)) return T(0);
        return pt * std::pow(x, pt - T(1));
      });
}

template <typename T>
Tensor<T> clamp(const Tensor<T>& a, double lo, double hi) {
  const T l = static_cast<T>(lo);
  const T h = static_cast<T>(hi);
  return unary<T>(
      "clamp", a, [l, h](T x) { return std::clamp(x, l, h); },
      [l, h](T x, T) { return (x >= l && x <= h) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& a, int axis) {
  axis = normalize_axis("softmax", axis, a.rank());
  const AxisSplit s = split_axis(a.shape(), axis);
  auto av = a.data();
  Buffer<T> out = alloc<T>(av.size());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t in = 0; in < s.inner; ++in) {
      const std::size_t base = o * s.extent * s.inner + in;
      T mx = av[base];
      for (std::size_t e = 1; e < s.extent; ++e)
        mx = std::max(mx, av[base + e * s.inner]);
      T z = T(0);
      for (std::size_t e = 0; e < s.extent; ++e) {
        const T v = std::exp(av[base + e * s.inner] - mx);
        out[base + e * s.inner] = v;
        z += v;
      }
      for (std::size_t e = 0; e < s.extent; ++e) out[base + e * s.inner] /= z;
    }
  }
  return make_result<T>("softmax", a.shape(), std::move(out), {a},
                        [s](Node<T>& self) {
                          auto& g = self.inputs[0]->ensure_grad();
                          for (std::size_t o = 0; o < s.outer; ++o) {
                            for (std::size_t in = 0; in < s.inner; ++in) {
                              const std::size_t base =
                                  o * s.extent * s.inner + in;
                              T dot = T(0);
                              for (std::size_t e = 0; e < s.extent; ++e) {
                                const std::size_t i = base + e * s.inner;
                                dot += self.grad[i] * self.value[i];
                              }
                              for (std::size_t e = 0; e < s.extent; ++e) {
                                const std::size_t i = base + e * s.inner;
                                g[i] += self.value[i] * (self.grad[i] - dot);
                              }
                            }
                          }
                        });
}

template <typename T>
Tensor<T> log_softmax(const Tensor<T>& a, int axis) {
  axis = normalize_axis("log_softmax", axis, a.rank());
  const AxisSplit s = split_axis(a.shape(), axis);
  auto av = a.data();
  Buffer<T> out = alloc<T>(av.size());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t in = 0; in < s.inner; ++in) {
      const std::size_t base = o * s.extent * s.inner + in;
      T mx = av[base];
      for (std::size_t e = 1; e < s.extent; ++e)
        mx = std::max(mx, av[base + e * s.inner]);
      T z = T(0);
      for (std::size_t e = 0; e < s.extent; ++e)
        z += std::exp(av[base + e * s.inner] - mx);
      const T lz = mx + std::log(z);
      for (std::size_t e = 0; e < s.extent; ++e)
        out[base + e * s.inner] = av[base + e * s.inner] - lz;
    }
  }
  return make_result<T>("log_softmax", a.shape(), std::move(out), {a},
                        [s](Node<T>& self) {
                          auto& g = self.inputs[0]->ensure_grad();
                          for (std::size_t o = 0; o < s.outer; ++o) {
                            for (std::size_t in = 0; in < s.inner; ++in) {
                              const std::size_t base =
                                  o * s.extent * s.inner + in;
                              T total = T(0);
                              for (std::size_t e = 0; e < s.extent; ++e)
                                total += self.grad[base + e * s.inner];
                              for (std::size_t e = 0; e < s.extent; ++e) {
                                const std::size_t i = base + e * s.inner;
                                g[i] += self.grad[i] -
                                        std::exp(self.value[i]) * total;
                              }
                            }
                          }
                        });
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& a, const Tensor<T>& gamma,
                     const Tensor<T>& beta, double eps) {
  if (a.rank() < 1) shape_error("layer_norm", "expects rank >= 1");
  const std::size_t d = static_cast<std::size_t>(a.dim(-1));
  const std::size_t rows = static_cast<std::size_t>(a.numel()) / std::max<std::size_t>(d, 1);
  const bool has_gamma = gamma.defined();
  const bool has_beta = beta.defined();
  if ((has_gamma && gamma.numel() != static_cast<std::int64_t>(d)) ||
      (has_beta && beta.numel() != static_cast<std::int64_t>(d))) {
    shape_error("layer_norm", "affine parameters do not match last axis of " +
                                  shape_string(a.shape()));
  }
  auto av = a.data();
  Buffer<T> xhat = alloc<T>(av.size());
  std::vector<T> inv_std(rows);
  Buffer<T> out = alloc<T>(av.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* x = av.data() + r * d;
    T mu = T(0);
    for (std::size_t i = 0; i < d; ++i) mu += x[i];
    mu /= static_cast<T>(d);
    T var = T(0);
    for (std::size_t i = 0; i < d; ++i) var += (x[i] - mu) * (x[i] - mu);
    var /= static_cast<T>(d);
    const T is = T(1) / std::sqrt(var + static_cast<T>(eps));
    inv_std[r] = is;
    for (std::size_t i = 0; i < d; ++i) {
      const T h = (x[i] - mu) * is;
      xhat[r * d + i] = h;
      T y = h;
      if (has_gamma) y *= gamma.data()[i];
      if (has_beta) y += beta.data()[i];
      out[r * d + i] = y;
    }
  }
  std::vector<Tensor<T>> inputs = {a};
  if (has_gamma) inputs.push_back(gamma);
  if (has_beta) inputs.push_back(beta);
  return make_result<T>(
      "layer_norm", a.shape(), std::move(out), std::move(inputs),
      [d, rows, has_gamma, has_beta, xhat = std::move(xhat),
       inv_std = std::move(inv_std)](Node<T>& self) {
        auto& A = self.inputs[0];
        const Node<T>* G = has_gamma ? self.inputs[1].get() : nullptr;
        if (has_gamma && wants(self.inputs[1])) {
          auto& gg = self.inputs[1]->ensure_grad();
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t i = 0; i < d; ++i)
              gg[i] += self.grad[r * d + i] * xhat[r * d + i];
        }
        if (has_beta) {
          auto& B = self.inputs[has_gamma ? 2 : 1];
          if (wants(B)) {
            auto& gb = B->ensure_grad();
            for (std::size_t r = 0; r < rows; ++r)
              for (std::size_t i = 0; i < d; ++i) gb[i] += self.grad[r * d + i];
          }
        }
        if (!wants(A)) return;
        auto& ga = A->ensure_grad();
        std::vector<T> dh(d);
        for (std::size_t r = 0; r < rows; ++r) {
          T m1 = T(0), m2 = T(0);
          for (std::size_t i = 0; i < d; ++i) {
            dh[i] = self.grad[r * d + i] * (G ? G->value[i] : T(1));
            m1 += dh[i];
            m2 += dh[i] * xhat[r * d + i];
          }
          m1 /= static_cast<T>(d);
          m2 /= static_cast<T>(d);
          for (std::size_t i = 0; i < d; ++i) {
            ga[r * d + i] +=
                inv_std[r] * (dh[i] - m1 - xhat[r * d + i] * m2);
          }
        }
      });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T total = T(0);
  for (T v : a.data()) total += v;
  Buffer<T> out(1, total);
  return make_result<T>("sum", {}, std::move(out), {a}, [](Node<T>& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (auto& v : g) v += self.grad[0];
  });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  if (a.numel() == 0) shape_error("mean", "empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.numel()));
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a, int axis) {
  axis = normalize_axis("sum", axis, a.rank());
  const AxisSplit s = split_axis(a.shape(), axis);
  Shape out_shape = a.shape();
  out_shape.erase(out_shape.begin() + axis);
  Buffer<T> out = alloc<T>(s.outer * s.inner);
  auto av = a.data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t e = 0; e < s.extent; ++e)
      for (std::size_t in = 0; in < s.inner; ++in)
        out[o * s.inner + in] += av[(o * s.extent + e) * s.inner + in];
  return make_result<T>("sum_axis", out_shape, std::move(out), {a},
                        [s](Node<T>& self) {
                          auto& g = self.inputs[0]->ensure_grad();
                          for (std::size_t o = 0; o < s.outer; ++o)
                            for (std::size_t e = 0; e < s.extent; ++e)
                              for (std::size_t in = 0; in < s.inner; ++in)
                                g[(o * s.extent + e) * s.inner + in] +=
                                    self.grad[o * s.inner + in];
                        });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a, int axis) {
  const int ax = normalize_axis("mean", axis, a.rank());
  if (a.dim(ax) == 0) shape_error("mean", "empty axis");
  return scale(sum(a, ax), 1.0 / static_cast<double>(a.dim(ax)));
}

template <typename T>
Tensor<T> l1_distance(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape() || a.rank() < 1) {
    shape_error("l1_distance", "shape mismatch " + shape_string(a.shape()) +
                                   " vs " + shape_string(b.shape()));
  }
  const std::size_t k = static_cast<std::size_t>(a.dim(-1));
  const std::size_t rows = static_cast<std::size_t>(a.numel()) / std::max<std::size_t>(k, 1);
  Shape out_shape(a.shape().begin(), a.shape().end() - 1);
  Buffer<T> out = alloc<T>(rows);
  auto av = a.data();
  auto bv = b.data();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t i = 0; i < k; ++i)
      out[r] += std::abs(av[r * k + i] - bv[r * k + i]);
  return make_result<T>(
      "l1_distance", out_shape, std::move(out), {a, b},
      [k, rows](Node<T>& self) {
        auto& A = self.inputs[0];
        auto& B = self.inputs[1];
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t i = 0; i < k; ++i) {
            const T diff = A->value[r * k + i] - B->value[r * k + i];
            const T sgn = diff > T(0) ? T(1) : (diff < T(0) ? T(-1) : T(0));
            if (wants(A)) A->ensure_grad()[r * k + i] += self.grad[r] * sgn;
            if (wants(B)) B->ensure_grad()[r * k + i] -= self.grad[r] * sgn;
          }
        }
      });
}

template <typename T>
Tensor<T> cosine_similarity(const Tensor<T>& a, const Tensor<T>& b,
                            double eps) {
  if (a.shape() != b.shape() || a.rank() < 1) {
    shape_error("cosine_similarity", "shape mismatch " +
                                         shape_string(a.shape()) + " vs " +
                                         shape_string(b.shape()));
  }
  const std::size_t k = static_cast<std::size_t>(a.dim(-1));
  const std::size_t rows = static_cast<std::size_t>(a.numel()) / std::max<std::size_t>(k, 1);
  const T e2 = static_cast<T>(eps * eps);
  Shape out_shape(a.shape().begin(), a.shape().end() - 1);
  Buffer<T> out = alloc<T>(rows);
  std::vector<T> na(rows), nb(rows);
  auto av = a.data();
  auto bv = b.data();
  for (std::size_t r = 0; r < rows; ++r) {
    T ab = T(0), aa = T(0), bb = T(0);
    for (std::size_t i = 0; i < k; ++i) {
      ab += av[r * k + i] * bv[r * k + i];
      aa += av[r * k + i] * av[r * k + i];
      bb += bv[r * k + i] * bv[r * k + i];
    }
    na[r] = std::sqrt(aa + e2);
    nb[r] = std::sqrt(bb + e2);
    out[r] = ab / (na[r] * nb[r]);
  }
  return make_result<T>(
      "cosine_similarity", out_shape, std::move(out), {a, b},
      [k, rows, na = std::move(na), nb = std::move(nb)](Node<T>& self) {
        auto& A = self.inputs[0];
        auto& B = self.inputs[1];
        for (std::size_t r = 0; r < rows; ++r) {
          const T c = self.value[r];
          const T g = self.grad[r];
          for (std::size_t i = 0; i < k; ++i) {
            const T x = A->value[r * k + i];
            const T y = B->value[r * k + i];
            if (wants(A)) {
              A->ensure_grad()[r * k + i] +=
                  g * (y / (na[r] * nb[r]) - c * x / (na[r] * na[r]));
            }
            if (wants(B)) {
              B->ensure_grad()[r * k + i] +=
                  g * (x / (na[r] * nb[r]) - c * y / (nb[r] * nb[r]));
            }
          }
        }
      });
}

template <typename T>
Tensor<T> bce_with_logits(const Tensor<T>& logits, const Tensor<T>& targets) {
  if (logits.shape() != targets.shape()) {
    shape_error("bce_with_logits", "shape mismatch " +
                                       shape_string(logits.shape()) + " vs " +
                                       shape_string(targets.shape()));
  }
  auto xv = logits.data();
  auto tv = targets.data();
  Buffer<T> out = alloc<T>(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    const T x = xv[i];
    out[i] = std::max(x, T(0)) - x * tv[i] + std::log1p(std::exp(-std::abs(x)));
  }
  return make_result<T>(
      "bce_with_logits", logits.shape(), std::move(out), {logits, targets},
      [](Node<T>& self) {
        auto& X = self.inputs[0];
        auto& Y = self.inputs[1];
        for (std::size_t i = 0; i < X->value.size(); ++i) {
          const T x = X->value[i];
          const T p = x >= T(0) ? T(1) / (T(1) + std::exp(-x))
                                : std::exp(x) / (T(1) + std::exp(x));
          if (wants(X)) X->ensure_grad()[i] += self.grad[i] * (p - Y->value[i]);
          if (wants(Y)) Y->ensure_grad()[i] -= self.grad[i] * x;
        }
      });
}

#define SGQ_INSTANTIATE_OPS(T)                                                \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> div(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> scale(const Tensor<T>&, double);                         \
  template Tensor<T> add_scalar(const Tensor<T>&, double);                    \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);              \
  template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&,               \
                            const Tensor<T>&);                                \
  template Tensor<T> transpose(const Tensor<T>&);                             \
  template Tensor<T> reshape(const Tensor<T>&, const Shape&);                 \
  template Tensor<T> concat(const std::vector<Tensor<T>>&, int);              \
  template Tensor<T> slice(const Tensor<T>&, int, std::int64_t, std::int64_t); \
  template Tensor<T> index_rows(const Tensor<T>&,                             \
                                std::span<const std::int64_t>);               \
  template Tensor<T> relu(const Tensor<T>&);                                  \
  template Tensor<T> sigmoid(const Tensor<T>&);                               \
  template Tensor<T> inverse_sigmoid(const Tensor<T>&);                       \
  template Tensor<T> exp(const Tensor<T>&);                                   \
  template Tensor<T> log(const Tensor<T>&);                                   \
  template Tensor<T> pow(const Tensor<T>&, double);                           \
  template Tensor<T> clamp(const Tensor<T>&, double, double);                 \
  template Tensor<T> softmax(const Tensor<T>&, int);                          \
  template Tensor<T> log_softmax(const Tensor<T>&, int);                      \
  template Tensor<T> layer_norm(const Tensor<T>&, const Tensor<T>&,           \
                                const Tensor<T>&, double);                    \
  template Tensor<T> sum(const Tensor<T>&);                                   \
  template Tensor<T> mean(const Tensor<T>&);                                  \
  template Tensor<T> sum(const Tensor<T>&, int);                              \
  template Tensor<T> mean(const Tensor<T>&, int);                             \
  template Tensor<T> l1_distance(const Tensor<T>&, const Tensor<T>&);         \
  template Tensor<T> cosine_similarity(const Tensor<T>&, const Tensor<T>&,    \
                                       double);                               \
  template Tensor<T> bce_with_logits(const Tensor<T>&, const Tensor<T>&);

SGQ_INSTANTIATE_OPS(float)
SGQ_INSTANTIATE_OPS(double)

}  // namespace sgq
