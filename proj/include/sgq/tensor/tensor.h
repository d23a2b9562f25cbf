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

#ifndef SGQ_TENSOR_TENSOR_H_
#define SGQ_TENSOR_TENSOR_H_

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sgq/tensor/alloc.h"

namespace sgq {

using Shape = std::vector<std::int64_t>;
using NodeId = std::uint64_t;

std::int64_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

// Throws std::invalid_argument with "<op>: <message>" text.
[[noreturn]] void shape_error(const std::string& op, const std::string& msg);

NodeId next_node_id();

template <typename T>
struct Node {
  Shape shape;
  Buffer<T> value;
  Buffer<T> grad;  // empty until backward reaches the node
  bool requires_grad = false;
  bool recorded = false;  // true for op outputs living on a tape
  NodeId id = 0;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  // Accumulates self.grad into the grads of inputs that require grad.
  std::function<void(Node&)> backward;

  Buffer<T>& ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), T(0));
    return grad;
  }
};

// Dense row-major array. Copies share storage; use clone() for a deep copy.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  static Tensor zeros(const Shape& shape);
  static Tensor full(const Shape& shape, T value);
  static Tensor constant(const Shape& shape, std::span<const T> values);
  static Tensor constant(const Shape& shape, std::initializer_list<T> values);
  static Tensor scalar(T value);
  // A leaf that collects gradients.
  static Tensor parameter(const Shape& shape, std::span<const T> values);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::int64_t dim(int axis) const;
  int rank() const { return static_cast<int>(node_->shape.size()); }
  std::int64_t numel() const {
    return static_cast<std::int64_t>(node_->value.size());
  }
  std::span<const T> data() const { return node_->value; }
  // Writes bypass the tape; only meant for parameters and fresh constants.
  std::span<T> mutable_data() { return node_->value; }
  T item() const;
  T at(std::initializer_list<std::int64_t> index) const;

  bool requires_grad() const { return node_->requires_grad; }
  NodeId id() const { return node_->id; }
  const char* op() const { return node_->op; }

  Tensor detach() const;
  Tensor clone() const;
  std::vector<T> to_vector() const {
    return std::vector<T>(node_->value.begin(), node_->value.end());
  }

  const std::shared_ptr<Node<T>>& node() const { return node_; }

 private:
  std::shared_ptr<Node<T>> node_;
};

template <typename T>
class Tape;

template <typename T>
class GradientMap {
 public:
  void insert(NodeId id, Tensor<T> grad) { grads_[id] = std::move(grad); }
  const Tensor<T>* find(const Tensor<T>& t) const {
    auto it = grads_.find(t.id());
    return it == grads_.end() ? nullptr : &it->second;
  }
  const Tensor<T>* find(NodeId id) const {
    auto it = grads_.find(id);
    return it == grads_.end() ? nullptr : &it->second;
  }
  bool contains(const Tensor<T>& t) const { return grads_.count(t.id()) > 0; }
  std::size_t size() const { return grads_.size(); }
  bool empty() const { return grads_.empty(); }
  const std::unordered_map<NodeId, Tensor<T>>& entries() const {
    return grads_;
  }

 private:
  std::unordered_map<NodeId, Tensor<T>> grads_;
};

// Records differentiable operations while alive. Tapes nest per thread;
// ops record onto the innermost active tape. Without an active tape every
// op produces a constant, which is how inference runs.
template <typename T>
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  static Tape* active();

  void record(const std::shared_ptr<Node<T>>& node);
  std::size_t size() const { return nodes_.size(); }
  const std::vector<std::shared_ptr<Node<T>>>& nodes() const {
    return nodes_;
  }

  // Reverse sweep from a scalar loss. Consumes the tape.
  GradientMap<T> backward(const Tensor<T>& loss);

 private:
  std::vector<std::shared_ptr<Node<T>>> nodes_;
  Tape* previous_ = nullptr;
};

// Suspends recording for its lifetime.
template <typename T>
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  Tape<T>* saved_;
};

// Builds an op output. When a tape is active and some input requires grad
// the node is recorded with `backward`; otherwise the result is a constant
// and the inputs are not retained.
template <typename T>
Tensor<T> make_result(const char* op, Shape shape, Buffer<T> value,
                      std::vector<Tensor<T>> inputs,
                      std::function<void(Node<T>&)> backward);

// True when an op over `inputs` would be recorded.
template <typename T>
bool will_record(std::initializer_list<const Tensor<T>*> inputs);

}  // namespace sgq

#endif  // SGQ_TENSOR_TENSOR_H_
