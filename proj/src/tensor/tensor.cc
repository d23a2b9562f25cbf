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

#include "sgq/tensor/tensor.h"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <stdexcept>

namespace sgq {

std::int64_t shape_numel(const Shape& shape) {
  std::int64_t n = 1;
  for (std::int64_t e : shape) {
    if (e < 0) shape_error("shape", "negative extent in " + shape_string(shape));
    n *= e;
  }
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ",";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

void shape_error(const std::string& op, const std::string& msg) {
  throw std::invalid_argument(op + ": " + msg);
}

NodeId next_node_id() {
  static std::atomic<NodeId> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

namespace {

template <typename T>
Tape<T>*& active_slot() {
  thread_local Tape<T>* slot = nullptr;
  return slot;
}

template <typename T>
std::shared_ptr<Node<T>> new_node(const Shape& shape) {
  auto node = std::make_shared<Node<T>>();
  node->shape = shape;
  node->value.assign(static_cast<std::size_t>(shape_numel(shape)), T(0));
  node->id = next_node_id();
  return node;
}

}  // namespace

template <typename T>
Tensor<T> Tensor<T>::zeros(const Shape& shape) {
  return Tensor(new_node<T>(shape));
}

template <typename T>
Tensor<T> Tensor<T>::full(const Shape& shape, T value) {
  auto node = new_node<T>(shape);
  std::fill(node->value.begin(), node->value.end(), value);
  return Tensor(node);
}

template <typename T>
Tensor<T> Tensor<T>::constant(const Shape& shape, std::span<const T> values) {
  auto node = new_node<T>(shape);
  if (static_cast<std::int64_t>(values.size()) != shape_numel(shape)) {
    shape_error("constant", "got " + std::to_string(values.size()) +
                                " values for shape " + shape_string(shape));
  }
  std::copy(values.begin(), values.end(), node->value.begin());
  return Tensor(node);
}

template <typename T>
Tensor<T> Tensor<T>::constant(const Shape& shape,
                              std::initializer_list<T> values) {
  return constant(shape, std::span<const T>(values.begin(), values.size()));
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value) {
  return full({}, value);
}

template <typename T>
Tensor<T> Tensor<T>::parameter(const Shape& shape, std::span<const T> values) {
  Tensor t = constant(shape, values);
  t.node_->requires_grad = true;
  return t;
}

template <typename T>
std::int64_t Tensor<T>::dim(int axis) const {
  const int r = rank();
  if (axis < 0) axis += r;
  if (axis < 0 || axis >= r) {
    shape_error("dim", "axis out of range for " + shape_string(shape()));
  }
  return node_->shape[static_cast<std::size_t>(axis)];
}

template <typename T>
T Tensor<T>::item() const {
  if (numel() != 1) {
    shape_error("item", "tensor of shape " + shape_string(shape()) +
                            " is not a scalar");
  }
  return node_->value[0];
}

template <typename T>
T Tensor<T>::at(std::initializer_list<std::int64_t> index) const {
  if (index.size() != node_->shape.size()) {
    shape_error("at", "index rank mismatch for " + shape_string(shape()));
  }
  std::int64_t flat = 0;
  std::size_t axis = 0;
  for (std::int64_t i : index) {
    const std::int64_t extent = node_->shape[axis++];
    if (i < 0 || i >= extent) shape_error("at", "index out of range");
    flat = flat * extent + i;
  }
  return node_->value[static_cast<std::size_t>(flat)];
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return constant(shape(), data());
}

template <typename T>
Tensor<T> Tensor<T>::clone() const {
  Tensor t = constant(shape(), data());
  t.node_->requires_grad = node_->requires_grad && !node_->recorded;
  return t;
}

template <typename T>
Tape<T>::Tape() : previous_(active_slot<T>()) {
  active_slot<T>() = this;
}

template <typename T>
Tape<T>::~Tape() {
  active_slot<T>() = previous_;
}

template <typename T>
Tape<T>* Tape<T>::active() {
  return active_slot<T>();
}

template <typename T>
void Tape<T>::record(const std::shared_ptr<Node<T>>& node) {
  node->recorded = true;
  nodes_.push_back(node);
}

template <typename T>
GradientMap<T> Tape<T>::backward(const Tensor<T>& loss) {
  if (loss.numel() != 1) {
    shape_error("backward", "loss must be scalar, got shape " +
                                shape_string(loss.shape()));
  }
  GradientMap<T> result;
  if (!loss.requires_grad()) return result;

  std::ptrdiff_t start = -1;
  for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(nodes_.size()) - 1;
       i >= 0; --i) {
    if (nodes_[static_cast<std::size_t>(i)] == loss.node()) {
      start = i;
      break;
    }
  }
  if (start < 0) {
    throw std::invalid_argument("backward: loss is not on this tape");
  }

  loss.node()->ensure_grad()[0] = T(1);
  std::vector<std::shared_ptr<Node<T>>> leaves;
  for (std::ptrdiff_t i = start; i >= 0; --i) {
    Node<T>& node = *nodes_[static_cast<std::size_t>(i)];
    if (!node.grad.empty() && node.backward) {
      node.backward(node);
      for (const auto& in : node.inputs) {
        if (in->requires_grad && !in->recorded && !in->grad.empty()) {
          leaves.push_back(in);
        }
      }
    }
    Buffer<T>().swap(node.grad);
  }
  for (const auto& leaf : leaves) {
    if (leaf->grad.empty() || result.find(leaf->id)) continue;
    auto g = std::make_shared<Node<T>>();
    g->shape = leaf->shape;
    g->value = std::move(leaf->grad);
    g->id = next_node_id();
    result.insert(leaf->id, Tensor<T>(g));
    leaf->grad = Buffer<T>();
  }
  for (const auto& node : nodes_) {
    node->inputs.clear();
    node->backward = nullptr;
    Buffer<T>().swap(node->grad);
  }
  nodes_.clear();
  return result;
}

template <typename T>
NoGradGuard<T>::NoGradGuard() : saved_(active_slot<T>()) {
  active_slot<T>() = nullptr;
}

template <typename T>
NoGradGuard<T>::~NoGradGuard() {
  active_slot<T>() = saved_;
}

template <typename T>
bool will_record(std::initializer_list<const Tensor<T>*> inputs) {
  if (Tape<T>::active() == nullptr) return false;
  for (const Tensor<T>* t : inputs) {
    if (t->requires_grad()) return true;
  }
  return false;
}

template <typename T>
Tensor<T> make_result(const char* op, Shape shape, Buffer<T> value,
                      std::vector<Tensor<T>> inputs,
                      std::function<void(Node<T>&)> backward) {
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->id = next_node_id();
  node->op = op;
  if (static_cast<std::int64_t>(node->value.size()) !=
      shape_numel(node->shape)) {
    shape_error(op, "internal: value size does not match shape " +
                        shape_string(node->shape));
  }
  Tape<T>* tape = Tape<T>::active();
  bool any = false;
  for (const auto& in : inputs) any = any || in.requires_grad();
  if (tape != nullptr && any && backward) {
    node->requires_grad = true;
    node->inputs.reserve(inputs.size());
    for (auto& in : inputs) node->inputs.push_back(in.node());
    node->backward = std::move(backward);
    tape->record(node);
  }
  return Tensor<T>(node);
}

template class Tensor<float>;
template class Tensor<double>;
template class Tape<float>;
template class Tape<double>;
template class NoGradGuard<float>;
template class NoGradGuard<double>;
template bool will_record<float>(std::initializer_list<const Tensor<float>*>);
template bool will_record<double>(
    std::initializer_list<const Tensor<double>*>);
template Tensor<float> make_result<float>(const char*, Shape, Buffer<float>,
                                          std::vector<Tensor<float>>,
                                          std::function<void(Node<float>&)>);
template Tensor<double> make_result<double>(
    const char*, Shape, Buffer<double>, std::vector<Tensor<double>>,
    std::function<void(Node<double>&)>);

}  // namespace sgq
