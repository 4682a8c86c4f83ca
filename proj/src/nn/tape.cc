// Copyright 2026 The Taxidest Authors.
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

#include "taxidest/nn/tape.h"

#include "taxidest/errors.h"

namespace taxidest::nn {

template <typename T>
std::uint32_t Tape<T>::push(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

template <typename T>
Var<T> Tape<T>::constant(Tensor<T> value) {
  Node n;
  n.value = std::move(value);
  return {this, push(std::move(n))};
}

template <typename T>
Var<T> Tape<T>::parameter(Parameter<T>& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return {this, it->second};
  Node n;
  n.param = &p;
  n.needs_grad = true;
  const auto id = push(std::move(n));
  param_nodes_.emplace(&p, id);
  return {this, id};
}

template <typename T>
Var<T> Tape<T>::record(Tensor<T> value, const std::vector<Var<T>>& inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (const auto& in : inputs) {
    if (in.tape != this) throw UsageError("op inputs recorded on different tapes");
    n.needs_grad = n.needs_grad || nodes_[in.id].needs_grad;
  }
  if (n.needs_grad) n.backward = std::move(backward);
  return {this, push(std::move(n))};
}

template <typename T>
Var<T> Tape<T>::record(Tensor<T> value, std::initializer_list<Var<T>> inputs,
                       BackwardFn backward) {
  return record(std::move(value), std::vector<Var<T>>(inputs), std::move(backward));
}

template <typename T>
Var<T> Tape<T>::record_trainable(Tensor<T> value, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = true;
  n.backward = std::move(backward);
  return {this, push(std::move(n))};
}

template <typename T>
const Tensor<T>& Tape<T>::value(std::uint32_t id) const {
  const Node& n = nodes_[id];
  return n.param ? n.param->value : n.value;
}

template <typename T>
Tensor<T>& Tape<T>::grad(std::uint32_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) {
    const auto& v = value(id);
    n.grad = Tensor<T>(v.rows(), v.cols());
  }
  return n.grad;
}

template <typename T>
void Tape<T>::backward(Var<T> loss) {
  if (loss.tape != this) throw UsageError("loss recorded on a different tape");
  const auto& lv = value(loss.id);
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ShapeError("backward needs a scalar loss, got " + shape_string(lv.shape()));
  }
  visits_.assign(nodes_.size(), 0);
  if (!nodes_[loss.id].needs_grad) return;
  grad(loss.id)[0] += T(1);
  for (std::int64_t i = loss.id; i >= 0; --i) {
    const auto id = static_cast<std::uint32_t>(i);
    Node& n = nodes_[id];
    if (!n.needs_grad || n.grad.empty()) continue;
    ++visits_[id];
    if (n.param != nullptr) {
      auto& g = n.param->gradient;
      for (std::size_t j = 0; j < g.size(); ++j) g[j] += n.grad[j];
    } else if (n.backward) {
      n.backward(*this, id);
    }
  }
}

template class Tape<float>;
template class Tape<double>;

}  // namespace taxidest::nn
