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

#ifndef TAXIDEST_NN_TAPE_H_
#define TAXIDEST_NN_TAPE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "taxidest/nn/parameter.h"
#include "taxidest/nn/tensor.h"

namespace taxidest::nn {

template <typename T>
class Tape;

// Handle to a value recorded on a Tape.
template <typename T>
struct Var {
  Tape<T>* tape = nullptr;
  std::uint32_t id = 0;

  const Tensor<T>& value() const { return tape->value(id); }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

// Records operations in execution order for reverse-mode differentiation.
// A tape is rebuilt for every batch and belongs to one thread.
template <typename T>
class Tape {
 public:
  // Propagates the gradient of node `self` into the gradients of its inputs.
  using BackwardFn = std::function<void(Tape&, std::uint32_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<T> constant(Tensor<T> value);
  // Repeated calls for the same parameter return the same node.
  Var<T> parameter(Parameter<T>& p);
  // Records an op output. `inputs` decide whether the node needs a gradient;
  // `backward` is only kept if it does.
  Var<T> record(Tensor<T> value, std::initializer_list<Var<T>> inputs, BackwardFn backward);
  Var<T> record(Tensor<T> value, const std::vector<Var<T>>& inputs, BackwardFn backward);
  // Like record() but always differentiable; used by ops that write straight
  // into a parameter's gradient (embedding lookup).
  Var<T> record_trainable(Tensor<T> value, BackwardFn backward);

  const Tensor<T>& value(std::uint32_t id) const;
  bool needs_grad(std::uint32_t id) const { return nodes_[id].needs_grad; }
  // Gradient buffer of a node, zero-initialized on first access.
  Tensor<T>& grad(std::uint32_t id);
  bool has_grad(std::uint32_t id) const { return !nodes_[id].grad.empty(); }

  // Accumulates d(loss)/d(parameter) into every reachable parameter's
  // gradient. The loss must be a 1x1 node on this tape. Nodes are visited in
  // exact reverse recording order.
  void backward(Var<T> loss);

  std::size_t node_count() const { return nodes_.size(); }
  // Per-node count of backward visits during the last backward() call.
  const std::vector<std::uint32_t>& visit_counts() const { return visits_; }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    Parameter<T>* param = nullptr;
    BackwardFn backward;
    bool needs_grad = false;
  };

  std::uint32_t push(Node node);

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter<T>*, std::uint32_t> param_nodes_;
  std::vector<std::uint32_t> visits_;
};

}  // namespace taxidest::nn

#endif  // TAXIDEST_NN_TAPE_H_
