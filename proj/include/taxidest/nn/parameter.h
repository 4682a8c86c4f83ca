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

#ifndef TAXIDEST_NN_PARAMETER_H_
#define TAXIDEST_NN_PARAMETER_H_

#include <cstddef>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "taxidest/nn/tensor.h"

namespace taxidest::nn {

// A trainable tensor with its accumulated gradient and momentum buffer. The
// three tensors always share a shape.
template <typename T>
struct Parameter {
  Parameter(std::string name, Tensor<T> value);

  std::string name;
  Tensor<T> value;
  Tensor<T> gradient;
  Tensor<T> velocity;
};

// Named parameters in insertion order. Addresses are stable.
template <typename T>
class ParameterSet {
 public:
  Parameter<T>& add(std::string name, Tensor<T> value);

  Parameter<T>& at(const std::string& name);
  const Parameter<T>& at(const std::string& name) const;
  Parameter<T>* find(const std::string& name);
  const Parameter<T>* find(const std::string& name) const;

  std::size_t size() const { return params_.size(); }
  Parameter<T>& operator[](std::size_t i) { return *params_[i]; }
  const Parameter<T>& operator[](std::size_t i) const { return *params_[i]; }

  // Total number of scalar values over all parameters.
  std::size_t scalar_count() const;
  void zero_grad();

 private:
  std::vector<std::unique_ptr<Parameter<T>>> params_;
};

using InitRng = std::mt19937_64;

// Uniform in +-sqrt(6 / (fan_in + fan_out)) with fan_in = rows and
// fan_out = cols.
template <typename T>
Tensor<T> glorot_uniform(std::size_t rows, std::size_t cols, InitRng& rng);

template <typename T>
Tensor<T> uniform(std::size_t rows, std::size_t cols, T limit, InitRng& rng);

}  // namespace taxidest::nn

#endif  // TAXIDEST_NN_PARAMETER_H_
