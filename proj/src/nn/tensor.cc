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

#include "taxidest/nn/tensor.h"

#include <algorithm>
#include <cmath>

#include "taxidest/errors.h"

namespace taxidest::nn {

template <typename T>
Tensor<T>::Tensor(std::size_t rows, std::size_t cols, std::vector<T> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw ShapeError("tensor " + shape_string({rows, cols}) + " given " +
                     std::to_string(values_.size()) + " values");
  }
}

template <typename T>
void Tensor<T>::fill(T v) {
  std::fill(values_.begin(), values_.end(), v);
}

template <typename T>
bool Tensor<T>::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](T v) { return std::isfinite(v); });
}

std::string shape_string(std::array<std::size_t, 2> shape) {
  return "[" + std::to_string(shape[0]) + "x" + std::to_string(shape[1]) + "]";
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace taxidest::nn
