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

#include "taxidest/nn/parameter.h"

#include <cmath>

#include "taxidest/errors.h"

namespace taxidest::nn {

template <typename T>
Parameter<T>::Parameter(std::string name_in, Tensor<T> value_in)
    : name(std::move(name_in)),
      value(std::move(value_in)),
      gradient(value.rows(), value.cols()),
      velocity(value.rows(), value.cols()) {}

template <typename T>
Parameter<T>& ParameterSet<T>::add(std::string name, Tensor<T> value) {
  if (find(name) != nullptr) throw UsageError("duplicate parameter name " + name);
  params_.push_back(std::make_unique<Parameter<T>>(std::move(name), std::move(value)));
  return *params_.back();
}

template <typename T>
Parameter<T>* ParameterSet<T>::find(const std::string& name) {
  for (auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

template <typename T>
const Parameter<T>* ParameterSet<T>::find(const std::string& name) const {
  return const_cast<ParameterSet*>(this)->find(name);
}

template <typename T>
Parameter<T>& ParameterSet<T>::at(const std::string& name) {
  if (auto* p = find(name)) return *p;
  throw UsageError("no parameter named " + name);
}

template <typename T>
const Parameter<T>& ParameterSet<T>::at(const std::string& name) const {
  return const_cast<ParameterSet*>(this)->at(name);
}

template <typename T>
std::size_t ParameterSet<T>::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

template <typename T>
void ParameterSet<T>::zero_grad() {
  for (auto& p : params_) p->gradient.fill(T(0));
}

template <typename T>
Tensor<T> uniform(std::size_t rows, std::size_t cols, T limit, InitRng& rng) {
  std::uniform_real_distribution<double> dist(-static_cast<double>(limit),
                                              static_cast<double>(limit));
  Tensor<T> t(rows, cols);
  for (auto& v : t.values()) v = static_cast<T>(dist(rng));
  return t;
}

template <typename T>
Tensor<T> glorot_uniform(std::size_t rows, std::size_t cols, InitRng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  return uniform<T>(rows, cols, static_cast<T>(limit), rng);
}

template struct Parameter<float>;
template struct Parameter<double>;
template class ParameterSet<float>;
template class ParameterSet<double>;
template Tensor<float> uniform(std::size_t, std::size_t, float, InitRng&);
template Tensor<double> uniform(std::size_t, std::size_t, double, InitRng&);
template Tensor<float> glorot_uniform(std::size_t, std::size_t, InitRng&);
template Tensor<double> glorot_uniform(std::size_t, std::size_t, InitRng&);

}  // namespace taxidest::nn
