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

#include "taxidest/nn/optimizer.h"

#include <cmath>

namespace taxidest::nn {

template <typename T>
void sgd_momentum_step(ParameterSet<T>& params, double learning_rate, double momentum) {
  const T lr = static_cast<T>(learning_rate);
  const T mu = static_cast<T>(momentum);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      p.velocity[j] = mu * p.velocity[j] - lr * p.gradient[j];
      p.value[j] += p.velocity[j];
      p.gradient[j] = T(0);
    }
  }
}

template <typename T>
double clip_gradient_norm(ParameterSet<T>& params, double max_norm) {
  double sq = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (T g : params[i].gradient.values()) sq += static_cast<double>(g) * static_cast<double>(g);
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const T scale = static_cast<T>(max_norm / norm);
    for (std::size_t i = 0; i < params.size(); ++i) {
      for (T& g : params[i].gradient.values()) g *= scale;
    }
  }
  return norm;
}

template void sgd_momentum_step(ParameterSet<float>&, double, double);
template void sgd_momentum_step(ParameterSet<double>&, double, double);
template double clip_gradient_norm(ParameterSet<float>&, double);
template double clip_gradient_norm(ParameterSet<double>&, double);

}  // namespace taxidest::nn
