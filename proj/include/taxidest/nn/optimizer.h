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

#ifndef TAXIDEST_NN_OPTIMIZER_H_
#define TAXIDEST_NN_OPTIMIZER_H_

#include "taxidest/nn/parameter.h"

namespace taxidest::nn {

// Classical momentum: v <- mu * v - lr * grad; value <- value + v. Gradients
// are zeroed afterwards.
template <typename T>
void sgd_momentum_step(ParameterSet<T>& params, double learning_rate, double momentum);

// Rescales all gradients so that their joint L2 norm is at most max_norm.
// Returns the norm before clipping.
template <typename T>
double clip_gradient_norm(ParameterSet<T>& params, double max_norm);

}  // namespace taxidest::nn

#endif  // TAXIDEST_NN_OPTIMIZER_H_
