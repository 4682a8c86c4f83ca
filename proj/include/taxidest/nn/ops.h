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

#ifndef TAXIDEST_NN_OPS_H_
#define TAXIDEST_NN_OPS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "taxidest/nn/parameter.h"
#include "taxidest/nn/tape.h"
#include "taxidest/nn/tensor.h"

namespace taxidest::nn {

// Differentiable operations. Each records one node on the inputs' tape.
// Shape mismatches throw ShapeError naming both shapes.

template <typename T> Var<T> matmul(Var<T> a, Var<T> b);
// a * b^T.
template <typename T> Var<T> matmul_transposed(Var<T> a, Var<T> b);
// input [batch x in] * weights [in x out] + bias [1 x out].
template <typename T> Var<T> dense(Var<T> input, Var<T> weights, Var<T> bias);
template <typename T> Var<T> add(Var<T> a, Var<T> b);
template <typename T> Var<T> mul(Var<T> a, Var<T> b);
// Subgradient at exactly 0 is 0.
template <typename T> Var<T> relu(Var<T> x);
template <typename T> Var<T> sigmoid(Var<T> x);
template <typename T> Var<T> tanh(Var<T> x);
// Row-wise, stabilized by subtracting the row maximum.
template <typename T> Var<T> softmax(Var<T> x);
// Gathers table rows; the backward pass scatter-adds into the touched rows
// of table.gradient only. Indices must lie in [0, rows).
template <typename T>
Var<T> embedding_lookup(Tape<T>& tape, Parameter<T>& table, std::span<const std::int32_t> indices);
template <typename T> Var<T> concat_cols(const std::vector<Var<T>>& parts);
template <typename T> Var<T> concat_rows(const std::vector<Var<T>>& parts);
template <typename T> Var<T> slice_cols(Var<T> x, std::size_t begin, std::size_t count);
// out[i] = x[indices[i]].
template <typename T> Var<T> gather_rows(Var<T> x, std::span<const std::size_t> indices);
// p [batch x C] times fixed centers [C x 2]. The centers get no gradient.
template <typename T> Var<T> weighted_centroid(Var<T> p, const Tensor<T>& centers);
// x * scale + shift per column, both fixed.
template <typename T>
Var<T> affine_cols(Var<T> x, std::span<const double> scale, std::span<const double> shift);
template <typename T> Var<T> sum(Var<T> x);
// Mean over rows of the equirectangular distance in meters between
// predictions [batch x 2] and fixed targets [batch x 2], both (lat, lon) in
// degrees. Evaluated in double precision.
template <typename T> Var<T> equirectangular_loss(Var<T> predictions, const Tensor<double>& targets);

template <typename T>
struct LstmParams {
  Parameter<T>* input_weights = nullptr;   // [in x 4h], gate order i, f, g, o
  Parameter<T>* hidden_weights = nullptr;  // [h x 4h]
  Parameter<T>* bias = nullptr;            // [1 x 4h]

  std::size_t hidden() const { return hidden_weights->value.rows(); }
};

// Standard LSTM step: i, f, o = sigmoid, g = tanh, c = f*c_prev + i*g,
// h = o*tanh(c). Returns (h, c).
template <typename T>
std::pair<Var<T>, Var<T>> lstm_cell(Var<T> x, Var<T> h_prev, Var<T> c_prev,
                                    const LstmParams<T>& params);

// Dense matrix product used by the forward and backward rules, exposed for
// inference paths that do not need a tape.
template <typename T>
void gemm(const Tensor<T>& a, bool transpose_a, const Tensor<T>& b, bool transpose_b,
          Tensor<T>& out, bool accumulate);

}  // namespace taxidest::nn

#endif  // TAXIDEST_NN_OPS_H_
