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

#include "taxidest/nn/ops.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "taxidest/errors.h"
#include "taxidest/geo.h"

namespace taxidest::nn {
namespace {

template <typename T>
using RowMajor = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
Eigen::Map<const RowMajor<T>> as_matrix(const Tensor<T>& t) {
  return {t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())};
}

template <typename T>
Eigen::Map<RowMajor<T>> as_matrix(Tensor<T>& t) {
  return {t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())};
}

[[noreturn]] void shape_mismatch(const char* op, std::array<std::size_t, 2> a,
                                 std::array<std::size_t, 2> b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_string(a) + " and " +
                   shape_string(b));
}

template <typename T>
void require_same_shape(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) shape_mismatch(op, a.shape(), b.shape());
}

template <typename T>
void accumulate(Tensor<T>& into, const Tensor<T>& from) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i] += from[i];
}

// Elementwise unary op whose derivative is a function of the output.
template <typename T, typename Fwd, typename Deriv>
Var<T> unary(Var<T> x, Fwd fwd, Deriv deriv_from_output) {
  const Tensor<T>& xv = x.value();
  Tensor<T> out(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(xv[i]);
  const auto xid = x.id;
  return x.tape->record(std::move(out), {x}, [xid, deriv_from_output](Tape<T>& tape, std::uint32_t self) {
    const Tensor<T>& y = tape.value(self);
    const Tensor<T>& g = tape.grad(self);
    Tensor<T>& gx = tape.grad(xid);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * deriv_from_output(y[i]);
  });
}

}  // namespace

template <typename T>
void gemm(const Tensor<T>& a, bool transpose_a, const Tensor<T>& b, bool transpose_b,
          Tensor<T>& out, bool accumulate_into) {
  const auto am = as_matrix(a);
  const auto bm = as_matrix(b);
  auto om = as_matrix(out);
  if (!accumulate_into) om.setZero();
  if (!transpose_a && !transpose_b) om.noalias() += am * bm;
  else if (transpose_a && !transpose_b) om.noalias() += am.transpose() * bm;
  else if (!transpose_a && transpose_b) om.noalias() += am * bm.transpose();
  else om.noalias() += am.transpose() * bm.transpose();
}

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b) {
  const auto& av = a.value();
  const auto& bv = b.value();
  if (av.cols() != bv.rows()) shape_mismatch("matmul", av.shape(), bv.shape());
  Tensor<T> out(av.rows(), bv.cols());
  gemm(av, false, bv, false, out, false);
  const auto aid = a.id, bid = b.id;
  return a.tape->record(std::move(out), {a, b}, [aid, bid](Tape<T>& tape, std::uint32_t self) {
    const auto& g = tape.grad(self);
    if (tape.needs_grad(aid)) gemm(g, false, tape.value(bid), true, tape.grad(aid), true);
    if (tape.needs_grad(bid)) gemm(tape.value(aid), true, g, false, tape.grad(bid), true);
  });
}

template <typename T>
Var<T> matmul_transposed(Var<T> a, Var<T> b) {
  const auto& av = a.value();
  const auto& bv = b.value();
  if (av.cols() != bv.cols()) shape_mismatch("matmul_transposed", av.shape(), bv.shape());
  Tensor<T> out(av.rows(), bv.rows());
  gemm(av, false, bv, true, out, false);
  const auto aid = a.id, bid = b.id;
  return a.tape->record(std::move(out), {a, b}, [aid, bid](Tape<T>& tape, std::uint32_t self) {
    const auto& g = tape.grad(self);
    if (tape.needs_grad(aid)) gemm(g, false, tape.value(bid), false, tape.grad(aid), true);
    if (tape.needs_grad(bid)) gemm(g, true, tape.value(aid), false, tape.grad(bid), true);
  });
}

template <typename T>
Var<T> dense(Var<T> input, Var<T> weights, Var<T> bias) {
  const auto& x = input.value();
  const auto& w = weights.value();
  const auto& b = bias.value();
  if (x.cols() != w.rows()) shape_mismatch("dense", x.shape(), w.shape());
  if (b.rows() != 1 || b.cols() != w.cols()) shape_mismatch("dense bias", w.shape(), b.shape());
  Tensor<T> out(x.rows(), w.cols());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    std::copy(b.data(), b.data() + b.size(), out.row(r).data());
  }
  gemm(x, false, w, false, out, true);
  const auto xid = input.id, wid = weights.id, bid = bias.id;
  return input.tape->record(
      std::move(out), {input, weights, bias}, [xid, wid, bid](Tape<T>& tape, std::uint32_t self) {
        const auto& g = tape.grad(self);
        if (tape.needs_grad(xid)) gemm(g, false, tape.value(wid), true, tape.grad(xid), true);
        if (tape.needs_grad(wid)) gemm(tape.value(xid), true, g, false, tape.grad(wid), true);
        if (tape.needs_grad(bid)) {
          auto& gb = tape.grad(bid);
          for (std::size_t r = 0; r < g.rows(); ++r) {
            for (std::size_t c = 0; c < g.cols(); ++c) gb[c] += g(r, c);
          }
        }
      });
}

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
  require_same_shape("add", a.value(), b.value());
  Tensor<T> out = a.value();
  accumulate(out, b.value());
  const auto aid = a.id, bid = b.id;
  return a.tape->record(std::move(out), {a, b}, [aid, bid](Tape<T>& tape, std::uint32_t self) {
    const auto& g = tape.grad(self);
    if (tape.needs_grad(aid)) accumulate(tape.grad(aid), g);
    if (tape.needs_grad(bid)) accumulate(tape.grad(bid), g);
  });
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
  const auto& av = a.value();
  const auto& bv = b.value();
  require_same_shape("mul", av, bv);
  Tensor<T> out(av.rows(), av.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  const auto aid = a.id, bid = b.id;
  return a.tape->record(std::move(out), {a, b}, [aid, bid](Tape<T>& tape, std::uint32_t self) {
    const auto& g = tape.grad(self);
    if (tape.needs_grad(aid)) {
      auto& ga = tape.grad(aid);
      const auto& bv = tape.value(bid);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (tape.needs_grad(bid)) {
      auto& gb = tape.grad(bid);
      const auto& av = tape.value(aid);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  });
}

template <typename T>
Var<T> relu(Var<T> x) {
  return unary<T>(
      x, [](T v) { return v > T(0) ? v : T(0); },
      [](T y) { return y > T(0) ? T(1) : T(0); });
}

template <typename T>
Var<T> sigmoid(Var<T> x) {
  return unary<T>(
      x, [](T v) { return T(1) / (T(1) + std::exp(-v)); }, [](T y) { return y * (T(1) - y); });
}

template <typename T>
Var<T> tanh(Var<T> x) {
  return unary<T>(
      x, [](T v) { return std::tanh(v); }, [](T y) { return T(1) - y * y; });
}

template <typename T>
Var<T> softmax(Var<T> x) {
  const auto& xv = x.value();
  if (xv.cols() == 0) throw ShapeError("softmax over zero columns");
  Tensor<T> out(xv.rows(), xv.cols());
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    const auto in = xv.row(r);
    auto o = out.row(r);
    const T m = *std::max_element(in.begin(), in.end());
    T total = T(0);
    for (std::size_t c = 0; c < in.size(); ++c) {
      o[c] = std::exp(in[c] - m);
      total += o[c];
    }
    for (auto& v : o) v /= total;
  }
  const auto xid = x.id;
  return x.tape->record(std::move(out), {x}, [xid](Tape<T>& tape, std::uint32_t self) {
    const auto& p = tape.value(self);
    const auto& g = tape.grad(self);
    auto& gx = tape.grad(xid);
    for (std::size_t r = 0; r < p.rows(); ++r) {
      T dot = T(0);
      for (std::size_t c = 0; c < p.cols(); ++c) dot += g(r, c) * p(r, c);
      for (std::size_t c = 0; c < p.cols(); ++c) gx(r, c) += p(r, c) * (g(r, c) - dot);
    }
  });
}

template <typename T>
Var<T> embedding_lookup(Tape<T>& tape, Parameter<T>& table, std::span<const std::int32_t> indices) {
  const auto& w = table.value;
  Tensor<T> out(indices.size(), w.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto idx = indices[i];
    if (idx < 0 || static_cast<std::size_t>(idx) >= w.rows()) {
      throw PreconditionError("embedding " + table.name + ": index " + std::to_string(idx) +
                              " outside [0, " + std::to_string(w.rows()) + ")");
    }
    const auto src = w.row(static_cast<std::size_t>(idx));
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  std::vector<std::int32_t> kept(indices.begin(), indices.end());
  Parameter<T>* param = &table;
  return tape.record_trainable(
      std::move(out), [param, kept = std::move(kept)](Tape<T>& t, std::uint32_t self) {
        const auto& g = t.grad(self);
        for (std::size_t i = 0; i < kept.size(); ++i) {
          auto dst = param->gradient.row(static_cast<std::size_t>(kept[i]));
          const auto src = g.row(i);
          for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
        }
      });
}

template <typename T>
Var<T> concat_cols(const std::vector<Var<T>>& parts) {
  if (parts.empty()) throw ShapeError("concat of zero tensors");
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) shape_mismatch("concat_cols", parts.front().value().shape(), p.value().shape());
    cols += p.cols();
  }
  Tensor<T> out(rows, cols);
  std::vector<std::pair<std::uint32_t, std::size_t>> offsets;
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const auto& v = p.value();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy(v.row(r).begin(), v.row(r).end(), out.row(r).begin() + static_cast<std::ptrdiff_t>(offset));
    }
    offsets.emplace_back(p.id, offset);
    offset += v.cols();
  }
  return parts.front().tape->record(
      std::move(out), parts, [offsets = std::move(offsets)](Tape<T>& tape, std::uint32_t self) {
        const auto& g = tape.grad(self);
        for (const auto& [id, off] : offsets) {
          if (!tape.needs_grad(id)) continue;
          auto& gp = tape.grad(id);
          for (std::size_t r = 0; r < gp.rows(); ++r) {
            for (std::size_t c = 0; c < gp.cols(); ++c) gp(r, c) += g(r, off + c);
          }
        }
      });
}

template <typename T>
Var<T> concat_rows(const std::vector<Var<T>>& parts) {
  if (parts.empty()) throw ShapeError("concat of zero tensors");
  const std::size_t cols = parts.front().cols();
  std::size_t rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) shape_mismatch("concat_rows", parts.front().value().shape(), p.value().shape());
    rows += p.rows();
  }
  std::vector<T> values;
  values.reserve(rows * cols);
  std::vector<std::pair<std::uint32_t, std::size_t>> offsets;
  for (const auto& p : parts) {
    offsets.emplace_back(p.id, values.size());
    const auto v = p.value().values();
    values.insert(values.end(), v.begin(), v.end());
  }
  return parts.front().tape->record(
      Tensor<T>(rows, cols, std::move(values)), parts,
      [offsets = std::move(offsets)](Tape<T>& tape, std::uint32_t self) {
        const auto& g = tape.grad(self);
        for (const auto& [id, off] : offsets) {
          if (!tape.needs_grad(id)) continue;
          auto& gp = tape.grad(id);
          for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += g[off + i];
        }
      });
}

template <typename T>
Var<T> slice_cols(Var<T> x, std::size_t begin, std::size_t count) {
  const auto& xv = x.value();
  if (begin + count > xv.cols()) {
    throw ShapeError("slice_cols [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                     ") out of " + shape_string(xv.shape()));
  }
  Tensor<T> out(xv.rows(), count);
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    const auto src = xv.row(r).subspan(begin, count);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  const auto xid = x.id;
  return x.tape->record(std::move(out), {x}, [xid, begin](Tape<T>& tape, std::uint32_t self) {
    const auto& g = tape.grad(self);
    auto& gx = tape.grad(xid);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) gx(r, begin + c) += g(r, c);
    }
  });
}

template <typename T>
Var<T> gather_rows(Var<T> x, std::span<const std::size_t> indices) {
  const auto& xv = x.value();
  Tensor<T> out(indices.size(), xv.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= xv.rows()) {
      throw ShapeError("gather_rows index " + std::to_string(indices[i]) + " out of " +
                       shape_string(xv.shape()));
    }
    std::copy(xv.row(indices[i]).begin(), xv.row(indices[i]).end(), out.row(i).begin());
  }
  std::vector<std::size_t> kept(indices.begin(), indices.end());
  const auto xid = x.id;
  return x.tape->record(std::move(out), {x}, [xid, kept = std::move(kept)](Tape<T>& tape, std::uint32_t self) {
    const auto& g = tape.grad(self);
    auto& gx = tape.grad(xid);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      for (std::size_t c = 0; c < g.cols(); ++c) gx(kept[i], c) += g(i, c);
    }
  });
}

template <typename T>
Var<T> weighted_centroid(Var<T> p, const Tensor<T>& centers) {
  const auto& pv = p.value();
  if (pv.cols() != centers.rows()) shape_mismatch("weighted_centroid", pv.shape(), centers.shape());
  Tensor<T> out(pv.rows(), centers.cols());
  gemm(pv, false, centers, false, out, false);
  const auto pid = p.id;
  // The centers are fixed; only their values are kept for the backward pass.
  return p.tape->record(std::move(out), {p}, [pid, centers](Tape<T>& tape, std::uint32_t self) {
    gemm(tape.grad(self), false, centers, true, tape.grad(pid), true);
  });
}

template <typename T>
Var<T> affine_cols(Var<T> x, std::span<const double> scale, std::span<const double> shift) {
  const auto& xv = x.value();
  if (scale.size() != xv.cols() || shift.size() != xv.cols()) {
    throw ShapeError("affine_cols: " + std::to_string(scale.size()) + " scales for " +
                     shape_string(xv.shape()));
  }
  Tensor<T> out(xv.rows(), xv.cols());
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    for (std::size_t c = 0; c < xv.cols(); ++c) {
      out(r, c) = static_cast<T>(static_cast<double>(xv(r, c)) * scale[c] + shift[c]);
    }
  }
  std::vector<double> s(scale.begin(), scale.end());
  const auto xid = x.id;
  return x.tape->record(std::move(out), {x}, [xid, s = std::move(s)](Tape<T>& tape, std::uint32_t self) {
    const auto& g = tape.grad(self);
    auto& gx = tape.grad(xid);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) gx(r, c) += static_cast<T>(g(r, c) * s[c]);
    }
  });
}

template <typename T>
Var<T> sum(Var<T> x) {
  const auto& xv = x.value();
  T total = T(0);
  for (T v : xv.values()) total += v;
  const auto xid = x.id;
  return x.tape->record(Tensor<T>(1, 1, total), {x}, [xid](Tape<T>& tape, std::uint32_t self) {
    const T g = tape.grad(self)[0];
    for (auto& v : tape.grad(xid).values()) v += g;
  });
}

template <typename T>
Var<T> equirectangular_loss(Var<T> predictions, const Tensor<double>& targets) {
  const auto& pv = predictions.value();
  if (pv.cols() != 2 || targets.shape() != pv.shape()) {
    shape_mismatch("equirectangular_loss", pv.shape(), targets.shape());
  }
  if (pv.rows() == 0) throw PreconditionError("loss over an empty batch");
  const double n = static_cast<double>(pv.rows());
  double total = 0.0;
  std::vector<double> row_grads(pv.size());
  for (std::size_t r = 0; r < pv.rows(); ++r) {
    const geo::GeoPoint target{targets(r, 0), targets(r, 1)};
    const geo::GeoPoint pred{static_cast<double>(pv(r, 0)), static_cast<double>(pv(r, 1))};
    total += geo::equirectangular_distance(target, pred);
    const auto d = geo::equirectangular_gradient(target, pred);
    row_grads[2 * r] = d[0] / n;
    row_grads[2 * r + 1] = d[1] / n;
  }
  const auto pid = predictions.id;
  return predictions.tape->record(
      Tensor<T>(1, 1, static_cast<T>(total / n)), {predictions},
      [pid, row_grads = std::move(row_grads)](Tape<T>& tape, std::uint32_t self) {
        const double g = static_cast<double>(tape.grad(self)[0]);
        auto& gp = tape.grad(pid);
        for (std::size_t i = 0; i < row_grads.size(); ++i) gp[i] += static_cast<T>(g * row_grads[i]);
      });
}

template <typename T>
std::pair<Var<T>, Var<T>> lstm_cell(Var<T> x, Var<T> h_prev, Var<T> c_prev, const LstmParams<T>& params) {
  Tape<T>& tape = *x.tape;
  const std::size_t h = params.hidden();
  if (h_prev.cols() != h || c_prev.cols() != h || h_prev.rows() != x.rows() ||
      c_prev.rows() != x.rows()) {
    shape_mismatch("lstm_cell state", h_prev.value().shape(), c_prev.value().shape());
  }
  const Var<T> gates = add(matmul(x, tape.parameter(*params.input_weights)),
                           dense(h_prev, tape.parameter(*params.hidden_weights),
                                 tape.parameter(*params.bias)));
  const Var<T> i = sigmoid(slice_cols(gates, 0, h));
  const Var<T> f = sigmoid(slice_cols(gates, h, h));
  const Var<T> g = tanh(slice_cols(gates, 2 * h, h));
  const Var<T> o = sigmoid(slice_cols(gates, 3 * h, h));
  const Var<T> c = add(mul(f, c_prev), mul(i, g));
  return {mul(o, tanh(c)), c};
}

#define TAXIDEST_INSTANTIATE_OPS(T)                                                              \
  template void gemm(const Tensor<T>&, bool, const Tensor<T>&, bool, Tensor<T>&, bool);          \
  template Var<T> matmul(Var<T>, Var<T>);                                                        \
  template Var<T> matmul_transposed(Var<T>, Var<T>);                                             \
  template Var<T> dense(Var<T>, Var<T>, Var<T>);                                                 \
  template Var<T> add(Var<T>, Var<T>);                                                           \
  template Var<T> mul(Var<T>, Var<T>);                                                           \
  template Var<T> relu(Var<T>);                                                                  \
  template Var<T> sigmoid(Var<T>);                                                               \
  template Var<T> tanh(Var<T>);                                                                  \
  template Var<T> softmax(Var<T>);                                                               \
  template Var<T> embedding_lookup(Tape<T>&, Parameter<T>&, std::span<const std::int32_t>);      \
  template Var<T> concat_cols(const std::vector<Var<T>>&);                                       \
  template Var<T> concat_rows(const std::vector<Var<T>>&);                                       \
  template Var<T> slice_cols(Var<T>, std::size_t, std::size_t);                                  \
  template Var<T> gather_rows(Var<T>, std::span<const std::size_t>);                             \
  template Var<T> weighted_centroid(Var<T>, const Tensor<T>&);                                   \
  template Var<T> affine_cols(Var<T>, std::span<const double>, std::span<const double>);         \
  template Var<T> sum(Var<T>);                                                                   \
  template Var<T> equirectangular_loss(Var<T>, const Tensor<double>&);                           \
  template std::pair<Var<T>, Var<T>> lstm_cell(Var<T>, Var<T>, Var<T>, const LstmParams<T>&);

TAXIDEST_INSTANTIATE_OPS(float)
TAXIDEST_INSTANTIATE_OPS(double)

}  // namespace taxidest::nn
