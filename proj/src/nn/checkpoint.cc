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

#include "taxidest/nn/checkpoint.h"

#include <fstream>
#include <type_traits>

#include "taxidest/binary_io.h"
#include "taxidest/errors.h"

namespace taxidest::nn {
namespace {

void write_ids(std::ostream& out, const data::IdMap& map) {
  io::write_le<std::uint64_t>(out, map.ids().size());
  for (auto id : map.ids()) io::write_le<std::int64_t>(out, id);
}

data::IdMap read_ids(std::istream& in) {
  const auto n = io::read_le<std::uint64_t>(in);
  std::vector<std::int64_t> ids;
  ids.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 24)));
  for (std::uint64_t i = 0; i < n; ++i) ids.push_back(io::read_le<std::int64_t>(in));
  return data::IdMap(std::move(ids));
}

}  // namespace

const StoredTensor* Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write("TXCK", 4);
  io::write_le<std::uint32_t>(out, kCheckpointVersion);
  io::write_string(out, ckpt.header);
  io::write_le<double>(out, ckpt.stats.mean_lat);
  io::write_le<double>(out, ckpt.stats.mean_lon);
  io::write_le<double>(out, ckpt.stats.std_lat);
  io::write_le<double>(out, ckpt.stats.std_lon);
  write_ids(out, ckpt.vocab.clients);
  write_ids(out, ckpt.vocab.taxis);
  write_ids(out, ckpt.vocab.stands);
  io::write_le<std::uint64_t>(out, ckpt.clusters.size());
  for (const auto& c : ckpt.clusters.centers) {
    io::write_le<double>(out, c.lat);
    io::write_le<double>(out, c.lon);
  }
  io::write_le<std::uint64_t>(out, ckpt.tensors.size());
  for (const auto& t : ckpt.tensors) {
    if (t.values.size() != t.rows * t.cols) {
      throw ShapeError("stored tensor " + t.name + " has inconsistent size");
    }
    io::write_string(out, t.name);
    io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(t.dtype));
    io::write_le<std::uint64_t>(out, t.rows);
    io::write_le<std::uint64_t>(out, t.cols);
    for (double v : t.values) {
      switch (t.dtype) {
        case DType::kFloat32: io::write_le<float>(out, static_cast<float>(v)); break;
        case DType::kFloat64: io::write_le<double>(out, v); break;
        case DType::kInt64: io::write_le<std::int64_t>(out, static_cast<std::int64_t>(v)); break;
      }
    }
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  io::expect_magic(in, "TXCK", "checkpoint");
  const auto version = io::read_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.header = io::read_string(in);
  ckpt.stats.mean_lat = io::read_le<double>(in);
  ckpt.stats.mean_lon = io::read_le<double>(in);
  ckpt.stats.std_lat = io::read_le<double>(in);
  ckpt.stats.std_lon = io::read_le<double>(in);
  ckpt.vocab.clients = read_ids(in);
  ckpt.vocab.taxis = read_ids(in);
  ckpt.vocab.stands = read_ids(in);
  const auto c = io::read_le<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < c; ++i) {
    const double lat = io::read_le<double>(in);
    const double lon = io::read_le<double>(in);
    ckpt.clusters.centers.push_back({lat, lon});
  }
  const auto count = io::read_le<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < count; ++i) {
    StoredTensor t;
    t.name = io::read_string(in, 4096);
    const auto dtype = io::read_le<std::uint8_t>(in);
    if (dtype < 1 || dtype > 3) throw DataError("tensor " + t.name + " has unknown dtype");
    t.dtype = static_cast<DType>(dtype);
    t.rows = io::read_le<std::uint64_t>(in);
    t.cols = io::read_le<std::uint64_t>(in);
    if (t.cols != 0 && t.rows > (std::uint64_t{1} << 40) / t.cols) {
      throw DataError("tensor " + t.name + " is implausibly large");
    }
    t.values.resize(static_cast<std::size_t>(t.rows * t.cols));
    for (double& v : t.values) {
      switch (t.dtype) {
        case DType::kFloat32: v = io::read_le<float>(in); break;
        case DType::kFloat64: v = io::read_le<double>(in); break;
        case DType::kInt64: v = static_cast<double>(io::read_le<std::int64_t>(in)); break;
      }
    }
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_checkpoint(out, ckpt);
  if (!out) throw IoError("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

template <typename T>
void append_parameters(const ParameterSet<T>& params, Checkpoint& ckpt) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    StoredTensor t;
    t.name = p.name;
    t.dtype = std::is_same_v<T, float> ? DType::kFloat32 : DType::kFloat64;
    t.rows = p.value.rows();
    t.cols = p.value.cols();
    t.values.assign(p.value.values().begin(), p.value.values().end());
    ckpt.tensors.push_back(std::move(t));
  }
}

template <typename T>
void restore_parameters(const Checkpoint& ckpt, ParameterSet<T>& params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    const StoredTensor* t = ckpt.find(p.name);
    if (t == nullptr) throw DataError("checkpoint lacks parameter " + p.name);
    if (t->rows != p.value.rows() || t->cols != p.value.cols()) {
      throw DataError("checkpoint parameter " + p.name + " has shape " +
                      shape_string({t->rows, t->cols}) + ", model expects " +
                      shape_string(p.value.shape()));
    }
    for (std::size_t j = 0; j < t->values.size(); ++j) p.value[j] = static_cast<T>(t->values[j]);
    p.gradient.fill(T(0));
    p.velocity.fill(T(0));
  }
}

template void append_parameters(const ParameterSet<float>&, Checkpoint&);
template void append_parameters(const ParameterSet<double>&, Checkpoint&);
template void restore_parameters(const Checkpoint&, ParameterSet<float>&);
template void restore_parameters(const Checkpoint&, ParameterSet<double>&);

}  // namespace taxidest::nn
