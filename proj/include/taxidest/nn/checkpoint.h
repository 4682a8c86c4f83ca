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

#ifndef TAXIDEST_NN_CHECKPOINT_H_
#define TAXIDEST_NN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "taxidest/clustering.h"
#include "taxidest/data/vocab.h"
#include "taxidest/geo.h"
#include "taxidest/nn/parameter.h"

namespace taxidest::nn {

enum class DType : std::uint8_t { kFloat32 = 1, kFloat64 = 2, kInt64 = 3 };

// A named 2-D array as stored on disk. Values are widened to double in
// memory; float32 and int64 (|v| < 2^53) round-trip exactly.
struct StoredTensor {
  std::string name;
  DType dtype = DType::kFloat32;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::vector<double> values;

  friend bool operator==(const StoredTensor&, const StoredTensor&) = default;
};

// Self-contained model container. Layout (little-endian):
//
//   char[4]  magic "TXCK"
//   u32      version (1)
//   u32 + bytes   header: model configuration as JSON text
//   f64 x 4       mean_lat, mean_lon, std_lat, std_lon
//   3 x (u64 n, i64 x n)   client, taxi, stand raw IDs in dense-index order
//   u64 C, (f64 lat, f64 lon) x C   cluster centers
//   u64 tensor count, then per tensor:
//     u32 + bytes name, u8 dtype, u64 rows, u64 cols,
//     rows*cols values of the dtype's width
struct Checkpoint {
  std::string header;
  geo::StandardizationStats stats;
  data::MetadataVocab vocab;
  clustering::ClusterSet clusters;
  std::vector<StoredTensor> tensors;

  const StoredTensor* find(const std::string& name) const;
  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Stores every parameter value with the dtype matching T.
template <typename T>
void append_parameters(const ParameterSet<T>& params, Checkpoint& ckpt);

// Copies stored values into same-named parameters. Every parameter must be
// present with a matching shape.
template <typename T>
void restore_parameters(const Checkpoint& ckpt, ParameterSet<T>& params);

}  // namespace taxidest::nn

#endif  // TAXIDEST_NN_CHECKPOINT_H_
