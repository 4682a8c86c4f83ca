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

#ifndef TAXIDEST_MODELS_CONFIG_H_
#define TAXIDEST_MODELS_CONFIG_H_

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace taxidest::models {

// The eight architectures compared in the taxi destination experiments.
enum class Variant {
  kMlpClusters,   // winning model: MLP + softmax over cluster centers
  kMlpDirect,     // MLP with a 2-unit linear output
  kMlpNoEmbed,    // cluster output, GPS block only
  kMlpEmbedOnly,  // cluster output, metadata embeddings only
  kRnn,           // forward LSTM over the prefix
  kBrnn,          // forward + backward LSTM
  kBrnnWindow,    // BRNN reading `window` consecutive points per step
  kMemoryNet,     // dot-product attention over encoded candidate rides
};

std::string_view variant_name(Variant v);
// Throws UsageError listing the valid names.
Variant parse_variant(std::string_view name);
// "mlp_clusters, mlp_direct, ..."
std::string valid_variant_names();

// Embedding widths in metadata order: client, taxi, stand, quarter hour,
// day of week, week of year.
inline constexpr std::size_t kMetadataCount = 6;
using EmbeddingDims = std::array<std::size_t, kMetadataCount>;
inline constexpr std::array<std::string_view, kMetadataCount> kMetadataNames = {
    "client", "taxi", "stand", "quarter_hour", "day_of_week", "week_of_year"};

struct ModelConfig {
  Variant variant = Variant::kMlpClusters;
  std::size_t k = 5;
  std::size_t hidden = 500;
  EmbeddingDims embedding_dims = {10, 10, 10, 10, 10, 10};
  std::size_t cluster_count = 0;
  std::size_t rnn_hidden = 500;
  std::size_t window = 5;
  std::size_t memory_m = 10000;
  std::size_t memory_batch = 5000;

  bool uses_clusters() const;
  bool uses_gps_block() const;
  bool uses_embeddings() const;
  bool is_recurrent() const;
  // Points fed to the recurrent encoder per step.
  std::size_t step_window() const;
  std::size_t embedding_width() const;

  // Throws UsageError on inconsistent fields.
  void validate() const;

  std::string to_json() const;
  static ModelConfig from_json(std::string_view text);

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

}  // namespace taxidest::models

#endif  // TAXIDEST_MODELS_CONFIG_H_
