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

#include "taxidest/models/config.h"

#include <numeric>

#include "json.hpp"
#include "taxidest/errors.h"

namespace taxidest::models {
namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 8> kVariants = {{
    {Variant::kMlpClusters, "mlp_clusters"},
    {Variant::kMlpDirect, "mlp_direct"},
    {Variant::kMlpNoEmbed, "mlp_no_embed"},
    {Variant::kMlpEmbedOnly, "mlp_embed_only"},
    {Variant::kRnn, "rnn"},
    {Variant::kBrnn, "brnn"},
    {Variant::kBrnnWindow, "brnn_window"},
    {Variant::kMemoryNet, "memory_net"},
}};

}  // namespace

std::string_view variant_name(Variant v) {
  for (const auto& [variant, name] : kVariants) {
    if (variant == v) return name;
  }
  return "unknown";
}

std::string valid_variant_names() {
  std::string out;
  for (const auto& [variant, name] : kVariants) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

Variant parse_variant(std::string_view name) {
  for (const auto& [variant, n] : kVariants) {
    if (n == name) return variant;
  }
  throw UsageError("unknown variant '" + std::string(name) + "'; valid variants: " +
                   valid_variant_names());
}

bool ModelConfig::uses_clusters() const {
  return variant != Variant::kMlpDirect && variant != Variant::kMemoryNet;
}

bool ModelConfig::uses_gps_block() const {
  return variant == Variant::kMlpClusters || variant == Variant::kMlpDirect ||
         variant == Variant::kMlpNoEmbed || variant == Variant::kMemoryNet;
}

bool ModelConfig::uses_embeddings() const { return variant != Variant::kMlpNoEmbed; }

bool ModelConfig::is_recurrent() const {
  return variant == Variant::kRnn || variant == Variant::kBrnn || variant == Variant::kBrnnWindow;
}

std::size_t ModelConfig::step_window() const {
  return variant == Variant::kBrnnWindow ? window : 1;
}

std::size_t ModelConfig::embedding_width() const {
  return uses_embeddings()
             ? std::accumulate(embedding_dims.begin(), embedding_dims.end(), std::size_t{0})
             : 0;
}

void ModelConfig::validate() const {
  if (k == 0) throw UsageError("k must be positive");
  if (hidden == 0) throw UsageError("hidden width must be positive");
  for (std::size_t i = 0; i < kMetadataCount; ++i) {
    if (embedding_dims[i] == 0) {
      throw UsageError("embedding width for " + std::string(kMetadataNames[i]) + " must be positive");
    }
  }
  if (uses_clusters() && cluster_count == 0) {
    throw UsageError(std::string(variant_name(variant)) + " needs at least one cluster center");
  }
  if (is_recurrent() && rnn_hidden == 0) throw UsageError("rnn hidden width must be positive");
  if (variant == Variant::kBrnnWindow && window == 0) throw UsageError("window must be positive");
  if (variant == Variant::kMemoryNet && (memory_m == 0 || memory_batch == 0)) {
    throw UsageError("memory network needs positive candidate count and batch size");
  }
}

std::string ModelConfig::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "taxidest-model";
  j["variant"] = variant_name(variant);
  j["k"] = k;
  j["hidden"] = hidden;
  j["embedding_dims"] = embedding_dims;
  j["cluster_count"] = cluster_count;
  j["rnn_hidden"] = rnn_hidden;
  j["window"] = window;
  j["memory_m"] = memory_m;
  j["memory_batch"] = memory_batch;
  return j.dump();
}

ModelConfig ModelConfig::from_json(std::string_view text) {
  ModelConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "taxidest-model") throw DataError("not a taxidest model header");
    c.variant = parse_variant(j.at("variant").get<std::string>());
    c.k = j.at("k").get<std::size_t>();
    c.hidden = j.at("hidden").get<std::size_t>();
    c.embedding_dims = j.at("embedding_dims").get<EmbeddingDims>();
    c.cluster_count = j.at("cluster_count").get<std::size_t>();
    c.rnn_hidden = j.at("rnn_hidden").get<std::size_t>();
    c.window = j.at("window").get<std::size_t>();
    c.memory_m = j.at("memory_m").get<std::size_t>();
    c.memory_batch = j.at("memory_batch").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model header: ") + e.what());
  }
  return c;
}

}  // namespace taxidest::models
