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

#ifndef TAXIDEST_MODELS_MODEL_H_
#define TAXIDEST_MODELS_MODEL_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "taxidest/clustering.h"
#include "taxidest/data/prefix.h"
#include "taxidest/data/vocab.h"
#include "taxidest/geo.h"
#include "taxidest/models/config.h"
#include "taxidest/nn/checkpoint.h"
#include "taxidest/nn/ops.h"
#include "taxidest/nn/parameter.h"
#include "taxidest/nn/tape.h"

namespace taxidest::models {

using data::PrefixExample;
using nn::Tape;
using nn::Var;

// A destination predictor: parameters plus everything needed to turn raw
// rides into predictions (clusters, standardization, vocabularies).
//
// Forward passes record onto a caller-owned tape and return predictions in
// degrees as a [batch x 2] (lat, lon) node. A model under training belongs to
// one thread.
template <typename T>
class DestinationModel {
 public:
  // Allocates and initializes every parameter from `rng`. For cluster
  // variants config.cluster_count is taken from `clusters`.
  DestinationModel(ModelConfig config, clustering::ClusterSet clusters,
                   geo::StandardizationStats stats, data::MetadataVocab vocab,
                   nn::InitRng& rng);

  const ModelConfig& config() const { return config_; }
  nn::ParameterSet<T>& parameters() { return params_; }
  const nn::ParameterSet<T>& parameters() const { return params_; }
  const clustering::ClusterSet& clusters() const { return clusters_; }
  const geo::StandardizationStats& stats() const { return stats_; }
  const data::MetadataVocab& vocab() const { return vocab_; }

  // Dispatches on the variant. The memory network reads its candidates from
  // the stored candidate bank.
  Var<T> forward(Tape<T>& tape, std::span<const PrefixExample> batch);

  // Any of the four MLP variants.
  Var<T> forward_mlp(Tape<T>& tape, std::span<const PrefixExample> batch);
  // Unidirectional LSTM encoder.
  Var<T> forward_rnn(Tape<T>& tape, std::span<const PrefixExample> batch);
  // brnn and brnn_window.
  Var<T> forward_brnn(Tape<T>& tape, std::span<const PrefixExample> batch);
  // Candidates are whole rides rendered as full-length prefixes; their
  // targets are the destinations being weighted.
  Var<T> forward_memory(Tape<T>& tape, std::span<const PrefixExample> batch,
                        std::span<const PrefixExample> candidates);

  // Inference without gradients, in chunks.
  std::vector<geo::GeoPoint> predict(std::span<const PrefixExample> batch,
                                     std::size_t chunk = 1024);

  // Fixed candidates used by the memory network outside training.
  const std::vector<PrefixExample>& candidate_bank() const { return bank_; }
  void set_candidate_bank(std::vector<PrefixExample> bank) { bank_ = std::move(bank); }

  // Renders a ride prefix the way this model expects.
  PrefixExample make_example(const data::TrainRecord& record, std::size_t cut) const {
    return data::make_prefix_example(record, cut, config_.k, stats_, vocab_);
  }

  nn::Checkpoint to_checkpoint() const;
  static DestinationModel from_checkpoint(const nn::Checkpoint& ckpt);
  void save(const std::filesystem::path& path) const;
  static DestinationModel load(const std::filesystem::path& path);

  // Embedding matrix for one metadata table ("client", "quarter_hour", ...).
  const nn::Tensor<T>& embedding_table(std::string_view name) const;

 private:
  Var<T> gps_block(Tape<T>& tape, std::span<const PrefixExample> batch) const;
  Var<T> metadata_embeddings(Tape<T>& tape, std::span<const PrefixExample> batch);
  Var<T> prediction_head(Var<T> features);
  // Final hidden state of one LSTM pass, rows in batch order.
  Var<T> encode_sequence(Tape<T>& tape, std::span<const PrefixExample> batch,
                         const nn::LstmParams<T>& lstm, bool reverse);
  nn::LstmParams<T> lstm_params(const std::string& prefix);
  void add_lstm(const std::string& prefix, std::size_t input, nn::InitRng& rng);
  Var<T> encode(Tape<T>& tape, std::span<const PrefixExample> batch, const std::string& layer);
  std::size_t head_input_width() const;

  ModelConfig config_;
  clustering::ClusterSet clusters_;
  geo::StandardizationStats stats_;
  data::MetadataVocab vocab_;
  nn::ParameterSet<T> params_;
  nn::Tensor<T> centers_;
  std::vector<PrefixExample> bank_;
};

// Vocabulary sizes (rows, including UNK where applicable) of the six
// embedding tables for a given metadata vocabulary.
std::array<std::size_t, kMetadataCount> embedding_rows(const data::MetadataVocab& vocab);

template <typename T>
DestinationModel<T> build_model(const ModelConfig& config, const clustering::ClusterSet& clusters,
                                const geo::StandardizationStats& stats,
                                const data::MetadataVocab& vocab, nn::InitRng& rng) {
  return DestinationModel<T>(config, clusters, stats, vocab, rng);
}

}  // namespace taxidest::models

#endif  // TAXIDEST_MODELS_MODEL_H_
