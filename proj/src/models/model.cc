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

#include "taxidest/models/model.h"

#include <algorithm>
#include <map>

#include "taxidest/errors.h"

namespace taxidest::models {
namespace {

constexpr double kEmbeddingInitLimit = 0.1;
constexpr double kForgetBiasInit = 1.0;

const char* const kBankGps = "memory_bank/gps";
const char* const kBankMeta = "memory_bank/meta";
const char* const kBankDest = "memory_bank/dest";

}  // namespace

std::array<std::size_t, kMetadataCount> embedding_rows(const data::MetadataVocab& vocab) {
  return {vocab.clients.size(), vocab.taxis.size(), vocab.stands.size(),
          static_cast<std::size_t>(data::kQuarterHours), static_cast<std::size_t>(data::kDaysOfWeek),
          static_cast<std::size_t>(data::kWeeksOfYear)};
}

template <typename T>
DestinationModel<T>::DestinationModel(ModelConfig config, clustering::ClusterSet clusters,
                                      geo::StandardizationStats stats, data::MetadataVocab vocab,
                                      nn::InitRng& rng)
    : config_(config), clusters_(std::move(clusters)), stats_(stats), vocab_(std::move(vocab)) {
  if (config_.uses_clusters()) {
    config_.cluster_count = clusters_.size();
  } else {
    clusters_.centers.clear();
    config_.cluster_count = 0;
  }
  config_.validate();

  centers_ = nn::Tensor<T>(clusters_.size(), 2);
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    centers_(i, 0) = static_cast<T>(clusters_.centers[i].lat);
    centers_(i, 1) = static_cast<T>(clusters_.centers[i].lon);
  }

  if (config_.uses_embeddings()) {
    const auto rows = embedding_rows(vocab_);
    for (std::size_t i = 0; i < kMetadataCount; ++i) {
      params_.add("emb/" + std::string(kMetadataNames[i]),
                  nn::uniform<T>(rows[i], config_.embedding_dims[i],
                                 static_cast<T>(kEmbeddingInitLimit), rng));
    }
  }

  const std::size_t gps_width = 4 * config_.k;
  const std::size_t encoder_input = gps_width + config_.embedding_width();
  if (config_.is_recurrent()) {
    const std::size_t step_input = 2 * config_.step_window();
    add_lstm("lstm_fwd", step_input, rng);
    if (config_.variant != Variant::kRnn) add_lstm("lstm_bwd", step_input, rng);
  }
  if (config_.variant == Variant::kMemoryNet) {
    for (const char* layer : {"prefix_encoder", "candidate_encoder"}) {
      params_.add(std::string(layer) + "/weights",
                  nn::glorot_uniform<T>(encoder_input, config_.hidden, rng));
      params_.add(std::string(layer) + "/bias", nn::Tensor<T>(1, config_.hidden));
    }
    return;
  }
  const std::size_t outputs = config_.uses_clusters() ? config_.cluster_count : 2;
  params_.add("hidden/weights", nn::glorot_uniform<T>(head_input_width(), config_.hidden, rng));
  params_.add("hidden/bias", nn::Tensor<T>(1, config_.hidden));
  params_.add("output/weights", nn::glorot_uniform<T>(config_.hidden, outputs, rng));
  params_.add("output/bias", nn::Tensor<T>(1, outputs));
}

template <typename T>
std::size_t DestinationModel<T>::head_input_width() const {
  const std::size_t emb = config_.embedding_width();
  switch (config_.variant) {
    case Variant::kRnn: return config_.rnn_hidden + emb;
    case Variant::kBrnn:
    case Variant::kBrnnWindow: return 2 * config_.rnn_hidden + emb;
    default: return (config_.uses_gps_block() ? 4 * config_.k : 0) + emb;
  }
}

template <typename T>
void DestinationModel<T>::add_lstm(const std::string& prefix, std::size_t input, nn::InitRng& rng) {
  const std::size_t h = config_.rnn_hidden;
  params_.add(prefix + "/input_weights", nn::glorot_uniform<T>(input, 4 * h, rng));
  params_.add(prefix + "/hidden_weights", nn::glorot_uniform<T>(h, 4 * h, rng));
  nn::Tensor<T> bias(1, 4 * h);
  for (std::size_t j = h; j < 2 * h; ++j) bias[j] = static_cast<T>(kForgetBiasInit);
  params_.add(prefix + "/bias", std::move(bias));
}

template <typename T>
nn::LstmParams<T> DestinationModel<T>::lstm_params(const std::string& prefix) {
  return {&params_.at(prefix + "/input_weights"), &params_.at(prefix + "/hidden_weights"),
          &params_.at(prefix + "/bias")};
}

template <typename T>
Var<T> DestinationModel<T>::gps_block(Tape<T>& tape, std::span<const PrefixExample> batch) const {
  const std::size_t k = config_.k;
  nn::Tensor<T> block(batch.size(), 4 * k);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& ex = batch[i];
    if (ex.first_k.size() != k || ex.last_k.size() != k) {
      throw PreconditionError("example windows have " + std::to_string(ex.first_k.size()) +
                              " points, model expects k = " + std::to_string(k));
    }
    auto row = block.row(i);
    for (std::size_t j = 0; j < k; ++j) {
      row[2 * j] = static_cast<T>(ex.first_k[j].lat);
      row[2 * j + 1] = static_cast<T>(ex.first_k[j].lon);
      row[2 * k + 2 * j] = static_cast<T>(ex.last_k[j].lat);
      row[2 * k + 2 * j + 1] = static_cast<T>(ex.last_k[j].lon);
    }
  }
  return tape.constant(std::move(block));
}

template <typename T>
Var<T> DestinationModel<T>::metadata_embeddings(Tape<T>& tape, std::span<const PrefixExample> batch) {
  std::array<std::vector<std::int32_t>, kMetadataCount> idx;
  for (auto& v : idx) v.reserve(batch.size());
  for (const auto& ex : batch) {
    idx[0].push_back(ex.client_idx);
    idx[1].push_back(ex.taxi_idx);
    idx[2].push_back(ex.stand_idx);
    idx[3].push_back(ex.time.quarter_hour);
    idx[4].push_back(ex.time.day_of_week);
    idx[5].push_back(ex.time.week_of_year);
  }
  std::vector<Var<T>> parts;
  for (std::size_t i = 0; i < kMetadataCount; ++i) {
    parts.push_back(nn::embedding_lookup<T>(
        tape, params_.at("emb/" + std::string(kMetadataNames[i])), idx[i]));
  }
  return nn::concat_cols(parts);
}

template <typename T>
Var<T> DestinationModel<T>::prediction_head(Var<T> features) {
  Tape<T>& tape = *features.tape;
  const Var<T> hidden = nn::relu(nn::dense(features, tape.parameter(params_.at("hidden/weights")),
                                           tape.parameter(params_.at("hidden/bias"))));
  const Var<T> out = nn::dense(hidden, tape.parameter(params_.at("output/weights")),
                               tape.parameter(params_.at("output/bias")));
  if (config_.variant == Variant::kMlpDirect) {
    const double scale[2] = {stats_.std_lat, stats_.std_lon};
    const double shift[2] = {stats_.mean_lat, stats_.mean_lon};
    return nn::affine_cols(out, std::span<const double>(scale), std::span<const double>(shift));
  }
  return nn::weighted_centroid(nn::softmax(out), centers_);
}

template <typename T>
Var<T> DestinationModel<T>::forward_mlp(Tape<T>& tape, std::span<const PrefixExample> batch) {
  switch (config_.variant) {
    case Variant::kMlpClusters:
    case Variant::kMlpDirect:
    case Variant::kMlpNoEmbed:
    case Variant::kMlpEmbedOnly: break;
    default:
      throw UsageError("forward_mlp called on variant " + std::string(variant_name(config_.variant)));
  }
  if (batch.empty()) throw PreconditionError("empty batch");
  std::vector<Var<T>> parts;
  if (config_.uses_gps_block()) parts.push_back(gps_block(tape, batch));
  if (config_.uses_embeddings()) parts.push_back(metadata_embeddings(tape, batch));
  const Var<T> features = parts.size() == 1 ? parts.front() : nn::concat_cols(parts);
  return prediction_head(features);
}

template <typename T>
Var<T> DestinationModel<T>::encode_sequence(Tape<T>& tape, std::span<const PrefixExample> batch,
                                            const nn::LstmParams<T>& lstm, bool reverse) {
  const std::size_t w = config_.step_window();
  const std::size_t h = lstm.hidden();
  // Uniform-length buckets, shortest first.
  std::map<std::size_t, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].full_prefix.empty()) throw PreconditionError("recurrent encoder given an empty prefix");
    buckets[batch[i].full_prefix.size()].push_back(i);
  }
  std::vector<Var<T>> finals;
  std::vector<std::size_t> order;
  for (const auto& [len, members] : buckets) {
    const std::size_t b = members.size();
    Var<T> hs = tape.constant(nn::Tensor<T>(b, h));
    Var<T> cs = tape.constant(nn::Tensor<T>(b, h));
    for (std::size_t s = 0; s < len; ++s) {
      const std::size_t t = reverse ? len - 1 - s : s;
      nn::Tensor<T> x(b, 2 * w);
      for (std::size_t m = 0; m < b; ++m) {
        const auto& prefix = batch[members[m]].full_prefix;
        // Window of w points ending at t, front-padded with the first point.
        for (std::size_t j = 0; j < w; ++j) {
          const std::size_t src = t + j + 1 >= w ? t + j + 1 - w : 0;
          const auto p = geo::standardize(prefix[src], stats_);
          x(m, 2 * j) = static_cast<T>(p.lat);
          x(m, 2 * j + 1) = static_cast<T>(p.lon);
        }
      }
      std::tie(hs, cs) = nn::lstm_cell(tape.constant(std::move(x)), hs, cs, lstm);
    }
    finals.push_back(hs);
    order.insert(order.end(), members.begin(), members.end());
  }
  if (finals.size() == 1 && std::is_sorted(order.begin(), order.end())) return finals.front();
  const Var<T> stacked = finals.size() == 1 ? finals.front() : nn::concat_rows(finals);
  std::vector<std::size_t> position(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) position[order[j]] = j;
  return nn::gather_rows(stacked, std::span<const std::size_t>(position));
}

template <typename T>
Var<T> DestinationModel<T>::forward_rnn(Tape<T>& tape, std::span<const PrefixExample> batch) {
  if (config_.variant != Variant::kRnn) {
    throw UsageError("forward_rnn called on variant " + std::string(variant_name(config_.variant)));
  }
  if (batch.empty()) throw PreconditionError("empty batch");
  const Var<T> state = encode_sequence(tape, batch, lstm_params("lstm_fwd"), false);
  return prediction_head(nn::concat_cols<T>({state, metadata_embeddings(tape, batch)}));
}

template <typename T>
Var<T> DestinationModel<T>::forward_brnn(Tape<T>& tape, std::span<const PrefixExample> batch) {
  if (config_.variant != Variant::kBrnn && config_.variant != Variant::kBrnnWindow) {
    throw UsageError("forward_brnn called on variant " + std::string(variant_name(config_.variant)));
  }
  if (batch.empty()) throw PreconditionError("empty batch");
  const Var<T> fwd = encode_sequence(tape, batch, lstm_params("lstm_fwd"), false);
  const Var<T> bwd = encode_sequence(tape, batch, lstm_params("lstm_bwd"), true);
  return prediction_head(nn::concat_cols<T>({fwd, bwd, metadata_embeddings(tape, batch)}));
}

template <typename T>
Var<T> DestinationModel<T>::encode(Tape<T>& tape, std::span<const PrefixExample> batch,
                                   const std::string& layer) {
  const Var<T> input = nn::concat_cols<T>({gps_block(tape, batch), metadata_embeddings(tape, batch)});
  return nn::relu(nn::dense(input, tape.parameter(params_.at(layer + "/weights")),
                            tape.parameter(params_.at(layer + "/bias"))));
}

template <typename T>
Var<T> DestinationModel<T>::forward_memory(Tape<T>& tape, std::span<const PrefixExample> batch,
                                           std::span<const PrefixExample> candidates) {
  if (config_.variant != Variant::kMemoryNet) {
    throw UsageError("forward_memory called on variant " + std::string(variant_name(config_.variant)));
  }
  if (batch.empty()) throw PreconditionError("empty batch");
  if (candidates.empty()) throw PreconditionError("memory network needs at least one candidate");
  const Var<T> prefix_repr = encode(tape, batch, "prefix_encoder");
  const Var<T> candidate_repr = encode(tape, candidates, "candidate_encoder");
  nn::Tensor<T> destinations(candidates.size(), 2);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    destinations(i, 0) = static_cast<T>(candidates[i].target.lat);
    destinations(i, 1) = static_cast<T>(candidates[i].target.lon);
  }
  const Var<T> similarity = nn::matmul_transposed(prefix_repr, candidate_repr);
  return nn::weighted_centroid(nn::softmax(similarity), destinations);
}

template <typename T>
Var<T> DestinationModel<T>::forward(Tape<T>& tape, std::span<const PrefixExample> batch) {
  switch (config_.variant) {
    case Variant::kRnn: return forward_rnn(tape, batch);
    case Variant::kBrnn:
    case Variant::kBrnnWindow: return forward_brnn(tape, batch);
    case Variant::kMemoryNet:
      if (bank_.empty()) throw PreconditionError("memory network has no candidate bank");
      return forward_memory(tape, batch, bank_);
    default: return forward_mlp(tape, batch);
  }
}

template <typename T>
std::vector<geo::GeoPoint> DestinationModel<T>::predict(std::span<const PrefixExample> batch,
                                                        std::size_t chunk) {
  std::vector<geo::GeoPoint> out;
  out.reserve(batch.size());
  chunk = std::max<std::size_t>(chunk, 1);
  for (std::size_t start = 0; start < batch.size(); start += chunk) {
    const auto part = batch.subspan(start, std::min(chunk, batch.size() - start));
    Tape<T> tape;
    const auto& y = forward(tape, part).value();
    for (std::size_t r = 0; r < y.rows(); ++r) {
      out.push_back({static_cast<double>(y(r, 0)), static_cast<double>(y(r, 1))});
    }
  }
  return out;
}

template <typename T>
const nn::Tensor<T>& DestinationModel<T>::embedding_table(std::string_view name) const {
  const auto* p = params_.find("emb/" + std::string(name));
  if (p == nullptr) {
    std::string valid;
    for (auto n : kMetadataNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
    throw UsageError("unknown embedding table '" + std::string(name) + "'" +
                     (config_.uses_embeddings() ? "; valid tables: " + valid
                                                : "; this model has no embeddings"));
  }
  return p->value;
}

template <typename T>
nn::Checkpoint DestinationModel<T>::to_checkpoint() const {
  nn::Checkpoint ckpt;
  ckpt.header = config_.to_json();
  ckpt.stats = stats_;
  ckpt.vocab = vocab_;
  ckpt.clusters = clusters_;
  nn::append_parameters(params_, ckpt);
  if (config_.variant == Variant::kMemoryNet && !bank_.empty()) {
    const std::size_t k = config_.k;
    nn::StoredTensor gps{kBankGps, nn::DType::kFloat64, bank_.size(), 4 * k, {}};
    nn::StoredTensor meta{kBankMeta, nn::DType::kInt64, bank_.size(), 6, {}};
    nn::StoredTensor dest{kBankDest, nn::DType::kFloat64, bank_.size(), 2, {}};
    for (const auto& ex : bank_) {
      for (const auto& p : ex.first_k) gps.values.insert(gps.values.end(), {p.lat, p.lon});
      for (const auto& p : ex.last_k) gps.values.insert(gps.values.end(), {p.lat, p.lon});
      meta.values.insert(meta.values.end(),
                         {double(ex.client_idx), double(ex.taxi_idx), double(ex.stand_idx),
                          double(ex.time.quarter_hour), double(ex.time.day_of_week),
                          double(ex.time.week_of_year)});
      dest.values.insert(dest.values.end(), {ex.target.lat, ex.target.lon});
    }
    ckpt.tensors.push_back(std::move(gps));
    ckpt.tensors.push_back(std::move(meta));
    ckpt.tensors.push_back(std::move(dest));
  }
  return ckpt;
}

template <typename T>
DestinationModel<T> DestinationModel<T>::from_checkpoint(const nn::Checkpoint& ckpt) {
  const ModelConfig config = ModelConfig::from_json(ckpt.header);
  if (config.uses_clusters() && ckpt.clusters.size() != config.cluster_count) {
    throw DataError("checkpoint holds " + std::to_string(ckpt.clusters.size()) +
                    " clusters, header says " + std::to_string(config.cluster_count));
  }
  nn::InitRng rng(0);
  DestinationModel model(config, ckpt.clusters, ckpt.stats, ckpt.vocab, rng);
  nn::restore_parameters(ckpt, model.params_);

  const auto* gps = ckpt.find(kBankGps);
  const auto* meta = ckpt.find(kBankMeta);
  const auto* dest = ckpt.find(kBankDest);
  if (gps != nullptr && meta != nullptr && dest != nullptr) {
    const std::size_t k = config.k;
    const std::size_t n = static_cast<std::size_t>(gps->rows);
    if (gps->cols != 4 * k || meta->rows != n || meta->cols != 6 || dest->rows != n || dest->cols != 2) {
      throw DataError("memory bank tensors have inconsistent shapes");
    }
    std::vector<PrefixExample> bank(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& ex = bank[i];
      const double* g = gps->values.data() + i * 4 * k;
      for (std::size_t j = 0; j < k; ++j) ex.first_k.push_back({g[2 * j], g[2 * j + 1]});
      for (std::size_t j = 0; j < k; ++j) ex.last_k.push_back({g[2 * k + 2 * j], g[2 * k + 2 * j + 1]});
      const double* m = meta->values.data() + i * 6;
      ex.client_idx = static_cast<std::int32_t>(m[0]);
      ex.taxi_idx = static_cast<std::int32_t>(m[1]);
      ex.stand_idx = static_cast<std::int32_t>(m[2]);
      ex.time = {static_cast<int>(m[3]), static_cast<int>(m[4]), static_cast<int>(m[5])};
      ex.target = {dest->values[2 * i], dest->values[2 * i + 1]};
    }
    model.bank_ = std::move(bank);
  }
  return model;
}

template <typename T>
void DestinationModel<T>::save(const std::filesystem::path& path) const {
  nn::save_checkpoint(path, to_checkpoint());
}

template <typename T>
DestinationModel<T> DestinationModel<T>::load(const std::filesystem::path& path) {
  return from_checkpoint(nn::load_checkpoint(path));
}

template class DestinationModel<float>;
template class DestinationModel<double>;

}  // namespace taxidest::models
