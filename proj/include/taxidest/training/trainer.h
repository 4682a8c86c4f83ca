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

#ifndef TAXIDEST_TRAINING_TRAINER_H_
#define TAXIDEST_TRAINING_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "taxidest/data/prefix.h"
#include "taxidest/data/records.h"
#include "taxidest/models/model.h"

namespace taxidest::training {

using data::PrefixExample;
using models::DestinationModel;

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  // Unset: 200, or the model's memory_batch for the memory network.
  std::optional<std::size_t> batch_size;
  std::size_t max_batches = 100000;
  std::size_t validation_every = 1000;
  std::size_t patience = 5;
  std::uint64_t seed = 0;
  // Off by default; rescales the global gradient norm when set.
  std::optional<double> clip_norm;
  // The objective descended by SGD is the mean distance in this unit.
  double objective_unit_m = 1000.0;
  // Written every time the validation score improves.
  std::optional<std::filesystem::path> checkpoint_path;
  // Progress lines go here when set.
  std::ostream* log = nullptr;

  void validate() const;
};

struct ValidationRecord {
  std::size_t batches = 0;
  double train_loss_km = 0.0;
  double validation_km = 0.0;

  friend bool operator==(const ValidationRecord&, const ValidationRecord&) = default;
};

enum class StopReason { kPatience, kMaxBatches };

struct TrainReport {
  std::vector<ValidationRecord> history;
  std::size_t best_index = 0;
  std::optional<std::filesystem::path> best_checkpoint;
  StopReason stop_reason = StopReason::kMaxBatches;

  double best_validation_km() const { return history.at(best_index).validation_km; }
  // One JSON object per validation, then a summary object.
  void write_jsonl(std::ostream& out) const;

  friend bool operator==(const TrainReport&, const TrainReport&) = default;
};

// Mean equirectangular distance in meters between predictions and the
// batch targets, as a scalar node.
template <typename T>
nn::Var<T> loss_batch(nn::Var<T> predictions, std::span<const PrefixExample> batch);

template <typename T>
nn::Var<T> loss_batch(DestinationModel<T>& model, nn::Tape<T>& tape,
                      std::span<const PrefixExample> batch);

// Mean Haversine distance in km between predictions and targets,
// accumulated in double precision.
template <typename T>
double evaluate(DestinationModel<T>& model, std::span<const PrefixExample> examples);

// Draws up to m distinct record indices uniformly, skipping `excluded`.
std::vector<std::size_t> sample_candidates(std::size_t record_count,
                                           std::span<const std::size_t> excluded, std::size_t m,
                                           data::Rng& rng);

// Returns the validation score in km; lower is better.
template <typename T>
using Validator = std::function<double(DestinationModel<T>&)>;

// SGD with momentum on prefixes sampled uniformly from all prefixes of
// `train`, early-stopped on the validation score. Deterministic given
// cfg.seed. On return the model holds the best parameters seen.
template <typename T>
TrainReport train(DestinationModel<T>& model, std::span<const data::TrainRecord> train,
                  std::span<const PrefixExample> validation, const TrainConfig& cfg,
                  Validator<T> validator = {});

// CSV "TRIP_ID,LATITUDE,LONGITUDE", one row per example.
template <typename T>
void write_submission(DestinationModel<T>& model, std::span<const PrefixExample> examples,
                      const std::filesystem::path& path);

}  // namespace taxidest::training

#endif  // TAXIDEST_TRAINING_TRAINER_H_
