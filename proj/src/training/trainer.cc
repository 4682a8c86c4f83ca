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

#include "taxidest/training/trainer.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <unordered_set>

#include "json.hpp"
#include "taxidest/errors.h"
#include "taxidest/nn/optimizer.h"

namespace taxidest::training {
namespace {

constexpr std::size_t kDefaultBatch = 200;

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename T>
std::vector<nn::Tensor<T>> snapshot(const nn::ParameterSet<T>& params) {
  std::vector<nn::Tensor<T>> out;
  out.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) out.push_back(params[i].value);
  return out;
}

template <typename T>
void restore(nn::ParameterSet<T>& params, const std::vector<nn::Tensor<T>>& values) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i].value = values[i];
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw UsageError("learning rate must be non-negative");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw UsageError("momentum must lie in [0, 1)");
  if (batch_size && *batch_size == 0) throw UsageError("batch size must be positive");
  if (max_batches == 0) throw UsageError("max_batches must be positive");
  if (validation_every == 0) throw UsageError("validation interval must be positive");
  if (patience == 0) throw UsageError("patience must be at least 1");
  if (clip_norm && !(*clip_norm > 0.0)) throw UsageError("clip norm must be positive");
  if (!(objective_unit_m > 0.0)) throw UsageError("objective unit must be positive");
}

void TrainReport::write_jsonl(std::ostream& out) const {
  for (const auto& r : history) {
    nlohmann::ordered_json j;
    j["type"] = "validation";
    j["batches"] = r.batches;
    j["train_loss_km"] = r.train_loss_km;
    j["validation_km"] = r.validation_km;
    out << j.dump() << '\n';
  }
  nlohmann::ordered_json s;
  s["type"] = "summary";
  s["stop_reason"] = stop_reason == StopReason::kPatience ? "patience" : "max_batches";
  if (!history.empty()) {
    s["best_batches"] = history[best_index].batches;
    s["best_validation_km"] = history[best_index].validation_km;
  }
  if (best_checkpoint) s["best_checkpoint"] = best_checkpoint->string();
  out << s.dump() << '\n';
}

template <typename T>
nn::Var<T> loss_batch(nn::Var<T> predictions, std::span<const PrefixExample> batch) {
  if (batch.empty()) throw PreconditionError("loss over an empty batch");
  nn::Tensor<double> targets(batch.size(), 2);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    targets(i, 0) = batch[i].target.lat;
    targets(i, 1) = batch[i].target.lon;
  }
  return nn::equirectangular_loss(predictions, targets);
}

template <typename T>
nn::Var<T> loss_batch(DestinationModel<T>& model, nn::Tape<T>& tape,
                      std::span<const PrefixExample> batch) {
  if (batch.empty()) throw PreconditionError("loss over an empty batch");
  return loss_batch(model.forward(tape, batch), batch);
}

template <typename T>
double evaluate(DestinationModel<T>& model, std::span<const PrefixExample> examples) {
  if (examples.empty()) throw PreconditionError("evaluation over an empty prefix set");
  const auto predictions = model.predict(examples);
  double total = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    total += geo::haversine_distance(predictions[i], examples[i].target);
  }
  return total / static_cast<double>(examples.size()) / 1000.0;
}

std::vector<std::size_t> sample_candidates(std::size_t record_count,
                                           std::span<const std::size_t> excluded, std::size_t m,
                                           data::Rng& rng) {
  const std::unordered_set<std::size_t> skip(excluded.begin(), excluded.end());
  std::size_t eligible_count = record_count;
  for (std::size_t e : skip) {
    if (e < record_count) --eligible_count;
  }
  if (eligible_count == 0) throw PreconditionError("no eligible memory candidates");
  std::vector<std::size_t> out;
  if (m >= eligible_count / 2) {
    std::vector<std::size_t> eligible;
    eligible.reserve(eligible_count);
    for (std::size_t i = 0; i < record_count; ++i) {
      if (!skip.contains(i)) eligible.push_back(i);
    }
    std::shuffle(eligible.begin(), eligible.end(), rng);
    eligible.resize(std::min(m, eligible.size()));
    return eligible;
  }
  std::unordered_set<std::size_t> taken;
  std::uniform_int_distribution<std::size_t> dist(0, record_count - 1);
  while (out.size() < m) {
    const std::size_t i = dist(rng);
    if (skip.contains(i) || !taken.insert(i).second) continue;
    out.push_back(i);
  }
  return out;
}

template <typename T>
TrainReport train(DestinationModel<T>& model, std::span<const data::TrainRecord> train_records,
                  std::span<const PrefixExample> validation, const TrainConfig& cfg,
                  Validator<T> validator) {
  cfg.validate();
  if (!validator) {
    if (validation.empty()) throw PreconditionError("training needs a validation prefix set");
    validator = [validation](DestinationModel<T>& m) { return evaluate(m, validation); };
  }
  const auto& mc = model.config();
  const bool memory = mc.variant == models::Variant::kMemoryNet;
  const std::size_t batch_size =
      cfg.batch_size.value_or(memory ? mc.memory_batch : kDefaultBatch);

  data::Rng rng(cfg.seed);
  const data::PrefixSampler sampler(train_records);

  if (memory) {
    data::Rng bank_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<PrefixExample> bank;
    for (std::size_t i : sample_candidates(train_records.size(), {}, mc.memory_m, bank_rng)) {
      const auto& r = train_records[i];
      if (r.usable()) bank.push_back(model.make_example(r, r.polyline.size()));
    }
    model.set_candidate_bank(std::move(bank));
  }

  TrainReport report;
  auto best_values = snapshot(model.parameters());
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  double loss_sum = 0.0;
  std::size_t loss_count = 0;

  std::vector<PrefixExample> batch;
  std::vector<std::size_t> batch_records;
  auto& params = model.parameters();
  params.zero_grad();
  for (std::size_t step = 1; step <= cfg.max_batches; ++step) {
    batch.clear();
    batch_records.clear();
    for (std::size_t i = 0; i < batch_size; ++i) {
      const auto ref = sampler.sample(rng);
      batch.push_back(model.make_example(train_records[ref.record], ref.cut));
      batch_records.push_back(ref.record);
    }

    nn::Tape<T> tape;
    nn::Var<T> predictions;
    if (memory) {
      std::vector<PrefixExample> candidates;
      for (std::size_t i : sample_candidates(train_records.size(), batch_records, mc.memory_m, rng)) {
        const auto& r = train_records[i];
        if (r.usable()) candidates.push_back(model.make_example(r, r.polyline.size()));
      }
      predictions = model.forward_memory(tape, batch, candidates);
    } else {
      predictions = model.forward(tape, batch);
    }
    const auto loss = loss_batch(predictions, std::span<const PrefixExample>(batch));
    loss_sum += static_cast<double>(loss.value()[0]);
    ++loss_count;
    const double inv_unit = 1.0 / cfg.objective_unit_m;
    const double no_shift = 0.0;
    tape.backward(nn::affine_cols(loss, std::span<const double>(&inv_unit, 1),
                                  std::span<const double>(&no_shift, 1)));
    if (cfg.clip_norm) nn::clip_gradient_norm(params, *cfg.clip_norm);
    nn::sgd_momentum_step(params, cfg.learning_rate, cfg.momentum);

    const bool last = step == cfg.max_batches;
    if (step % cfg.validation_every != 0 && !last) continue;

    ValidationRecord rec;
    rec.batches = step;
    rec.train_loss_km = loss_sum / static_cast<double>(loss_count) / 1000.0;
    rec.validation_km = validator(model);
    loss_sum = 0.0;
    loss_count = 0;
    report.history.push_back(rec);
    if (cfg.log != nullptr) {
      *cfg.log << "batch " << step << "  train " << rec.train_loss_km << " km  validation "
               << rec.validation_km << " km\n";
    }
    if (rec.validation_km < best) {
      best = rec.validation_km;
      report.best_index = report.history.size() - 1;
      since_best = 0;
      best_values = snapshot(params);
      if (cfg.checkpoint_path) {
        model.save(*cfg.checkpoint_path);
        report.best_checkpoint = cfg.checkpoint_path;
      }
    } else if (++since_best >= cfg.patience) {
      report.stop_reason = StopReason::kPatience;
      break;
    }
  }
  restore(params, best_values);
  return report;
}

template <typename T>
void write_submission(DestinationModel<T>& model, std::span<const PrefixExample> examples,
                      const std::filesystem::path& path) {
  const auto predictions = examples.empty() ? std::vector<geo::GeoPoint>{} : model.predict(examples);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "TRIP_ID,LATITUDE,LONGITUDE\n";
  for (std::size_t i = 0; i < examples.size(); ++i) {
    out << examples[i].trip_id << ',' << format_double(predictions[i].lat) << ','
        << format_double(predictions[i].lon) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

#define TAXIDEST_INSTANTIATE_TRAINING(T)                                                        \
  template nn::Var<T> loss_batch(nn::Var<T>, std::span<const PrefixExample>);                   \
  template nn::Var<T> loss_batch(DestinationModel<T>&, nn::Tape<T>&,                            \
                                 std::span<const PrefixExample>);                               \
  template double evaluate(DestinationModel<T>&, std::span<const PrefixExample>);              \
  template TrainReport train(DestinationModel<T>&, std::span<const data::TrainRecord>,         \
                             std::span<const PrefixExample>, const TrainConfig&, Validator<T>); \
  template void write_submission(DestinationModel<T>&, std::span<const PrefixExample>,         \
                                 const std::filesystem::path&);

TAXIDEST_INSTANTIATE_TRAINING(float)
TAXIDEST_INSTANTIATE_TRAINING(double)

}  // namespace taxidest::training
