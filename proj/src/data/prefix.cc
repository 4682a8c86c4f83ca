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

#include "taxidest/data/prefix.h"

#include <algorithm>

#include "taxidest/errors.h"

namespace taxidest::data {

PrefixExample make_prefix_example(const TrainRecord& record, std::size_t cut,
                                  std::size_t k,
                                  const geo::StandardizationStats& stats,
                                  const MetadataVocab& vocab) {
  if (k == 0) throw PreconditionError("window size k must be at least 1");
  if (cut == 0 || cut > record.polyline.size()) {
    throw PreconditionError("prefix length " + std::to_string(cut) +
                            " outside [1, " + std::to_string(record.polyline.size()) +
                            "] for trip " + record.trip_id);
  }
  PrefixExample ex;
  ex.trip_id = record.trip_id;
  ex.full_prefix.assign(record.polyline.begin(),
                        record.polyline.begin() + static_cast<std::ptrdiff_t>(cut));
  const auto& prefix = ex.full_prefix;
  const std::size_t n = std::min(cut, k);

  ex.first_k.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    ex.first_k.push_back(geo::standardize(prefix[std::min(i, cut - 1)], stats));
  }
  ex.last_k.reserve(k);
  for (std::size_t i = 0; i < k - n; ++i) {
    ex.last_k.push_back(geo::standardize(prefix.front(), stats));
  }
  for (std::size_t i = cut - n; i < cut; ++i) {
    ex.last_k.push_back(geo::standardize(prefix[i], stats));
  }

  ex.client_idx = vocab.clients.lookup(record.origin_call);
  ex.taxi_idx = vocab.taxis.lookup(record.taxi_id);
  ex.stand_idx = vocab.stands.lookup(record.origin_stand);
  ex.time = time_features(record.timestamp);
  ex.target = record.destination();
  return ex;
}

std::uint64_t count_prefixes(std::span<const TrainRecord> records) {
  std::uint64_t total = 0;
  for (const auto& r : records) {
    if (r.usable()) total += r.polyline.size();
  }
  return total;
}

PrefixSampler::PrefixSampler(std::span<const TrainRecord> records) {
  cumulative_.reserve(records.size());
  std::uint64_t total = 0;
  for (const auto& r : records) {
    if (r.usable()) total += r.polyline.size();
    cumulative_.push_back(total);
  }
  if (total == 0) throw PreconditionError("prefix sampler needs at least one usable record");
}

PrefixRef PrefixSampler::sample(Rng& rng) const {
  std::uniform_int_distribution<std::uint64_t> dist(0, cumulative_.back() - 1);
  const std::uint64_t u = dist(rng);
  // First record whose cumulative count exceeds u.
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto record = static_cast<std::size_t>(it - cumulative_.begin());
  const std::uint64_t start = record == 0 ? 0 : cumulative_[record - 1];
  return {record, static_cast<std::size_t>(u - start) + 1};
}

std::vector<PrefixRef> one_cut_per_record(std::span<const TrainRecord> records,
                                          Rng& rng) {
  std::vector<PrefixRef> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].usable()) continue;
    std::uniform_int_distribution<std::size_t> dist(1, records[i].polyline.size());
    out.push_back({i, dist(rng)});
  }
  return out;
}

}  // namespace taxidest::data
