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

#ifndef TAXIDEST_DATA_PREFIX_H_
#define TAXIDEST_DATA_PREFIX_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "taxidest/data/records.h"
#include "taxidest/data/time_features.h"
#include "taxidest/data/vocab.h"
#include "taxidest/geo.h"

namespace taxidest::data {

using Rng = std::mt19937_64;

// A model-ready training instance built from the first `cut` points of a
// ride.
struct PrefixExample {
  std::string trip_id;
  std::vector<geo::StandardizedPoint> first_k;
  std::vector<geo::StandardizedPoint> last_k;
  std::vector<GeoPoint> full_prefix;
  std::int32_t client_idx = kUnknownIndex;
  std::int32_t taxi_idx = kUnknownIndex;
  std::int32_t stand_idx = kUnknownIndex;
  TimeFeatures time;
  GeoPoint target;
};

// first_k holds the first min(cut, k) prefix points followed by copies of the
// prefix's last point; last_k holds copies of the prefix's first point
// followed by the last min(cut, k) prefix points. Both have exactly k
// entries. The target is the final point of the full ride.
PrefixExample make_prefix_example(const TrainRecord& record, std::size_t cut,
                                  std::size_t k,
                                  const geo::StandardizationStats& stats,
                                  const MetadataVocab& vocab);

// Number of distinct non-empty prefixes over the usable records.
std::uint64_t count_prefixes(std::span<const TrainRecord> records);

struct PrefixRef {
  std::size_t record = 0;  // index into the sampler's record span
  std::size_t cut = 0;     // prefix length, 1..polyline size

  friend bool operator==(const PrefixRef&, const PrefixRef&) = default;
};

// Draws uniformly from the set of all prefixes of all usable records, which
// picks a ride with probability proportional to its length and then a cut
// uniformly in [1, length]. Not thread-safe; give each worker its own rng.
class PrefixSampler {
 public:
  explicit PrefixSampler(std::span<const TrainRecord> records);

  PrefixRef sample(Rng& rng) const;
  std::uint64_t total_prefixes() const { return cumulative_.empty() ? 0 : cumulative_.back(); }

 private:
  std::vector<std::uint64_t> cumulative_;
};

// One uniformly drawn cut per usable record, in record order. Used to build
// fixed validation and test prefix sets.
std::vector<PrefixRef> one_cut_per_record(std::span<const TrainRecord> records,
                                          Rng& rng);

}  // namespace taxidest::data

#endif  // TAXIDEST_DATA_PREFIX_H_
