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

#include "taxidest/data/split.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "taxidest/errors.h"

namespace taxidest::data {

DatasetSplit split_dataset(std::span<const TrainRecord> records, Rng& rng,
                           std::size_t n_val, std::size_t n_test) {
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].usable()) usable.push_back(i);
  }
  if (n_val + n_test >= usable.size()) {
    throw DataError("cannot hold out " + std::to_string(n_val) + " validation and " +
                    std::to_string(n_test) + " test trajectories from " +
                    std::to_string(usable.size()) + " usable records");
  }

  // 0 = train, 1 = validation, 2 = test, indexed like `usable`.
  std::vector<std::size_t> order(usable.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> assignment(usable.size(), 0);
  for (std::size_t i = 0; i < n_val; ++i) assignment[order[i]] = 1;
  for (std::size_t i = n_val; i < n_val + n_test; ++i) assignment[order[i]] = 2;

  DatasetSplit split;
  for (std::size_t j = 0; j < usable.size(); ++j) {
    const auto& r = records[usable[j]];
    switch (assignment[j]) {
      case 0: split.train.push_back(r); break;
      case 1: split.validation.push_back(r); break;
      default: split.test.push_back(r); break;
    }
  }
  return split;
}

geo::StandardizationStats fit_standardization(std::span<const TrainRecord> records) {
  std::size_t n = 0;
  double sum_lat = 0.0, sum_lon = 0.0;
  for (const auto& r : records) {
    if (!r.usable()) continue;
    for (const auto& p : r.polyline) {
      sum_lat += p.lat;
      sum_lon += p.lon;
      ++n;
    }
  }
  if (n < 2) throw DataError("standardization needs at least 2 points, got " + std::to_string(n));
  geo::StandardizationStats stats;
  stats.mean_lat = sum_lat / static_cast<double>(n);
  stats.mean_lon = sum_lon / static_cast<double>(n);
  double ss_lat = 0.0, ss_lon = 0.0;
  for (const auto& r : records) {
    if (!r.usable()) continue;
    for (const auto& p : r.polyline) {
      ss_lat += (p.lat - stats.mean_lat) * (p.lat - stats.mean_lat);
      ss_lon += (p.lon - stats.mean_lon) * (p.lon - stats.mean_lon);
    }
  }
  stats.std_lat = std::sqrt(ss_lat / static_cast<double>(n));
  stats.std_lon = std::sqrt(ss_lon / static_cast<double>(n));
  return geo::guard_zero_variance(stats);
}

}  // namespace taxidest::data
