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

#ifndef TAXIDEST_DATA_SPLIT_H_
#define TAXIDEST_DATA_SPLIT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "taxidest/data/prefix.h"
#include "taxidest/data/records.h"
#include "taxidest/geo.h"

namespace taxidest::data {

// Held-out sizes used for the custom validation and test sets.
inline constexpr std::size_t kDefaultValidationTrips = 19427;
inline constexpr std::size_t kDefaultTestTrips = 19770;

// Disjoint by trip_id. Each set keeps the input order of its records.
struct DatasetSplit {
  std::vector<TrainRecord> train;
  std::vector<TrainRecord> validation;
  std::vector<TrainRecord> test;
};

// Moves n_val + n_test whole usable rides, chosen uniformly at random, into
// the validation and test sets; the remaining usable rides form the training
// set. Requires n_val + n_test < number of usable rides.
DatasetSplit split_dataset(std::span<const TrainRecord> records, Rng& rng,
                           std::size_t n_val, std::size_t n_test);

// Mean and population standard deviation over every point of the usable
// records, with the zero-variance guard applied. Needs at least two points.
geo::StandardizationStats fit_standardization(std::span<const TrainRecord> records);

}  // namespace taxidest::data

#endif  // TAXIDEST_DATA_SPLIT_H_
