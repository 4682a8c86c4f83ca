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

#ifndef TAXIDEST_DATA_RECORDS_H_
#define TAXIDEST_DATA_RECORDS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taxidest/geo.h"

namespace taxidest::data {

using geo::GeoPoint;

// CALL_TYPE column: A = phone dispatch, B = taxi stand, C = street hail.
enum class CallType : std::uint8_t { kPhone = 0, kStand = 1, kStreet = 2 };

// One complete ride. Polyline points are sampled every 15 seconds and are
// stored as (lat, lon) even though the source file uses [lon, lat].
struct TrainRecord {
  std::string trip_id;
  CallType call_type = CallType::kStreet;
  std::optional<std::int64_t> origin_call;
  std::optional<std::int64_t> origin_stand;
  std::int64_t taxi_id = 0;
  std::int64_t timestamp = 0;
  bool missing_data = false;
  std::vector<GeoPoint> polyline;

  // Records with missing data or no points are excluded from training,
  // clustering and standardization.
  bool usable() const { return !missing_data && !polyline.empty(); }
  const GeoPoint& destination() const { return polyline.back(); }

  friend bool operator==(const TrainRecord&, const TrainRecord&) = default;
};

// Copies the usable records, preserving order.
std::vector<TrainRecord> usable_records(std::span<const TrainRecord> records);

}  // namespace taxidest::data

#endif  // TAXIDEST_DATA_RECORDS_H_
