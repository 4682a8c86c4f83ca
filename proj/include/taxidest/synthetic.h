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

#ifndef TAXIDEST_SYNTHETIC_H_
#define TAXIDEST_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "taxidest/data/records.h"

namespace taxidest::synthetic {

// A deterministic fake city: rides follow a rectangular street grid from an
// origin to a destination drawn around one of a few Gaussian hotspots.
// Metadata carries signal: regular clients and stands favour particular
// hotspots, and the hotspot mix drifts with the hour of day.
struct CityConfig {
  std::size_t trips = 200;
  std::uint64_t seed = 1;
  double center_lat = 41.15;
  double center_lon = -8.61;
  double city_radius_m = 4000.0;
  double street_spacing_m = 200.0;
  std::size_t hotspots = 6;
  double hotspot_sigma_m = 150.0;
  double min_hotspot_separation_m = 1500.0;
  double speed_m_per_sample = 110.0;  // distance covered per 15 s sample
  double gps_noise_m = 8.0;
  std::size_t clients = 40;
  std::size_t taxis = 25;
  std::size_t stands = 8;
  double missing_fraction = 0.0;
  std::int64_t start_timestamp = 1372636800;  // 2013-07-01T00:00:00Z
  std::int64_t span_seconds = 365 * 86400;
};

std::vector<data::TrainRecord> generate_city(const CityConfig& cfg);

}  // namespace taxidest::synthetic

#endif  // TAXIDEST_SYNTHETIC_H_
