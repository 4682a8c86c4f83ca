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

#ifndef TAXIDEST_GEO_H_
#define TAXIDEST_GEO_H_

#include <array>
#include <numbers>

namespace taxidest::geo {

// A WGS-84-ish position in degrees. lat in [-90, 90], lon in [-180, 180].
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

// Spherical Earth. Training loss, clustering and evaluation share one radius.
struct EarthModel {
  double radius_m = 6371000.0;
};

inline constexpr EarthModel kEarth{};

inline constexpr double deg_to_rad(double deg) {
  return deg * (std::numbers::pi / 180.0);
}
inline constexpr double rad_to_deg(double rad) {
  return rad * (180.0 / std::numbers::pi);
}

// Great-circle distance in meters.
double haversine_distance(const GeoPoint& x, const GeoPoint& y,
                          const EarthModel& earth = kEarth);

// Planar approximation R * sqrt((dlon * cos(mean lat))^2 + dlat^2), meters.
double equirectangular_distance(const GeoPoint& x, const GeoPoint& y,
                                const EarthModel& earth = kEarth);

// Partial derivatives of equirectangular_distance(x, y) with respect to
// y.lat and y.lon, in meters per degree. Zero at x == y.
std::array<double, 2> equirectangular_gradient(const GeoPoint& x,
                                               const GeoPoint& y,
                                               const EarthModel& earth = kEarth);

// Per-axis mean and standard deviation used to standardize coordinates.
struct StandardizationStats {
  double mean_lat = 0.0;
  double mean_lon = 0.0;
  double std_lat = 1.0;
  double std_lon = 1.0;
  friend bool operator==(const StandardizationStats&, const StandardizationStats&) = default;
};

// Standard deviations below this are replaced by 1.
inline constexpr double kMinStd = 1e-12;

// Returns stats with degenerate deviations replaced by 1.
StandardizationStats guard_zero_variance(StandardizationStats stats);

struct StandardizedPoint {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const StandardizedPoint&, const StandardizedPoint&) = default;
};

StandardizedPoint standardize(const GeoPoint& p,
                              const StandardizationStats& stats);
GeoPoint unstandardize(const StandardizedPoint& s,
                       const StandardizationStats& stats);

}  // namespace taxidest::geo

#endif  // TAXIDEST_GEO_H_
