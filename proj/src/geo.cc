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

#include "taxidest/geo.h"

#include <cmath>

namespace taxidest::geo {

double haversine_distance(const GeoPoint& x, const GeoPoint& y,
                          const EarthModel& earth) {
  const double phi_x = deg_to_rad(x.lat);
  const double phi_y = deg_to_rad(y.lat);
  const double s_lat = std::sin((phi_y - phi_x) / 2.0);
  const double s_lon = std::sin(deg_to_rad(y.lon - x.lon) / 2.0);
  double a = s_lat * s_lat + std::cos(phi_x) * std::cos(phi_y) * s_lon * s_lon;
  if (a > 1.0) a = 1.0;
  return 2.0 * earth.radius_m * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
}

double equirectangular_distance(const GeoPoint& x, const GeoPoint& y,
                                const EarthModel& earth) {
  const double mean_phi = deg_to_rad((x.lat + y.lat) / 2.0);
  const double u = deg_to_rad(y.lon - x.lon) * std::cos(mean_phi);
  const double v = deg_to_rad(y.lat - x.lat);
  return earth.radius_m * std::hypot(u, v);
}

std::array<double, 2> equirectangular_gradient(const GeoPoint& x,
                                               const GeoPoint& y,
                                               const EarthModel& earth) {
  const double mean_phi = deg_to_rad((x.lat + y.lat) / 2.0);
  const double dlon = deg_to_rad(y.lon - x.lon);
  const double cos_m = std::cos(mean_phi);
  const double u = dlon * cos_m;
  const double v = deg_to_rad(y.lat - x.lat);
  const double norm = std::hypot(u, v);
  if (norm == 0.0) return {0.0, 0.0};
  // d/dphi_y of u is -dlon * sin(mean_phi) / 2 since mean_phi moves at half
  // the rate of phi_y.
  const double du_dphi = -dlon * std::sin(mean_phi) / 2.0;
  const double scale = earth.radius_m / norm * deg_to_rad(1.0);
  return {scale * (u * du_dphi + v), scale * (u * cos_m)};
}

StandardizationStats guard_zero_variance(StandardizationStats stats) {
  if (!(stats.std_lat >= kMinStd)) stats.std_lat = 1.0;
  if (!(stats.std_lon >= kMinStd)) stats.std_lon = 1.0;
  return stats;
}

StandardizedPoint standardize(const GeoPoint& p,
                              const StandardizationStats& stats) {
  return {(p.lat - stats.mean_lat) / stats.std_lat,
          (p.lon - stats.mean_lon) / stats.std_lon};
}

GeoPoint unstandardize(const StandardizedPoint& s,
                       const StandardizationStats& stats) {
  return {s.lat * stats.std_lat + stats.mean_lat,
          s.lon * stats.std_lon + stats.mean_lon};
}

}  // namespace taxidest::geo
