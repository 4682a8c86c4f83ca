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
#include <random>

#include <gtest/gtest.h>

namespace taxidest::geo {
namespace {

// Central angle by the spherical law of cosines in extended precision.
double law_of_cosines_m(GeoPoint x, GeoPoint y) {
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double d = pi / 180.0L;
  const long double p1 = x.lat * d, p2 = y.lat * d, dl = (y.lon - x.lon) * d;
  const long double c = std::sin(p1) * std::sin(p2) + std::cos(p1) * std::cos(p2) * std::cos(dl);
  return static_cast<double>(6371000.0L * std::acos(std::min(1.0L, c)));
}

GeoPoint random_porto_point(std::mt19937_64& rng, double radius_m = 30000.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double m_per_deg = deg_to_rad(1.0) * kEarth.radius_m;
  for (;;) {
    const double e = u(rng) * radius_m, n = u(rng) * radius_m;
    if (std::hypot(e, n) > radius_m) continue;
    return {41.15 + n / m_per_deg, -8.61 + e / (m_per_deg * std::cos(deg_to_rad(41.15)))};
  }
}

TEST(Haversine, ZeroAtIdentity) {
  const GeoPoint p{41.1496, -8.6110};
  EXPECT_EQ(haversine_distance(p, p), 0.0);
}

TEST(Haversine, EquatorialDegreeMatchesOracle) {
  // R * pi / 180, frozen from a 40-digit evaluation.
  const double expected = 111194.92664455873734;
  EXPECT_NEAR(haversine_distance({0, 0}, {0, 1}), expected, 1e-6);
  EXPECT_NEAR(haversine_distance({0, 0}, {0, 1}), law_of_cosines_m({0, 0}, {0, 1}), 1e-6);
}

TEST(Haversine, LongPairsMatchLawOfCosines) {
  EXPECT_NEAR(haversine_distance({41.1496, -8.6110}, {48.8566, 2.3522}), 1213159.7834706274, 1e-5);
  EXPECT_NEAR(haversine_distance({41.15, -8.61}, {41.16, -8.59}), 2010.0236716686014, 1e-7);
}

TEST(Haversine, AntipodesAreHalfCircumference) {
  EXPECT_NEAR(haversine_distance({0, 0}, {0, 180}), std::numbers::pi * kEarth.radius_m, 1e-6);
}

TEST(Haversine, SymmetricBitExactOnPortoPairs) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto x = random_porto_point(rng), y = random_porto_point(rng);
    EXPECT_EQ(haversine_distance(x, y), haversine_distance(y, x));
  }
}

TEST(Equirectangular, ZeroAtIdentity) {
  const GeoPoint p{41.15, -8.61};
  EXPECT_EQ(equirectangular_distance(p, p), 0.0);
}

TEST(Equirectangular, SingleAxisClosedForm) {
  // R * (0.01 pi / 180) * cos(41.15 deg), frozen from a 40-digit evaluation.
  EXPECT_NEAR(equirectangular_distance({41.15, -8.61}, {41.15, -8.60}), 837.28605246456533, 1e-8);
}

TEST(Equirectangular, UsesMeanLatitude) {
  const GeoPoint x{41.0, -8.6}, y{41.2, -8.5};
  const double mean = deg_to_rad(41.1);
  const double expected = kEarth.radius_m * std::hypot(deg_to_rad(0.1) * std::cos(mean), deg_to_rad(0.2));
  EXPECT_NEAR(equirectangular_distance(x, y), expected, 1e-9);
}

TEST(Equirectangular, AgreesWithHaversineNearPorto) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto x = random_porto_point(rng), y = random_porto_point(rng);
    const double h = haversine_distance(x, y);
    if (h == 0.0) continue;
    EXPECT_LT(std::abs(equirectangular_distance(x, y) - h) / h, 1e-3);
  }
}

TEST(Distances, SymmetricNonNegativeProperty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lat(-89.0, 89.0), lon(-180.0, 180.0);
  for (int i = 0; i < 10000; ++i) {
    const GeoPoint x{lat(rng), lon(rng)}, y{lat(rng), lon(rng)};
    const double h = haversine_distance(x, y), e = equirectangular_distance(x, y);
    ASSERT_GE(h, 0.0);
    ASSERT_GE(e, 0.0);
    ASSERT_EQ(h, haversine_distance(y, x));
    ASSERT_EQ(e, equirectangular_distance(y, x));
    ASSERT_EQ(haversine_distance(x, x), 0.0);
    ASSERT_EQ(equirectangular_distance(y, y), 0.0);
  }
}

TEST(Equirectangular, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const auto x = random_porto_point(rng), y = random_porto_point(rng);
    ASSERT_FALSE(x == y);
    const auto g = equirectangular_gradient(x, y);
    const double d_lat = (equirectangular_distance(x, {y.lat + h, y.lon}) -
                          equirectangular_distance(x, {y.lat - h, y.lon})) / (2 * h);
    const double d_lon = (equirectangular_distance(x, {y.lat, y.lon + h}) -
                          equirectangular_distance(x, {y.lat, y.lon - h})) / (2 * h);
    EXPECT_LT(std::abs(g[0] - d_lat) / std::max(std::abs(d_lat), 1.0), 1e-4);
    EXPECT_LT(std::abs(g[1] - d_lon) / std::max(std::abs(d_lon), 1.0), 1e-4);
  }
}

TEST(Equirectangular, GradientZeroAtIdentity) {
  const auto g = equirectangular_gradient({41.15, -8.61}, {41.15, -8.61});
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 0.0);
}

TEST(Standardize, MeanMapsToOrigin) {
  const StandardizationStats s{41.0, -8.0, 2.0, 0.5};
  const auto z = standardize({41.0, -8.0}, s);
  EXPECT_EQ(z.lat, 0.0);
  EXPECT_EQ(z.lon, 0.0);
  const auto p = unstandardize({0.0, 0.0}, s);
  EXPECT_EQ(p, (GeoPoint{41.0, -8.0}));
}

TEST(Standardize, HandComputedInverse) {
  const StandardizationStats s{41.0, -8.0, 2.0, 0.5};
  EXPECT_EQ(unstandardize({1.0, 1.0}, s), (GeoPoint{43.0, -7.5}));
}

TEST(Standardize, RoundTripWithin1e9) {
  std::mt19937_64 rng(5);
  const StandardizationStats s{41.16, -8.62, 0.031, 0.047};
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_porto_point(rng);
    const auto q = unstandardize(standardize(p, s), s);
    EXPECT_NEAR(q.lat, p.lat, 1e-9);
    EXPECT_NEAR(q.lon, p.lon, 1e-9);
  }
}

TEST(Standardize, ZeroVarianceGuard) {
  const auto g = guard_zero_variance({42.0, -8.0, 1.0, 0.0});
  EXPECT_EQ(g.std_lat, 1.0);
  EXPECT_EQ(g.std_lon, 1.0);
  EXPECT_EQ(guard_zero_variance({0, 0, 1e-13, 0.3}).std_lat, 1.0);
  EXPECT_EQ(guard_zero_variance({0, 0, 1e-13, 0.3}).std_lon, 0.3);
  // Fitted on {(41,-8),(43,-8)}: std_lat 1, std_lon guarded to 1.
  const auto z = standardize({41.0, -8.0}, g);
  EXPECT_EQ(z.lat, -1.0);
  EXPECT_EQ(z.lon, 0.0);
}

}  // namespace
}  // namespace taxidest::geo
