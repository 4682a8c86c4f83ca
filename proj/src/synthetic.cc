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

#include "taxidest/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "taxidest/errors.h"
#include "taxidest/geo.h"

namespace taxidest::synthetic {
namespace {

using data::GeoPoint;

// Local planar frame around the city center, meters east/north.
struct Frame {
  double lat0;
  double lon0;
  double m_per_deg_lat;
  double m_per_deg_lon;

  GeoPoint to_geo(double east, double north) const {
    return {lat0 + north / m_per_deg_lat, lon0 + east / m_per_deg_lon};
  }
};

struct Xy {
  double east = 0.0;
  double north = 0.0;
};

}  // namespace

std::vector<data::TrainRecord> generate_city(const CityConfig& cfg) {
  if (cfg.hotspots == 0 || cfg.clients == 0 || cfg.taxis == 0 || cfg.stands == 0) {
    throw UsageError("synthetic city needs at least one hotspot, client, taxi and stand");
  }
  if (!(cfg.speed_m_per_sample > 0.0) || !(cfg.street_spacing_m > 0.0)) {
    throw UsageError("synthetic city speed and street spacing must be positive");
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const double m_per_deg_lat = geo::deg_to_rad(1.0) * geo::kEarth.radius_m;
  const Frame frame{cfg.center_lat, cfg.center_lon, m_per_deg_lat,
                    m_per_deg_lat * std::cos(geo::deg_to_rad(cfg.center_lat))};

  auto uniform_disc = [&](double radius) {
    const double r = radius * std::sqrt(unit(rng));
    const double a = 2.0 * std::numbers::pi * unit(rng);
    return Xy{r * std::cos(a), r * std::sin(a)};
  };

  // Hotspots with a minimum separation; give up on the constraint after
  // enough attempts so small cities still terminate.
  std::vector<Xy> hotspots;
  for (int attempt = 0; hotspots.size() < cfg.hotspots; ++attempt) {
    const Xy h = uniform_disc(cfg.city_radius_m * 0.8);
    bool ok = true;
    for (const auto& o : hotspots) {
      if (std::hypot(h.east - o.east, h.north - o.north) < cfg.min_hotspot_separation_m) ok = false;
    }
    if (ok || attempt > 10000) hotspots.push_back(h);
  }
  std::vector<Xy> stands;
  for (std::size_t i = 0; i < cfg.stands; ++i) stands.push_back(uniform_disc(cfg.city_radius_m * 0.6));

  std::uniform_int_distribution<std::size_t> pick_hotspot(0, cfg.hotspots - 1);
  std::vector<std::size_t> client_home(cfg.clients), stand_home(cfg.stands);
  for (auto& h : client_home) h = pick_hotspot(rng);
  for (auto& h : stand_home) h = pick_hotspot(rng);

  std::uniform_int_distribution<std::size_t> pick_client(0, cfg.clients - 1);
  std::uniform_int_distribution<std::size_t> pick_taxi(0, cfg.taxis - 1);
  std::uniform_int_distribution<std::size_t> pick_stand(0, cfg.stands - 1);
  std::uniform_int_distribution<std::int64_t> pick_time(0, std::max<std::int64_t>(cfg.span_seconds - 1, 0));

  auto snap = [&](double v) { return std::round(v / cfg.street_spacing_m) * cfg.street_spacing_m; };

  std::vector<data::TrainRecord> out;
  out.reserve(cfg.trips);
  for (std::size_t t = 0; t < cfg.trips; ++t) {
    data::TrainRecord r;
    r.trip_id = "T" + std::to_string(100000 + t);
    r.taxi_id = 20000000 + static_cast<std::int64_t>(pick_taxi(rng));
    r.timestamp = cfg.start_timestamp + pick_time(rng);

    const double u = unit(rng);
    Xy origin;
    std::size_t dest_hotspot = pick_hotspot(rng);
    if (u < 0.3) {
      r.call_type = data::CallType::kPhone;
      const std::size_t c = pick_client(rng);
      r.origin_call = 2000 + static_cast<std::int64_t>(c);
      if (unit(rng) < 0.7) dest_hotspot = client_home[c];
      origin = uniform_disc(cfg.city_radius_m);
    } else if (u < 0.7) {
      r.call_type = data::CallType::kStand;
      const std::size_t s = pick_stand(rng);
      r.origin_stand = 1 + static_cast<std::int64_t>(s);
      if (unit(rng) < 0.6) dest_hotspot = stand_home[s];
      origin = stands[s];
    } else {
      r.call_type = data::CallType::kStreet;
      origin = uniform_disc(cfg.city_radius_m);
    }
    // Morning rides drift towards the first hotspot.
    const int hour = static_cast<int>((r.timestamp % 86400) / 3600);
    if (hour >= 7 && hour < 10 && unit(rng) < 0.4) dest_hotspot = 0;

    const Xy dest{hotspots[dest_hotspot].east + cfg.hotspot_sigma_m * normal(rng),
                  hotspots[dest_hotspot].north + cfg.hotspot_sigma_m * normal(rng)};

    // Manhattan route: origin -> street corner -> along one axis -> along the
    // other -> destination, sampled at constant speed.
    const bool east_first = unit(rng) < 0.5;
    std::vector<Xy> corners{origin, {snap(origin.east), snap(origin.north)}};
    if (east_first) corners.push_back({snap(dest.east), snap(origin.north)});
    else corners.push_back({snap(origin.east), snap(dest.north)});
    corners.push_back({snap(dest.east), snap(dest.north)});
    corners.push_back(dest);

    std::vector<Xy> samples{origin};
    double carry = 0.0;
    for (std::size_t i = 1; i < corners.size(); ++i) {
      const Xy a = corners[i - 1], b = corners[i];
      const double len = std::hypot(b.east - a.east, b.north - a.north);
      double s = cfg.speed_m_per_sample - carry;
      while (s <= len) {
        const double f = s / len;
        samples.push_back({a.east + f * (b.east - a.east), a.north + f * (b.north - a.north)});
        s += cfg.speed_m_per_sample;
      }
      carry = len - (s - cfg.speed_m_per_sample);
    }
    for (const auto& p : samples) {
      r.polyline.push_back(frame.to_geo(p.east + cfg.gps_noise_m * normal(rng),
                                        p.north + cfg.gps_noise_m * normal(rng)));
    }
    r.polyline.push_back(frame.to_geo(dest.east, dest.north));
    r.missing_data = unit(rng) < cfg.missing_fraction;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace taxidest::synthetic
