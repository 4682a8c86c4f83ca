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

#include "taxidest/clustering.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>

#include "taxidest/errors.h"

namespace taxidest::clustering {
namespace {

using geo::equirectangular_distance;

// Uniform lat/lon grid supporting "all points within r meters" queries under
// the equirectangular metric. Cells are r tall; their width is r at the
// reference latitude and queries widen the column span where needed.
class GridIndex {
 public:
  GridIndex(double radius_m, double reference_abs_lat)
      : radius_m_(radius_m),
        cell_lat_(geo::rad_to_deg(radius_m / geo::kEarth.radius_m)),
        cell_lon_(cell_lat_ / std::max(std::cos(geo::deg_to_rad(reference_abs_lat)), 1e-6)) {}

  void insert(const GeoPoint& p, std::uint32_t id) {
    cells_[key(row_of(p.lat), col_of(p.lon))].push_back(id);
  }

  // Calls fn(id) for every inserted id whose point is within radius_m of x.
  // Ids are visited in a deterministic order.
  template <typename Fn>
  void for_each_within(std::span<const GeoPoint> points, const GeoPoint& x, Fn&& fn) const {
    const double lat_lo = x.lat - cell_lat_;
    const double lat_hi = x.lat + cell_lat_;
    const double max_abs = std::min(89.999, std::max(std::abs(lat_lo), std::abs(lat_hi)));
    const double half_lon =
        geo::rad_to_deg(radius_m_ / geo::kEarth.radius_m) / std::cos(geo::deg_to_rad(max_abs));
    const std::int64_t r0 = row_of(lat_lo), r1 = row_of(lat_hi);
    const std::int64_t c0 = col_of(x.lon - half_lon), c1 = col_of(x.lon + half_lon);
    for (std::int64_t r = r0; r <= r1; ++r) {
      for (std::int64_t c = c0; c <= c1; ++c) {
        auto it = cells_.find(key(r, c));
        if (it == cells_.end()) continue;
        for (std::uint32_t id : it->second) {
          if (equirectangular_distance(x, points[id]) <= radius_m_) fn(id);
        }
      }
    }
  }

 private:
  std::int64_t row_of(double lat) const {
    return static_cast<std::int64_t>(std::floor(lat / cell_lat_));
  }
  std::int64_t col_of(double lon) const {
    return static_cast<std::int64_t>(std::floor(lon / cell_lon_));
  }
  static std::uint64_t key(std::int64_t r, std::int64_t c) {
    return (static_cast<std::uint64_t>(r) << 32) ^ (static_cast<std::uint64_t>(c) & 0xffffffffu);
  }

  double radius_m_;
  double cell_lat_;
  double cell_lon_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

double max_abs_lat(std::span<const GeoPoint> points) {
  double m = 0.0;
  for (const auto& p : points) m = std::max(m, std::abs(p.lat));
  return m;
}

GridIndex build_index(std::span<const GeoPoint> points, double radius_m) {
  GridIndex index(radius_m, max_abs_lat(points));
  for (std::size_t i = 0; i < points.size(); ++i) {
    index.insert(points[i], static_cast<std::uint32_t>(i));
  }
  return index;
}

GeoPoint iterate(std::span<const GeoPoint> points, const GridIndex& index, GeoPoint x,
                 const MeanShiftConfig& cfg) {
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    double sum_lat = 0.0, sum_lon = 0.0;
    std::size_t count = 0;
    index.for_each_within(points, x, [&](std::uint32_t id) {
      sum_lat += points[id].lat;
      sum_lon += points[id].lon;
      ++count;
    });
    if (count == 0) break;
    const GeoPoint next{sum_lat / static_cast<double>(count), sum_lon / static_cast<double>(count)};
    const double shift = equirectangular_distance(x, next);
    x = next;
    if (shift < cfg.convergence_tol_m) break;
  }
  return x;
}

struct Mode {
  GeoPoint point;
  std::size_t first_seed = 0;
  double weight = 0.0;
  double basin = 0.0;
};

}  // namespace

void MeanShiftConfig::validate() const {
  if (!(bandwidth_m > 0.0)) throw UsageError("bandwidth must be positive");
  if (!(convergence_tol_m > 0.0)) throw UsageError("convergence tolerance must be positive");
  if (max_iterations == 0) throw UsageError("max_iterations must be positive");
  if (!(merge_radius_m > 0.0)) throw UsageError("merge radius must be positive");
  if (merge_radius_m > bandwidth_m) throw UsageError("merge radius must not exceed bandwidth");
  if (seed_subsample && *seed_subsample == 0) throw UsageError("seed subsample must be positive");
}

GeoPoint shift_to_mode(std::span<const GeoPoint> points, GeoPoint start,
                       const MeanShiftConfig& cfg) {
  cfg.validate();
  if (points.empty()) throw PreconditionError("mean-shift needs at least one point");
  const GridIndex index = build_index(points, cfg.bandwidth_m);
  return iterate(points, index, start, cfg);
}

ClusterSet mean_shift(std::span<const GeoPoint> points, const MeanShiftConfig& cfg) {
  cfg.validate();
  if (points.empty()) throw PreconditionError("mean-shift needs at least one point");
  if (points.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw PreconditionError("too many points for mean-shift");
  }
  const GridIndex index = build_index(points, cfg.bandwidth_m);

  std::vector<std::size_t> seeds(points.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i;
  if (cfg.seed_subsample && *cfg.seed_subsample < seeds.size()) {
    std::vector<std::size_t> chosen;
    std::mt19937_64 rng(cfg.seed);
    std::sample(seeds.begin(), seeds.end(), std::back_inserter(chosen), *cfg.seed_subsample, rng);
    seeds = std::move(chosen);
  }

  // Seeds are independent; each worker writes only its own slots.
  std::vector<GeoPoint> modes(seeds.size());
  std::size_t workers = cfg.threads == 0 ? std::thread::hardware_concurrency() : cfg.threads;
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(seeds.size(), 1));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      modes[i] = iterate(points, index, points[seeds[i]], cfg);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  // Collapse modes that landed in the same tolerance-sized cell.
  const double q_lat = geo::rad_to_deg(cfg.convergence_tol_m / geo::kEarth.radius_m);
  const double q_lon = q_lat / std::max(std::cos(geo::deg_to_rad(max_abs_lat(modes))), 1e-6);
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> cell_of;
  std::vector<Mode> uniques;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::pair<std::int64_t, std::int64_t> cell{
        static_cast<std::int64_t>(std::floor(modes[i].lat / q_lat)),
        static_cast<std::int64_t>(std::floor(modes[i].lon / q_lon))};
    auto [it, inserted] = cell_of.emplace(cell, uniques.size());
    if (inserted) uniques.push_back({modes[i], i, 0.0, 0.0});
    uniques[it->second].weight += 1.0;
  }

  // Basin count: seeds whose mode lies within the merge radius.
  std::vector<GeoPoint> unique_points;
  unique_points.reserve(uniques.size());
  for (const auto& u : uniques) unique_points.push_back(u.point);
  const GridIndex unique_index = build_index(unique_points, cfg.merge_radius_m);
  for (auto& u : uniques) {
    unique_index.for_each_within(unique_points, u.point,
                                 [&](std::uint32_t id) { u.basin += uniques[id].weight; });
  }

  std::vector<std::size_t> order(uniques.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (uniques[a].basin != uniques[b].basin) return uniques[a].basin > uniques[b].basin;
    return uniques[a].first_seed < uniques[b].first_seed;
  });

  ClusterSet out;
  GridIndex kept(cfg.merge_radius_m, max_abs_lat(unique_points));
  for (std::size_t idx : order) {
    const GeoPoint& candidate = uniques[idx].point;
    bool suppressed = false;
    kept.for_each_within(out.centers, candidate, [&](std::uint32_t id) {
      if (equirectangular_distance(candidate, out.centers[id]) < cfg.merge_radius_m) {
        suppressed = true;
      }
    });
    if (suppressed) continue;
    kept.insert(candidate, static_cast<std::uint32_t>(out.centers.size()));
    out.centers.push_back(candidate);
  }
  return out;
}

void save_clusters(const ClusterSet& clusters, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "lat,lon\n";
  char buf[64];
  for (const auto& c : clusters.centers) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", c.lat, c.lon);
    out << buf;
  }
  if (!out) throw IoError("failed writing " + path.string());
}

ClusterSet load_clusters(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open cluster file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty cluster file " + path.string(), 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "lat,lon") throw DataError("cluster file header must be 'lat,lon'", 1, 1);

  ClusterSet out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError("expected 'lat,lon'", row, 1);
    GeoPoint p;
    const char* end = line.data() + line.size();
    auto r1 = std::from_chars(line.data(), line.data() + comma, p.lat);
    if (r1.ec != std::errc() || r1.ptr != line.data() + comma) {
      throw DataError("invalid latitude", row, 1);
    }
    auto r2 = std::from_chars(line.data() + comma + 1, end, p.lon);
    if (r2.ec != std::errc() || r2.ptr != end) throw DataError("invalid longitude", row, 2);
    if (!(p.lat >= -90.0 && p.lat <= 90.0) || !(p.lon >= -180.0 && p.lon <= 180.0)) {
      throw DataError("coordinate out of range", row);
    }
    out.centers.push_back(p);
  }
  if (out.centers.empty()) throw DataError("cluster file has no centers: " + path.string());
  return out;
}

}  // namespace taxidest::clustering
