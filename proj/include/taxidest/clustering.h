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

#ifndef TAXIDEST_CLUSTERING_H_
#define TAXIDEST_CLUSTERING_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "taxidest/geo.h"

namespace taxidest::clustering {

using geo::GeoPoint;

// Fixed destination cluster centers used by the centroid output layer.
struct ClusterSet {
  std::vector<GeoPoint> centers;

  std::size_t size() const { return centers.size(); }
  friend bool operator==(const ClusterSet&, const ClusterSet&) = default;
};

struct MeanShiftConfig {
  double bandwidth_m = 500.0;
  double convergence_tol_m = 1.0;
  std::size_t max_iterations = 100;
  double merge_radius_m = 250.0;
  // When set, only this many seeds, drawn uniformly without replacement, are
  // iterated. Every point still contributes to the density.
  std::optional<std::size_t> seed_subsample;
  std::uint64_t seed = 0;
  // Worker threads for the seed iterations. 0 = hardware concurrency. The
  // result does not depend on this value.
  std::size_t threads = 1;

  // Throws UsageError when a field is out of range.
  void validate() const;
};

// Flat-kernel mean-shift under the equirectangular metric. Every seed moves
// to the mean of the input points within bandwidth_m until it shifts less
// than convergence_tol_m. Modes closer than merge_radius_m are merged,
// keeping the one that more seeds converged to.
ClusterSet mean_shift(std::span<const GeoPoint> points, const MeanShiftConfig& cfg);

// Runs the shift iteration from `start` and returns where it stops.
GeoPoint shift_to_mode(std::span<const GeoPoint> points, GeoPoint start,
                       const MeanShiftConfig& cfg);

// CSV with header "lat,lon", one center per row, 17 significant digits.
void save_clusters(const ClusterSet& clusters, const std::filesystem::path& path);
ClusterSet load_clusters(const std::filesystem::path& path);

}  // namespace taxidest::clustering

#endif  // TAXIDEST_CLUSTERING_H_
