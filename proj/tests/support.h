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

#ifndef TAXIDEST_TESTS_SUPPORT_H_
#define TAXIDEST_TESTS_SUPPORT_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "taxidest/clustering.h"
#include "taxidest/data/records.h"
#include "taxidest/nn/parameter.h"
#include "taxidest/nn/tape.h"

namespace taxidest::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("taxidest_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline data::TrainRecord make_record(std::string id, std::vector<geo::GeoPoint> points,
                                     std::int64_t timestamp = 1372636800) {
  data::TrainRecord r;
  r.trip_id = std::move(id);
  r.taxi_id = 20000001;
  r.timestamp = timestamp;
  r.polyline = std::move(points);
  return r;
}

// Result of comparing a tape gradient with central finite differences.
struct GradCheck {
  double max_rel_error = 0.0;
  std::string worst;  // "param[index]" of the worst element
  std::size_t checked = 0;
};

// |a - n| / max(|a|, |n|, floor), maximized over every element of every
// parameter. `loss` must rebuild the graph on the given tape each call.
inline GradCheck check_gradients(nn::ParameterSet<double>& params,
                                 const std::function<nn::Var<double>(nn::Tape<double>&)>& loss,
                                 double h = 1e-6, double floor = 1e-6) {
  params.zero_grad();
  {
    nn::Tape<double> tape;
    tape.backward(loss(tape));
  }
  auto eval = [&] {
    nn::Tape<double> tape;
    return loss(tape).value()[0];
  };
  GradCheck out;
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& param = params[p];
    for (std::size_t i = 0; i < param.value.size(); ++i) {
      const double saved = param.value[i];
      param.value[i] = saved + h;
      const double up = eval();
      param.value[i] = saved - h;
      const double down = eval();
      param.value[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = param.gradient[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
      const double rel = std::abs(analytic - numeric) / denom;
      ++out.checked;
      if (rel > out.max_rel_error) {
        out.max_rel_error = rel;
        out.worst = param.name + "[" + std::to_string(i) + "] analytic " + std::to_string(analytic) +
                    " numeric " + std::to_string(numeric);
      }
    }
  }
  params.zero_grad();
  return out;
}

// Exact 2-D convex hull membership by orientation tests against the hull of
// `pts` (Andrew's monotone chain). Points on the boundary count as inside
// within `eps`.
inline bool in_convex_hull(const std::vector<geo::GeoPoint>& pts, geo::GeoPoint q, double eps = 1e-12) {
  std::vector<geo::GeoPoint> p = pts;
  std::sort(p.begin(), p.end(), [](auto a, auto b) { return a.lat < b.lat || (a.lat == b.lat && a.lon < b.lon); });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  auto cross = [](geo::GeoPoint o, geo::GeoPoint a, geo::GeoPoint b) {
    return (a.lat - o.lat) * (b.lon - o.lon) - (a.lon - o.lon) * (b.lat - o.lat);
  };
  if (p.size() == 1) return std::abs(q.lat - p[0].lat) <= eps && std::abs(q.lon - p[0].lon) <= eps;
  std::vector<geo::GeoPoint> hull(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
    hull[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], p[i - 1]) <= 0) --k;
    hull[k++] = p[i - 1];
  }
  hull.resize(k - 1);
  if (hull.size() == 2) {
    // Degenerate hull: a segment.
    const auto a = hull[0], b = hull[1];
    if (std::abs(cross(a, b, q)) > eps) return false;
    return q.lat >= std::min(a.lat, b.lat) - eps && q.lat <= std::max(a.lat, b.lat) + eps &&
           q.lon >= std::min(a.lon, b.lon) - eps && q.lon <= std::max(a.lon, b.lon) + eps;
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    if (cross(hull[i], hull[(i + 1) % hull.size()], q) < -eps) return false;
  }
  return true;
}

}  // namespace taxidest::testing

#endif  // TAXIDEST_TESTS_SUPPORT_H_
