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

// Acceptance checks. One PASS/FAIL line per criterion; exits nonzero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "model_fixtures.h"
#include "support.h"
#include "taxidest/cli/commands.h"
#include "taxidest/clustering.h"
#include "taxidest/data/prefix.h"
#include "taxidest/geo.h"
#include "taxidest/synthetic.h"
#include "taxidest/training/trainer.h"

namespace {

using namespace taxidest;
using geo::GeoPoint;
using models::ModelConfig;
using models::Variant;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

constexpr double kMetersPerDegree = 111194.92664455873734;

GeoPoint offset(GeoPoint c, double north_m, double east_m) {
  return {c.lat + north_m / kMetersPerDegree,
          c.lon + east_m / (kMetersPerDegree * std::cos(c.lat * M_PI / 180.0))};
}

Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string where;
  std::size_t checked = 0;
  for (auto v : testing::all_variants()) {
    const ModelConfig cfg = testing::tiny_config(v);
    const auto w = testing::tiny_world(cfg.uses_clusters() ? 4 : 0);
    nn::InitRng rng(3);
    auto model = models::build_model<double>(cfg, w.clusters, w.stats, w.vocab, rng);
    const auto batch = testing::tiny_batch(model, w, 3, 4);
    const auto cands = testing::tiny_candidates(model, w, 3);
    // Coordinates near 41 degrees limit finite differences to h ~ 1e-3;
    // gradients below 1e-3 m per unit are compared absolutely.
    const auto r = testing::check_gradients(
        model.parameters(), [&](nn::Tape<double>& t) { return testing::variant_loss(model, t, batch, cands); },
        1e-3, 1e-3);
    checked += r.checked;
    if (r.max_rel_error >= worst) {
      worst = r.max_rel_error;
      where = std::string(models::variant_name(v)) + " " + r.worst;
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-3 && secs < 60.0, std::to_string(checked) + " elements, max rel " + fmt("%.2e", worst) +
                                           " (" + where + "), " + fmt("%.2f", secs) + " s"};
}

Outcome geodesy() {
  std::mt19937_64 rng(20130701);
  std::uniform_real_distribution<double> radius(0.0, 1.0), angle(0.0, 2.0 * M_PI);
  const GeoPoint porto{41.15, -8.61};
  auto draw = [&] {
    const double r = 30000.0 * std::sqrt(radius(rng));
    const double a = angle(rng);
    return offset(porto, r * std::cos(a), r * std::sin(a));
  };
  double worst = 0.0;
  bool symmetric = true, identity = true, nonneg = true;
  for (int i = 0; i < 10000; ++i) {
    const GeoPoint x = draw(), y = draw();
    const double h = geo::haversine_distance(x, y), e = geo::equirectangular_distance(x, y);
    worst = std::max(worst, std::abs(h - e) / h);
    symmetric &= h == geo::haversine_distance(y, x) && e == geo::equirectangular_distance(y, x);
    identity &= geo::haversine_distance(x, x) == 0.0 && geo::equirectangular_distance(x, x) == 0.0;
    nonneg &= h >= 0.0 && e >= 0.0;
  }
  return {worst < 1e-3 && symmetric && identity && nonneg,
          "10000 pairs, max rel " + fmt("%.2e", worst) + (symmetric ? ", symmetric" : ", ASYMMETRIC") +
              (identity ? ", zero at identity" : ", NONZERO AT IDENTITY")};
}

// Random prefixes and metadata through models with exaggerated weights.
Outcome hull_invariant() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 12);
  std::size_t total = 0, outside_box = 0, outside_hull = 0;
  for (auto v : testing::all_variants()) {
    const ModelConfig cfg = testing::tiny_config(v);
    if (v == Variant::kMlpDirect) continue;
    const auto w = testing::tiny_world(cfg.uses_clusters() ? 4 : 0);
    nn::InitRng init(17);
    auto model = models::build_model<double>(cfg, w.clusters, w.stats, w.vocab, init);
    for (std::size_t i = 0; i < model.parameters().size(); ++i) {
      for (auto& x : model.parameters()[i].value.values()) x *= 8.0;
    }
    std::vector<GeoPoint> centers = w.clusters.centers;
    std::vector<data::PrefixExample> cands;
    if (v == Variant::kMemoryNet) {
      cands = testing::tiny_candidates(model, w, 4);
      centers.clear();
      for (const auto& c : cands) centers.push_back(c.target);
    }
    std::vector<data::PrefixExample> batch;
    for (int n = 0; n < 1000; ++n) {
      auto r = w.records[n % w.records.size()];
      r.polyline.clear();
      const int length = len(rng);
      for (int j = 0; j < length; ++j) r.polyline.push_back({41.15 + 0.03 * gauss(rng), -8.61 + 0.03 * gauss(rng)});
      r.timestamp = 1372636800 + static_cast<std::int64_t>(std::abs(gauss(rng)) * 2.0e7);
      r.taxi_id = 100 + n % 4;
      batch.push_back(model.make_example(r, static_cast<std::size_t>(length)));
    }
    std::vector<GeoPoint> pred;
    if (v == Variant::kMemoryNet) {
      nn::Tape<double> tape;
      const auto y = model.forward_memory(tape, batch, cands).value();
      for (std::size_t i = 0; i < y.rows(); ++i) pred.push_back({y(i, 0), y(i, 1)});
    } else {
      pred = model.predict(batch);
    }
    double lat_lo = 90, lat_hi = -90, lon_lo = 180, lon_hi = -180;
    for (const auto& c : centers) {
      lat_lo = std::min(lat_lo, c.lat), lat_hi = std::max(lat_hi, c.lat);
      lon_lo = std::min(lon_lo, c.lon), lon_hi = std::max(lon_hi, c.lon);
    }
    for (const auto& p : pred) {
      ++total;
      if (p.lat < lat_lo - 1e-12 || p.lat > lat_hi + 1e-12 || p.lon < lon_lo - 1e-12 || p.lon > lon_hi + 1e-12) {
        ++outside_box;
      }
      if (!testing::in_convex_hull(centers, p, 1e-12)) ++outside_hull;
    }
  }
  return {outside_box == 0 && outside_hull == 0,
          std::to_string(total) + " predictions over 7 variants, C = 4, " + std::to_string(outside_box) +
              " outside bounds, " + std::to_string(outside_hull) + " outside hull"};
}

Outcome prefix_distribution() {
  std::vector<data::TrainRecord> records;
  for (int len : {2, 3, 4, 5, 6}) {
    std::vector<GeoPoint> pts;
    for (int j = 0; j < len; ++j) pts.push_back({41.15 + 0.001 * j, -8.61});
    records.push_back(testing::make_record("R" + std::to_string(len), pts));
  }
  const data::PrefixSampler sampler(records);
  std::vector<std::size_t> offset_of{0};
  for (const auto& r : records) offset_of.push_back(offset_of.back() + r.polyline.size());
  const std::size_t cells = offset_of.back();
  std::vector<double> counts(cells, 0.0);
  data::Rng rng(2015);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const auto ref = sampler.sample(rng);
    counts[offset_of[ref.record] + ref.cut - 1] += 1.0;
  }
  const double expected = static_cast<double>(draws) / static_cast<double>(cells);
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // Upper 1% point of chi-square with 19 degrees of freedom.
  const double critical = 36.191;
  return {cells == 20 && chi2 < critical,
          std::to_string(cells) + " prefixes, 1e5 draws, chi2 " + fmt("%.2f", chi2) + " < " + fmt("%.3f", critical)};
}

Outcome mean_shift_recovery() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 100.0);
  const GeoPoint a{41.15, -8.61};
  const GeoPoint b = offset(a, 0.0, 5000.0);
  std::vector<GeoPoint> pts;
  GeoPoint mean_a{0, 0}, mean_b{0, 0};
  for (int i = 0; i < 1000; ++i) {
    const auto p = offset(a, g(rng), g(rng));
    pts.push_back(p);
    mean_a.lat += p.lat / 1000.0, mean_a.lon += p.lon / 1000.0;
  }
  for (int i = 0; i < 1000; ++i) {
    const auto p = offset(b, g(rng), g(rng));
    pts.push_back(p);
    mean_b.lat += p.lat / 1000.0, mean_b.lon += p.lon / 1000.0;
  }
  clustering::MeanShiftConfig cfg;
  cfg.bandwidth_m = 500.0;
  const auto t0 = Clock::now();
  const auto cs = clustering::mean_shift(pts, cfg);
  const double secs = seconds_since(t0);
  if (cs.size() != 2) return {false, std::to_string(cs.size()) + " centers"};
  auto nearest = [&](GeoPoint m) {
    return std::min(geo::haversine_distance(cs.centers[0], m), geo::haversine_distance(cs.centers[1], m));
  };
  const double da = nearest(mean_a), db = nearest(mean_b);
  return {da < 30.0 && db < 30.0 && secs < 10.0, "2 centers, " + fmt("%.2f", da) + " m and " + fmt("%.2f", db) +
                                                   " m from blob means, " + fmt("%.2f", secs) + " s"};
}

// Winning configuration, 50 rides used for training and validation.
Outcome overfit() {
  synthetic::CityConfig city;
  city.trips = 50;
  city.seed = 8;
  const auto records = synthetic::generate_city(city);
  std::vector<GeoPoint> dests;
  for (const auto& r : records) dests.push_back(r.destination());
  const auto clusters = clustering::mean_shift(dests, clustering::MeanShiftConfig{});
  const auto stats = data::fit_standardization(records);
  const auto vocab = data::build_vocab(records);
  nn::InitRng init(1);
  auto model = models::build_model<float>(ModelConfig{}, clusters, stats, vocab, init);

  std::vector<data::PrefixExample> every_prefix;
  for (const auto& r : records) {
    for (std::size_t cut = 1; cut <= r.polyline.size(); ++cut) every_prefix.push_back(model.make_example(r, cut));
  }
  auto training_loss_m = [&](models::DestinationModel<float>& m) {
    nn::Tape<float> tape;
    return static_cast<double>(
        training::loss_batch(m, tape, std::span<const data::PrefixExample>(every_prefix)).value()[0]);
  };
  data::Rng cut_rng(9);
  std::vector<data::PrefixExample> validation;
  for (const auto& ref : data::one_cut_per_record(records, cut_rng)) {
    validation.push_back(model.make_example(records[ref.record], ref.cut));
  }
  const double initial = training_loss_m(model);
  training::TrainConfig cfg;
  cfg.max_batches = 5000;
  cfg.validation_every = 500;
  cfg.patience = 10;
  cfg.seed = 4;
  const auto t0 = Clock::now();
  const auto report = training::train(model, std::span(records), validation, cfg);
  const double secs = seconds_since(t0);
  const double final = training_loss_m(model);
  const double ratio = final / initial;
  return {ratio < 0.2 && secs < 180.0,
          std::to_string(every_prefix.size()) + " prefixes, loss " + fmt("%.0f", initial) + " m -> " +
              fmt("%.0f", final) + " m (" + fmt("%.1f", 100.0 * ratio) + "%) after " +
              std::to_string(report.history.back().batches) + " batches, " + fmt("%.1f", secs) + " s"};
}

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  testing::TempDir dir("acceptance");
  const auto csv = dir / "city.csv";
  const auto t0 = Clock::now();
  auto call = [](std::vector<std::string> args, std::string* out = nullptr) {
    std::ostringstream o, e;
    const int code = cli::run(args, o, e);
    if (out) *out = o.str();
    if (code != 0) std::fprintf(stderr, "%s", e.str().c_str());
    return code == 0;
  };
  if (!call({"synth", "--out", csv.string(), "--trips", "200", "--seed", "1"})) return {false, "synth failed"};
  std::string evals[2], ckpts[2];
  for (int run = 0; run < 2; ++run) {
    const auto d = dir / ("run" + std::to_string(run));
    const auto data = (d / "data").string(), clusters = (d / "clusters.csv").string(),
               model = (d / "model.ckpt").string();
    const bool ok =
        call({"prepare", "--input", csv.string(), "--out", data, "--val", "20", "--test", "20", "--seed", "11"}) &&
        call({"cluster", "--data", data, "--out", clusters, "--threads", "1"}) &&
        call({"train", "--data", data, "--clusters", clusters, "--out", model, "--max-batches", "500",
              "--validate-every", "100", "--seed", "11", "--quiet"}) &&
        call({"evaluate", "--model", model, "--data", data}, &evals[run]);
    if (!ok) return {false, "pipeline run " + std::to_string(run) + " failed"};
    ckpts[run] = read_bytes(model);
  }
  const double secs = seconds_since(t0);
  std::string eval = evals[0];
  if (!eval.empty() && eval.back() == '\n') eval.pop_back();
  const bool same = !ckpts[0].empty() && ckpts[0] == ckpts[1] && evals[0] == evals[1];
  return {same, std::string(same ? "identical" : "DIFFERENT") + " checkpoints (" + std::to_string(ckpts[0].size()) +
                    " bytes) and evaluation (" + eval + " km), two runs in " + fmt("%.1f", secs) + " s"};
}

Outcome shape_audit() {
  const auto records = synthetic::generate_city({});
  std::vector<GeoPoint> dests;
  for (const auto& r : records) dests.push_back(r.destination());
  const auto clusters = clustering::mean_shift(dests, clustering::MeanShiftConfig{});
  const auto vocab = data::build_vocab(records);
  nn::InitRng init(1);
  const auto model = models::build_model<float>(ModelConfig{}, clusters, data::fit_standardization(records), vocab, init);
  const std::size_t c = clusters.size();
  std::size_t rows = 0;
  for (auto r : models::embedding_rows(vocab)) rows += r;
  const std::size_t expected = 80 * 500 + 500 + 500 * c + c + rows * 10;
  const std::size_t actual = model.parameters().scalar_count();
  return {actual == expected, "C = " + std::to_string(c) + ", embedding rows " + std::to_string(rows) + ", " +
                                  std::to_string(actual) + " parameters, closed form " + std::to_string(expected)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"gradient-correctness", gradient_correctness},
      {"geodesy", geodesy},
      {"hull-invariant", hull_invariant},
      {"prefix-distribution", prefix_distribution},
      {"mean-shift-mode-recovery", mean_shift_recovery},
      {"overfit-smoke", overfit},
      {"determinism", determinism},
      {"shape-audit", shape_audit},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
