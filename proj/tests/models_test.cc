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

#include "taxidest/models/model.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "model_fixtures.h"
#include "support.h"
#include "taxidest/errors.h"

namespace taxidest::models {
namespace {

using taxidest::testing::all_variants;
using taxidest::testing::check_gradients;
using taxidest::testing::tiny_batch;
using taxidest::testing::tiny_candidates;
using taxidest::testing::tiny_config;
using taxidest::testing::tiny_world;
using taxidest::testing::TinyWorld;
using ModelD = DestinationModel<double>;

ModelD make(const ModelConfig& cfg, const TinyWorld& w, std::uint64_t seed = 1) {
  nn::InitRng rng(seed);
  return build_model<double>(cfg, w.clusters, w.stats, w.vocab, rng);
}

TEST(Config, VariantNamesRoundTrip) {
  for (auto v : all_variants()) EXPECT_EQ(parse_variant(variant_name(v)), v);
  try {
    parse_variant("transformer");
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    const std::string msg = e.what();
    for (auto v : all_variants()) EXPECT_NE(msg.find(variant_name(v)), std::string::npos);
  }
}

TEST(Config, JsonRoundTripAndValidation) {
  ModelConfig c = tiny_config(Variant::kBrnnWindow);
  c.cluster_count = 4;
  EXPECT_EQ(ModelConfig::from_json(c.to_json()), c);
  EXPECT_THROW(ModelConfig::from_json("{}"), Error);
  EXPECT_THROW(ModelConfig::from_json("not json"), Error);
  ModelConfig bad = c;
  bad.k = 0;
  EXPECT_THROW(bad.validate(), UsageError);
  bad = c;
  bad.cluster_count = 0;
  EXPECT_THROW(bad.validate(), UsageError);
  bad = c;
  bad.window = 0;
  EXPECT_THROW(bad.validate(), UsageError);
  ModelConfig direct = tiny_config(Variant::kMlpDirect);
  EXPECT_NO_THROW(direct.validate());
}

TEST(Shapes, WinningConfiguration) {
  const auto w = tiny_world(4);
  ModelConfig cfg;
  const auto m = make(cfg, w);
  const auto& p = m.parameters();
  EXPECT_EQ(p.at("hidden/weights").value.shape(), (std::array<std::size_t, 2>{80, 500}));
  EXPECT_EQ(p.at("hidden/bias").value.shape(), (std::array<std::size_t, 2>{1, 500}));
  EXPECT_EQ(p.at("output/weights").value.shape(), (std::array<std::size_t, 2>{500, 4}));
  EXPECT_EQ(p.at("output/bias").value.shape(), (std::array<std::size_t, 2>{1, 4}));
  EXPECT_EQ(p.at("emb/quarter_hour").value.shape(), (std::array<std::size_t, 2>{96, 10}));
  EXPECT_EQ(p.at("emb/day_of_week").value.shape(), (std::array<std::size_t, 2>{7, 10}));
  EXPECT_EQ(p.at("emb/week_of_year").value.shape(), (std::array<std::size_t, 2>{52, 10}));
  EXPECT_EQ(p.at("emb/client").value.rows(), w.vocab.clients.size());
  EXPECT_EQ(p.at("emb/taxi").value.rows(), w.vocab.taxis.size());
  EXPECT_EQ(p.at("emb/stand").value.rows(), w.vocab.stands.size());

  const std::size_t c = 4;
  std::size_t emb = 0;
  for (auto rows : embedding_rows(w.vocab)) emb += rows * 10;
  EXPECT_EQ(p.scalar_count(), 80 * 500 + 500 + 500 * c + c + emb);
}

TEST(Shapes, Ablations) {
  const auto w = tiny_world(3);
  ModelConfig no_embed;
  no_embed.variant = Variant::kMlpNoEmbed;
  const auto a = make(no_embed, w);
  EXPECT_EQ(a.parameters().at("hidden/weights").value.rows(), 20u);
  EXPECT_EQ(a.parameters().find("emb/client"), nullptr);

  ModelConfig embed_only;
  embed_only.variant = Variant::kMlpEmbedOnly;
  EXPECT_EQ(make(embed_only, w).parameters().at("hidden/weights").value.rows(), 60u);

  ModelConfig direct;
  direct.variant = Variant::kMlpDirect;
  const auto d = make(direct, TinyWorld{w.records, w.stats, w.vocab, {}});
  EXPECT_EQ(d.parameters().at("output/weights").value.shape(), (std::array<std::size_t, 2>{500, 2}));
  EXPECT_EQ(d.parameters().at("output/bias").value.shape(), (std::array<std::size_t, 2>{1, 2}));
  EXPECT_EQ(d.config().cluster_count, 0u);
  EXPECT_TRUE(d.clusters().centers.empty());

  ModelConfig window;
  window.variant = Variant::kBrnnWindow;
  const auto bw = make(window, w);
  EXPECT_EQ(bw.parameters().at("lstm_fwd/input_weights").value.shape(), (std::array<std::size_t, 2>{10, 2000}));
  EXPECT_EQ(bw.parameters().at("hidden/weights").value.rows(), 2 * 500u + 60u);
  const auto& bias = bw.parameters().at("lstm_bwd/bias").value;
  EXPECT_EQ(bias[0], 0.0);
  EXPECT_EQ(bias[500], 1.0);
  EXPECT_EQ(bias[999], 1.0);
  EXPECT_EQ(bias[1000], 0.0);

  ModelConfig memory;
  memory.variant = Variant::kMemoryNet;
  const auto mn = make(memory, w);
  EXPECT_EQ(mn.parameters().at("prefix_encoder/weights").value.shape(), (std::array<std::size_t, 2>{80, 500}));
  EXPECT_EQ(mn.parameters().at("candidate_encoder/weights").value.shape(), (std::array<std::size_t, 2>{80, 500}));
  EXPECT_EQ(mn.parameters().find("output/weights"), nullptr);
}

TEST(Shapes, ClusterVariantNeedsClusters) {
  const auto w = tiny_world(0);
  EXPECT_THROW(make(ModelConfig{}, w), UsageError);
}

TEST(Build, SameSeedBitIdentical) {
  const auto w = tiny_world(4);
  for (auto v : all_variants()) {
    const auto a = make(tiny_config(v), w, 5), b = make(tiny_config(v), w, 5), c = make(tiny_config(v), w, 6);
    ASSERT_EQ(a.parameters().size(), b.parameters().size());
    bool differs = false;
    for (std::size_t i = 0; i < a.parameters().size(); ++i) {
      EXPECT_EQ(a.parameters()[i].value, b.parameters()[i].value) << variant_name(v);
      differs |= !(a.parameters()[i].value == c.parameters()[i].value);
    }
    EXPECT_TRUE(differs) << variant_name(v);
  }
}

// Predictions live near 41 degrees, so a step much below 1e-3 drowns in
// rounding of the coordinates. Gradients under 1e-3 m per unit are compared
// in absolute terms.
TEST(Gradients, EveryVariantMatchesFiniteDifferences) {
  const auto w = tiny_world(4);
  for (auto v : all_variants()) {
    auto model = make(tiny_config(v), w, 3);
    const auto batch = tiny_batch(model, w, 3);
    const auto cands = tiny_candidates(model, w, 3);
    const auto r = check_gradients(model.parameters(), [&](nn::Tape<double>& t) {
      return taxidest::testing::variant_loss(model, t, batch, cands);
    }, 1e-3, 1e-3);
    EXPECT_LT(r.max_rel_error, 1e-3) << variant_name(v) << ": " << r.worst;
  }
}

TEST(Hull, CentroidVariantsStayInsideClusterHull) {
  const auto w = tiny_world(4);
  std::vector<geo::GeoPoint> centers = w.clusters.centers;
  for (auto v : all_variants()) {
    ModelConfig cfg = tiny_config(v);
    if (!cfg.uses_clusters()) continue;
    auto model = make(cfg, w, 9);
    // Exaggerate weights so the softmax saturates towards the corners.
    for (std::size_t i = 0; i < model.parameters().size(); ++i) {
      for (auto& x : model.parameters()[i].value.values()) x *= 20.0;
    }
    const auto batch = tiny_batch(model, w, 16, 6);
    const auto pred = model.predict(batch);
    for (const auto& p : pred) {
      EXPECT_TRUE(taxidest::testing::in_convex_hull(centers, p, 1e-12)) << variant_name(v);
    }
  }
}

TEST(Rnn, SinglePointPrefixAndDeterminism) {
  const auto w = tiny_world(3);
  auto model = make(tiny_config(Variant::kRnn), w);
  std::vector<data::PrefixExample> batch{model.make_example(w.records[0], 1)};
  const auto a = model.predict(batch);
  const auto b = model.predict(batch);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(taxidest::testing::in_convex_hull(w.clusters.centers, a[0], 1e-12));
  batch[0].full_prefix.clear();
  nn::Tape<double> tape;
  EXPECT_THROW(model.forward(tape, batch), PreconditionError);
}

TEST(Rnn, BucketingPreservesBatchOrder) {
  const auto w = tiny_world(3);
  for (auto v : {Variant::kRnn, Variant::kBrnn, Variant::kBrnnWindow}) {
    auto model = make(tiny_config(v), w);
    const auto batch = tiny_batch(model, w, 9, 6);
    const auto together = model.predict(batch);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto alone = model.predict(std::span(batch).subspan(i, 1));
      EXPECT_NEAR(alone[0].lat, together[i].lat, 1e-12);
      EXPECT_NEAR(alone[0].lon, together[i].lon, 1e-12);
    }
  }
}

TEST(Brnn, PalindromeWithTiedEncodersGivesEqualStates) {
  const auto w = tiny_world(3);
  auto model = make(tiny_config(Variant::kBrnn), w);
  auto& p = model.parameters();
  for (const char* name : {"input_weights", "hidden_weights", "bias"}) {
    p.at(std::string("lstm_bwd/") + name).value = p.at(std::string("lstm_fwd/") + name).value;
  }
  auto r = w.records[0];
  r.polyline = {{41.15, -8.61}, {41.16, -8.60}, {41.17, -8.62}, {41.16, -8.60}, {41.15, -8.61}};
  const std::vector<data::PrefixExample> batch{model.make_example(r, 5)};
  const auto before = model.predict(batch);
  // If h_fwd == h_bwd, swapping the head rows that read them changes nothing.
  auto& hw = p.at("hidden/weights").value;
  const std::size_t h = model.config().rnn_hidden;
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t c = 0; c < hw.cols(); ++c) std::swap(hw(i, c), hw(h + i, c));
  }
  const auto after = model.predict(batch);
  EXPECT_NEAR(before[0].lat, after[0].lat, 1e-13);
  EXPECT_NEAR(before[0].lon, after[0].lon, 1e-13);
}

TEST(BrnnWindow, WindowOneEqualsBrnn) {
  const auto w = tiny_world(3);
  ModelConfig cw = tiny_config(Variant::kBrnnWindow);
  cw.window = 1;
  auto windowed = make(cw, w, 4);
  auto plain = make(tiny_config(Variant::kBrnn), w, 8);
  ASSERT_EQ(windowed.parameters().size(), plain.parameters().size());
  for (std::size_t i = 0; i < plain.parameters().size(); ++i) {
    auto& dst = windowed.parameters().at(plain.parameters()[i].name);
    ASSERT_EQ(dst.value.shape(), plain.parameters()[i].value.shape());
    dst.value = plain.parameters()[i].value;
  }
  const auto batch = tiny_batch(plain, w, 8, 6);
  EXPECT_EQ(windowed.predict(batch), plain.predict(batch));
}

// Step-by-step recomputation of the windowed BRNN from its definition.
TEST(BrnnWindow, SevenPointPrefixTakesSevenWideSteps) {
  const auto w = tiny_world(3);
  ModelConfig cfg = tiny_config(Variant::kBrnnWindow);
  cfg.window = 5;
  auto model = make(cfg, w, 2);
  auto r = w.records[0];
  r.polyline.clear();
  for (int i = 0; i < 9; ++i) r.polyline.push_back({41.14 + 0.003 * i, -8.62 + 0.002 * (i % 3)});
  const auto ex = model.make_example(r, 7);
  ASSERT_EQ(ex.full_prefix.size(), 7u);
  EXPECT_EQ(model.parameters().at("lstm_fwd/input_weights").value.rows(), 10u);

  auto& params = model.parameters();
  auto lstm = [&](const std::string& pre) {
    return nn::LstmParams<double>{&params.at(pre + "/input_weights"), &params.at(pre + "/hidden_weights"),
                                  &params.at(pre + "/bias")};
  };
  nn::Tape<double> tape;
  auto window_at = [&](std::size_t t) {
    nn::Tensor<double> x(1, 10);
    for (std::size_t j = 0; j < 5; ++j) {
      const long src = static_cast<long>(t) - 4 + static_cast<long>(j);
      const auto s = geo::standardize(ex.full_prefix[src < 0 ? 0 : src], w.stats);
      x(0, 2 * j) = s.lat;
      x(0, 2 * j + 1) = s.lon;
    }
    return tape.constant(x);
  };
  const std::size_t h = cfg.rnn_hidden;
  auto run = [&](const std::string& pre, bool reverse) {
    auto hs = tape.constant(nn::Tensor<double>(1, h));
    auto cs = tape.constant(nn::Tensor<double>(1, h));
    int steps = 0;
    for (std::size_t s = 0; s < 7; ++s, ++steps) std::tie(hs, cs) = nn::lstm_cell(window_at(reverse ? 6 - s : s), hs, cs, lstm(pre));
    EXPECT_EQ(steps, 7);
    return hs;
  };
  auto fwd = run("lstm_fwd", false);
  auto bwd = run("lstm_bwd", true);
  std::vector<nn::Var<double>> parts{fwd, bwd};
  const std::array<std::int32_t, 6> idx{ex.client_idx, ex.taxi_idx, ex.stand_idx,
                                        ex.time.quarter_hour, ex.time.day_of_week, ex.time.week_of_year};
  for (std::size_t i = 0; i < kMetadataCount; ++i) {
    parts.push_back(nn::embedding_lookup(tape, params.at("emb/" + std::string(kMetadataNames[i])),
                                         std::span<const std::int32_t>(&idx[i], 1)));
  }
  auto hidden = nn::relu(nn::dense(nn::concat_cols(parts), tape.parameter(params.at("hidden/weights")),
                                   tape.parameter(params.at("hidden/bias"))));
  auto logits = nn::dense(hidden, tape.parameter(params.at("output/weights")), tape.parameter(params.at("output/bias")));
  nn::Tensor<double> centers(3, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    centers(i, 0) = w.clusters.centers[i].lat;
    centers(i, 1) = w.clusters.centers[i].lon;
  }
  const auto expected = nn::weighted_centroid(nn::softmax(logits), centers).value();
  const auto got = model.predict(std::vector<data::PrefixExample>{ex});
  EXPECT_NEAR(got[0].lat, expected(0, 0), 1e-13);
  EXPECT_NEAR(got[0].lon, expected(0, 1), 1e-13);
}

class MemoryTest : public ::testing::Test {
 protected:
  TinyWorld w_ = tiny_world(0);
  ModelD model_ = make(tiny_config(Variant::kMemoryNet), w_);

  geo::GeoPoint run(const std::vector<data::PrefixExample>& batch, const std::vector<data::PrefixExample>& cands) {
    nn::Tape<double> tape;
    const auto y = model_.forward_memory(tape, batch, cands).value();
    return {y(0, 0), y(0, 1)};
  }
};

TEST_F(MemoryTest, SingleCandidateReturnsItsDestination) {
  const auto batch = tiny_batch(model_, w_, 1);
  auto cands = tiny_candidates(model_, w_, 1);
  cands[0].target = {41.3, -8.4};
  const auto y = run(batch, cands);
  EXPECT_DOUBLE_EQ(y.lat, 41.3);
  EXPECT_DOUBLE_EQ(y.lon, -8.4);
}

TEST_F(MemoryTest, EqualRepresentationsGiveMidpoint) {
  const auto batch = tiny_batch(model_, w_, 1);
  auto cands = tiny_candidates(model_, w_, 1);
  cands.push_back(cands[0]);
  cands[0].target = {41.0, -8.0};
  cands[1].target = {43.0, -6.0};
  const auto y = run(batch, cands);
  EXPECT_NEAR(y.lat, 42.0, 1e-12);
  EXPECT_NEAR(y.lon, -7.0, 1e-12);
}

TEST_F(MemoryTest, SoftmaxOverLogSimilarities) {
  nn::Tape<double> tape;
  const auto s = tape.constant(nn::Tensor<double>(1, 2, {std::log(3.0), std::log(1.0)}));
  const auto y = nn::weighted_centroid(nn::softmax(s), nn::Tensor<double>(2, 2, {41, -8, 43, -6})).value();
  EXPECT_NEAR(y[0], 41.5, 1e-12);
  EXPECT_NEAR(y[1], -7.5, 1e-12);
}

TEST_F(MemoryTest, CandidateOrderDoesNotMatter) {
  const auto batch = tiny_batch(model_, w_, 4);
  auto cands = tiny_candidates(model_, w_, 5);
  nn::Tape<double> t1;
  const auto a = model_.forward_memory(t1, batch, cands).value();
  std::reverse(cands.begin(), cands.end());
  std::swap(cands[0], cands[2]);
  nn::Tape<double> t2;
  const auto b = model_.forward_memory(t2, batch, cands).value();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST_F(MemoryTest, NeedsCandidates) {
  const auto batch = tiny_batch(model_, w_, 1);
  nn::Tape<double> tape;
  EXPECT_THROW(model_.forward_memory(tape, batch, {}), PreconditionError);
  EXPECT_THROW(model_.forward(tape, batch), PreconditionError);
}

TEST(Checkpoint, RoundTripReproducesPredictions) {
  taxidest::testing::TempDir dir("model");
  for (auto v : all_variants()) {
    const auto w = tiny_world(v == Variant::kMlpDirect || v == Variant::kMemoryNet ? 0 : 4);
    nn::InitRng rng(12);
    auto model = build_model<float>(tiny_config(v), w.clusters, w.stats, w.vocab, rng);
    if (v == Variant::kMemoryNet) model.set_candidate_bank(tiny_candidates(model, w, 3));
    const auto batch = tiny_batch(model, w, 6, 5);
    const auto path = dir / (std::string(variant_name(v)) + ".ckpt");
    model.save(path);
    auto loaded = DestinationModel<float>::load(path);
    EXPECT_EQ(loaded.config(), model.config());
    EXPECT_EQ(loaded.predict(batch), model.predict(batch)) << variant_name(v);
    EXPECT_EQ(loaded.vocab(), model.vocab());
    EXPECT_EQ(loaded.clusters(), model.clusters());
  }
}

TEST(Embeddings, TableAccess) {
  const auto w = tiny_world(2);
  const auto m = make(ModelConfig{}, w);
  EXPECT_EQ(m.embedding_table("quarter_hour").rows(), 96u);
  EXPECT_EQ(m.embedding_table("week_of_year").rows(), 52u);
  EXPECT_THROW(m.embedding_table("hour"), UsageError);
  ModelConfig ne;
  ne.variant = Variant::kMlpNoEmbed;
  EXPECT_THROW(make(ne, w).embedding_table("client"), UsageError);
  for (double x : m.embedding_table("client").values()) {
    EXPECT_LE(std::abs(x), 0.1);
  }
}

}  // namespace
}  // namespace taxidest::models
