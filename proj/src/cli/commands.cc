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

#include "taxidest/cli/commands.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include "json.hpp"

#include "taxidest/clustering.h"
#include "taxidest/data/csv_reader.h"
#include "taxidest/data/record_cache.h"
#include "taxidest/data/split.h"
#include "taxidest/errors.h"
#include "taxidest/models/model.h"
#include "taxidest/synthetic.h"
#include "taxidest/training/trainer.h"

namespace taxidest::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Model = models::DestinationModel<float>;
using data::PrefixExample;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

json parse_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<data::TrainRecord> read_csv_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return data::parse_csv(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<PrefixExample> held_out_examples(const Model& model,
                                             const std::vector<data::TrainRecord>& records,
                                             const std::vector<std::size_t>& cuts) {
  std::vector<PrefixExample> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) out.push_back(model.make_example(records[i], cuts[i]));
  return out;
}

struct PrepareArgs {
  std::string input;
  std::string out;
  std::size_t val = data::kDefaultValidationTrips;
  std::size_t test = data::kDefaultTestTrips;
  std::uint64_t seed = 0;
};

void cmd_prepare(const PrepareArgs& a, std::ostream& out) {
  const auto all = read_csv_file(a.input);
  data::Rng rng(a.seed);
  PreparedData p;
  auto split = data::split_dataset(all, rng, a.val, a.test);
  for (const auto& ref : data::one_cut_per_record(split.validation, rng)) p.validation_cuts.push_back(ref.cut);
  for (const auto& ref : data::one_cut_per_record(split.test, rng)) p.test_cuts.push_back(ref.cut);
  p.train = std::move(split.train);
  p.validation = std::move(split.validation);
  p.test = std::move(split.test);
  p.stats = data::fit_standardization(p.train);
  p.vocab = data::build_vocab(p.train);
  save_prepared(a.out, p);
  out << "records " << all.size() << " usable " << p.train.size() + p.validation.size() + p.test.size()
      << " train " << p.train.size() << " validation " << p.validation.size() << " test " << p.test.size()
      << '\n';
}

struct ClusterArgs {
  std::string data;
  std::string out;
  clustering::MeanShiftConfig ms;
  std::optional<std::size_t> seed_subsample;
};

void cmd_cluster(ClusterArgs a, std::ostream& out) {
  const PreparedData p = load_prepared(a.data);
  std::vector<geo::GeoPoint> destinations;
  destinations.reserve(p.train.size());
  for (const auto& r : p.train) destinations.push_back(r.destination());
  a.ms.seed_subsample = a.seed_subsample;
  const auto clusters = clustering::mean_shift(destinations, a.ms);
  clustering::save_clusters(clusters, a.out);
  out << clusters.size() << '\n';
}

struct TrainArgs {
  std::string data;
  std::string clusters;
  std::string variant = "mlp_clusters";
  std::string out;
  std::string report;
  models::ModelConfig model;
  training::TrainConfig train;
  std::optional<std::size_t> batch;
  std::optional<double> clip;
  bool quiet = false;
};

void cmd_train(TrainArgs a, std::ostream& out) {
  a.model.variant = models::parse_variant(a.variant);
  a.train.batch_size = a.batch;
  a.train.clip_norm = a.clip;
  a.train.checkpoint_path = a.out;
  a.train.validate();
  clustering::ClusterSet clusters;
  if (a.model.uses_clusters()) {
    if (a.clusters.empty()) {
      throw UsageError("--clusters is required for variant " + a.variant);
    }
    clusters = clustering::load_clusters(a.clusters);
  }
  a.model.cluster_count = clusters.size();
  a.model.validate();

  const PreparedData p = load_prepared(a.data);
  if (p.validation.empty()) throw DataError("prepared data has an empty validation split");
  nn::InitRng init_rng(a.train.seed);
  Model model(a.model, clusters, p.stats, p.vocab, init_rng);
  const auto validation = held_out_examples(model, p.validation, p.validation_cuts);
  if (!a.quiet) a.train.log = &out;
  const auto report = training::train(model, p.train, validation, a.train);
  model.save(a.out);
  const fs::path report_path = a.report.empty() ? fs::path(a.out + ".report.jsonl") : fs::path(a.report);
  std::ofstream rep(report_path);
  if (!rep) throw IoError("cannot open " + report_path.string() + " for writing");
  report.write_jsonl(rep);
  char line[64];
  std::snprintf(line, sizeof line, "%.3f", report.best_validation_km());
  out << "best validation km " << line << '\n';
}

struct EvaluateArgs {
  std::string model;
  std::string data;
  std::string split = "test";
};

void cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  Model model = Model::load(a.model);
  const PreparedData p = load_prepared(a.data);
  const bool test = a.split == "test";
  const auto& records = test ? p.test : p.validation;
  const auto& cuts = test ? p.test_cuts : p.validation_cuts;
  if (records.empty()) throw DataError("split " + a.split + " is empty");
  const auto examples = held_out_examples(model, records, cuts);
  char line[64];
  std::snprintf(line, sizeof line, "%.3f", training::evaluate(model, examples));
  out << line << '\n';
}

struct PredictArgs {
  std::string model;
  std::string input;
  std::string out;
};

void cmd_predict(const PredictArgs& a, std::ostream& out) {
  Model model = Model::load(a.model);
  const auto records = read_csv_file(a.input);
  std::vector<PrefixExample> examples;
  examples.reserve(records.size());
  for (const auto& r : records) {
    if (r.polyline.empty()) throw DataError("trip " + r.trip_id + " has an empty polyline");
    examples.push_back(model.make_example(r, r.polyline.size()));
  }
  training::write_submission(model, examples, a.out);
  out << examples.size() << " predictions\n";
}

struct ExportArgs {
  std::string model;
  std::string table;
  std::string out;
};

void cmd_export(const ExportArgs& a, std::ostream& out) {
  const Model model = Model::load(a.model);
  const auto& table = model.embedding_table(a.table);
  std::ofstream file(a.out);
  if (!file) throw IoError("cannot open " + a.out + " for writing");
  for (std::size_t r = 0; r < table.rows(); ++r) {
    file << r;
    for (std::size_t c = 0; c < table.cols(); ++c) file << ',' << format_double(table(r, c));
    file << '\n';
  }
  if (!file) throw IoError("failed writing " + a.out);
  out << table.rows() << " rows x " << table.cols() << '\n';
}

void cmd_synth(const synthetic::CityConfig& cfg, const std::string& path, std::ostream& out) {
  const auto records = synthetic::generate_city(cfg);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path + " for writing");
  data::write_csv(file, records);
  if (!file) throw IoError("failed writing " + path);
  out << records.size() << " trips\n";
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

void save_prepared(const fs::path& dir, const PreparedData& p) {
  if (p.validation.size() != p.validation_cuts.size() || p.test.size() != p.test_cuts.size()) {
    throw PreconditionError("held-out rides and cuts differ in count");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::vector<data::TrainRecord> all;
  all.reserve(p.train.size() + p.validation.size() + p.test.size());
  std::ostringstream manifest;
  manifest << "trip_id,split,cut\n";
  for (const auto& r : p.train) {
    all.push_back(r);
    manifest << r.trip_id << ",train,0\n";
  }
  for (std::size_t i = 0; i < p.validation.size(); ++i) {
    all.push_back(p.validation[i]);
    manifest << p.validation[i].trip_id << ",validation," << p.validation_cuts[i] << '\n';
  }
  for (std::size_t i = 0; i < p.test.size(); ++i) {
    all.push_back(p.test[i]);
    manifest << p.test[i].trip_id << ",test," << p.test_cuts[i] << '\n';
  }
  data::save_record_cache(dir / "records.bin", all);
  write_text(dir / "manifest.csv", manifest.str());

  json stats = {{"mean_lat", p.stats.mean_lat},
                {"mean_lon", p.stats.mean_lon},
                {"std_lat", p.stats.std_lat},
                {"std_lon", p.stats.std_lon}};
  write_text(dir / "stats.json", stats.dump(2) + "\n");
  json vocab = {{"clients", p.vocab.clients.ids()},
                {"taxis", p.vocab.taxis.ids()},
                {"stands", p.vocab.stands.ids()}};
  write_text(dir / "vocab.json", vocab.dump() + "\n");
}

PreparedData load_prepared(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("data directory " + dir.string() + " does not exist");
  auto records = data::load_record_cache(dir / "records.bin");

  std::istringstream manifest(read_text(dir / "manifest.csv"));
  std::string line;
  std::getline(manifest, line);
  if (line != "trip_id,split,cut") throw DataError("manifest.csv has an unexpected header", 1);
  PreparedData p;
  std::size_t row = 0;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    const std::size_t lineno = row + 2;
    const auto c2 = line.rfind(',');
    const auto c1 = c2 == std::string::npos ? c2 : line.rfind(',', c2 - 1);
    if (c1 == std::string::npos) throw DataError("manifest.csv: expected 3 fields", lineno);
    if (row >= records.size()) throw DataError("manifest.csv lists more rides than records.bin", lineno);
    const std::string trip = line.substr(0, c1);
    const std::string split = line.substr(c1 + 1, c2 - c1 - 1);
    std::size_t cut = 0;
    const char* first = line.data() + c2 + 1;
    const char* last = line.data() + line.size();
    if (auto r = std::from_chars(first, last, cut); r.ec != std::errc() || r.ptr != last) {
      throw DataError("manifest.csv: bad cut", lineno, 3);
    }
    auto& rec = records[row];
    if (rec.trip_id != trip) throw DataError("manifest.csv does not match records.bin", lineno, 1);
    if (split == "train") {
      p.train.push_back(std::move(rec));
    } else if (split == "validation" || split == "test") {
      if (cut < 1 || cut > rec.polyline.size()) throw DataError("manifest.csv: cut out of range", lineno, 3);
      auto& target = split == "test" ? p.test : p.validation;
      auto& cuts = split == "test" ? p.test_cuts : p.validation_cuts;
      target.push_back(std::move(rec));
      cuts.push_back(cut);
    } else {
      throw DataError("manifest.csv: unknown split '" + split + "'", lineno, 2);
    }
    ++row;
  }
  if (row != records.size()) throw DataError("manifest.csv lists fewer rides than records.bin");

  try {
    const json stats = parse_json(dir / "stats.json");
    p.stats = {stats.at("mean_lat").get<double>(), stats.at("mean_lon").get<double>(),
               stats.at("std_lat").get<double>(), stats.at("std_lon").get<double>()};
    const json vocab = parse_json(dir / "vocab.json");
    p.vocab.clients = data::IdMap(vocab.at("clients").get<std::vector<std::int64_t>>());
    p.vocab.taxis = data::IdMap(vocab.at("taxis").get<std::vector<std::int64_t>>());
    p.vocab.stands = data::IdMap(vocab.at("stands").get<std::vector<std::int64_t>>());
  } catch (const json::exception& e) {
    throw DataError(dir.string() + ": " + e.what());
  }
  if (!(p.stats.std_lat > 0.0) || !(p.stats.std_lon > 0.0)) {
    throw DataError("stats.json has a non-positive standard deviation");
  }
  return p;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Taxi destination prediction toolkit", "taxidest"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML file with flag values, one [section] per subcommand");

  PrepareArgs prepare;
  auto* sc_prepare = app.add_subcommand("prepare", "Parse, split and index a competition CSV");
  sc_prepare->add_option("--input", prepare.input, "Competition CSV")->required();
  sc_prepare->add_option("--out", prepare.out, "Output data directory")->required();
  sc_prepare->add_option("--val", prepare.val, "Validation rides")->capture_default_str();
  sc_prepare->add_option("--test", prepare.test, "Test rides")->capture_default_str();
  sc_prepare->add_option("--seed", prepare.seed, "Random seed")->capture_default_str();

  ClusterArgs cluster;
  auto* sc_cluster = app.add_subcommand("cluster", "Mean-shift clustering of training destinations");
  sc_cluster->add_option("--data", cluster.data, "Prepared data directory")->required();
  sc_cluster->add_option("--out", cluster.out, "Cluster CSV")->required();
  sc_cluster->add_option("--bandwidth", cluster.ms.bandwidth_m, "Kernel radius in meters")->capture_default_str();
  sc_cluster->add_option("--tolerance", cluster.ms.convergence_tol_m, "Convergence tolerance in meters")
      ->capture_default_str();
  sc_cluster->add_option("--merge-radius", cluster.ms.merge_radius_m, "Mode merge radius in meters")
      ->capture_default_str();
  sc_cluster->add_option("--max-iterations", cluster.ms.max_iterations)->capture_default_str();
  sc_cluster->add_option("--seed-subsample", cluster.seed_subsample, "Iterate only this many seeds");
  sc_cluster->add_option("--seed", cluster.ms.seed, "Random seed for seed subsampling")->capture_default_str();
  sc_cluster->add_option("--threads", cluster.ms.threads, "Worker threads, 0 = all cores")->capture_default_str();

  TrainArgs tr;
  auto* sc_train = app.add_subcommand("train", "Train a destination model");
  sc_train->add_option("--data", tr.data, "Prepared data directory")->required();
  sc_train->add_option("--clusters", tr.clusters, "Cluster CSV (centroid-output variants)");
  sc_train->add_option("--variant", tr.variant, "One of: " + models::valid_variant_names())
      ->capture_default_str();
  sc_train->add_option("--out", tr.out, "Checkpoint path")->required();
  sc_train->add_option("--report", tr.report, "Training report (JSON lines), default <out>.report.jsonl");
  sc_train->add_option("--k", tr.model.k, "Points in each of the first/last windows")->capture_default_str();
  sc_train->add_option("--hidden", tr.model.hidden, "Hidden layer width")->capture_default_str();
  sc_train->add_option("--rnn-hidden", tr.model.rnn_hidden, "LSTM state width")->capture_default_str();
  sc_train->add_option("--window", tr.model.window, "Points per step for brnn_window")->capture_default_str();
  sc_train->add_option("--memory-m", tr.model.memory_m, "Memory network candidates")->capture_default_str();
  sc_train->add_option("--memory-batch", tr.model.memory_batch, "Memory network batch size")
      ->capture_default_str();
  sc_train->add_option("--lr", tr.train.learning_rate, "Learning rate")->capture_default_str();
  sc_train->add_option("--momentum", tr.train.momentum, "Momentum")->capture_default_str();
  sc_train->add_option("--batch", tr.batch, "Batch size (default 200, memory_batch for memory_net)");
  sc_train->add_option("--max-batches", tr.train.max_batches)->capture_default_str();
  sc_train->add_option("--validate-every", tr.train.validation_every, "Batches between validations")
      ->capture_default_str();
  sc_train->add_option("--patience", tr.train.patience, "Validations without improvement before stopping")
      ->capture_default_str();
  sc_train->add_option("--clip", tr.clip, "Clip the global gradient norm");
  sc_train->add_option("--seed", tr.train.seed, "Random seed")->capture_default_str();
  sc_train->add_flag("--quiet", tr.quiet, "No progress lines");

  EvaluateArgs ev;
  auto* sc_eval = app.add_subcommand("evaluate", "Mean Haversine error (km) on a held-out split");
  sc_eval->add_option("--model", ev.model, "Checkpoint")->required();
  sc_eval->add_option("--data", ev.data, "Prepared data directory")->required();
  sc_eval->add_option("--split", ev.split, "validation or test")
      ->check(CLI::IsMember({"validation", "test"}))
      ->capture_default_str();

  PredictArgs pr;
  auto* sc_predict = app.add_subcommand("predict", "Write a submission CSV for ride prefixes");
  sc_predict->add_option("--model", pr.model, "Checkpoint")->required();
  sc_predict->add_option("--input", pr.input, "Competition-format CSV of prefixes")->required();
  sc_predict->add_option("--out", pr.out, "Submission CSV")->required();

  ExportArgs ex;
  auto* sc_export = app.add_subcommand("export-embeddings", "Dump one embedding matrix as CSV");
  sc_export->add_option("--model", ex.model, "Checkpoint")->required();
  sc_export->add_option("--table", ex.table, "client, taxi, stand, quarter_hour, day_of_week or week_of_year")
      ->required();
  sc_export->add_option("--out", ex.out, "Output CSV")->required();

  synthetic::CityConfig city;
  std::string synth_out;
  auto* sc_synth = app.add_subcommand("synth", "Generate a synthetic competition-format CSV");
  sc_synth->add_option("--out", synth_out, "Output CSV")->required();
  sc_synth->add_option("--trips", city.trips)->capture_default_str();
  sc_synth->add_option("--seed", city.seed)->capture_default_str();
  sc_synth->add_option("--hotspots", city.hotspots)->capture_default_str();
  sc_synth->add_option("--hotspot-sigma", city.hotspot_sigma_m, "Meters")->capture_default_str();
  sc_synth->add_option("--missing-fraction", city.missing_fraction)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitUsage;
  }

  try {
    if (sc_prepare->parsed()) cmd_prepare(prepare, out);
    else if (sc_cluster->parsed()) cmd_cluster(cluster, out);
    else if (sc_train->parsed()) cmd_train(tr, out);
    else if (sc_eval->parsed()) cmd_evaluate(ev, out);
    else if (sc_predict->parsed()) cmd_predict(pr, out);
    else if (sc_export->parsed()) cmd_export(ex, out);
    else if (sc_synth->parsed()) cmd_synth(city, synth_out, out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitData;
  } catch (const IoError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << one_line(e.what()) << '\n';
    return kExitInternal;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"taxidest"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace taxidest::cli
