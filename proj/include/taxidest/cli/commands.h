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

#ifndef TAXIDEST_CLI_COMMANDS_H_
#define TAXIDEST_CLI_COMMANDS_H_

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "taxidest/data/prefix.h"
#include "taxidest/data/records.h"
#include "taxidest/data/vocab.h"
#include "taxidest/geo.h"

namespace taxidest::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

// A prepared data directory:
//
//   records.bin   record cache of every usable ride (see record_cache.h)
//   manifest.csv  "trip_id,split,cut", one row per cached ride in cache
//                 order; split is train, validation or test; cut is the
//                 fixed prefix length for held-out rides and 0 for training
//   stats.json    standardization statistics of the training split
//   vocab.json    raw client, taxi and stand IDs of the training split
struct PreparedData {
  std::vector<data::TrainRecord> train;
  std::vector<data::TrainRecord> validation;
  std::vector<std::size_t> validation_cuts;
  std::vector<data::TrainRecord> test;
  std::vector<std::size_t> test_cuts;
  geo::StandardizationStats stats;
  data::MetadataVocab vocab;
};

void save_prepared(const std::filesystem::path& dir, const PreparedData& prepared);
PreparedData load_prepared(const std::filesystem::path& dir);

// Parses argv and runs one subcommand. Never throws; failures are reported
// as a single line on `err` and mapped to an exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace taxidest::cli

#endif  // TAXIDEST_CLI_COMMANDS_H_
