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

#include "taxidest/data/vocab.h"

#include <algorithm>
#include <set>

#include "taxidest/errors.h"

namespace taxidest::data {

IdMap::IdMap(std::vector<std::int64_t> ids) : ids_(std::move(ids)) {
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], static_cast<std::int32_t>(i + 1)).second) {
      throw UsageError("duplicate id in vocabulary: " + std::to_string(ids_[i]));
    }
  }
}

std::int32_t IdMap::lookup(std::int64_t raw) const {
  auto it = index_.find(raw);
  return it == index_.end() ? kUnknownIndex : it->second;
}

MetadataVocab build_vocab(std::span<const TrainRecord> records) {
  std::set<std::int64_t> clients, taxis, stands;
  for (const auto& r : records) {
    if (r.origin_call) clients.insert(*r.origin_call);
    if (r.origin_stand) stands.insert(*r.origin_stand);
    taxis.insert(r.taxi_id);
  }
  auto to_vec = [](const std::set<std::int64_t>& s) {
    return std::vector<std::int64_t>(s.begin(), s.end());
  };
  return {IdMap(to_vec(clients)), IdMap(to_vec(taxis)), IdMap(to_vec(stands))};
}

}  // namespace taxidest::data
