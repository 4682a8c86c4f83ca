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

#ifndef TAXIDEST_DATA_VOCAB_H_
#define TAXIDEST_DATA_VOCAB_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "taxidest/data/records.h"

namespace taxidest::data {

// Dense index 0 is reserved for absent or unseen values.
inline constexpr std::int32_t kUnknownIndex = 0;

// Maps raw IDs to contiguous dense indices 1..n in ascending raw-ID order.
class IdMap {
 public:
  IdMap() = default;
  // ids must be distinct; they are assigned indices 1..ids.size() in the
  // given order.
  explicit IdMap(std::vector<std::int64_t> ids);

  std::int32_t lookup(std::int64_t raw) const;
  std::int32_t lookup(const std::optional<std::int64_t>& raw) const {
    return raw ? lookup(*raw) : kUnknownIndex;
  }
  // Number of dense indices, including UNK.
  std::size_t size() const { return ids_.size() + 1; }
  // Raw IDs in dense-index order, excluding UNK.
  const std::vector<std::int64_t>& ids() const { return ids_; }

  friend bool operator==(const IdMap& a, const IdMap& b) { return a.ids_ == b.ids_; }

 private:
  std::vector<std::int64_t> ids_;
  std::unordered_map<std::int64_t, std::int32_t> index_;
};

struct MetadataVocab {
  IdMap clients;
  IdMap taxis;
  IdMap stands;

  friend bool operator==(const MetadataVocab&, const MetadataVocab&) = default;
};

// Collects every distinct client, taxi and stand ID. Call on the training
// split only.
MetadataVocab build_vocab(std::span<const TrainRecord> records);

}  // namespace taxidest::data

#endif  // TAXIDEST_DATA_VOCAB_H_
