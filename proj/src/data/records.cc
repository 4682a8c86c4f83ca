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

#include "taxidest/data/records.h"

namespace taxidest::data {

std::vector<TrainRecord> usable_records(std::span<const TrainRecord> records) {
  std::vector<TrainRecord> out;
  for (const auto& r : records) {
    if (r.usable()) out.push_back(r);
  }
  return out;
}

}  // namespace taxidest::data
