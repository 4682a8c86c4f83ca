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

#ifndef TAXIDEST_DATA_RECORD_CACHE_H_
#define TAXIDEST_DATA_RECORD_CACHE_H_

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "taxidest/data/records.h"

namespace taxidest::data {

// Binary cache of parsed records. Regenerable from the CSV. All integers
// and floats are little-endian.
//
//   char[4]  magic "TXRC"
//   u32      version (1)
//   u64      record count
//   per record:
//     u32 + bytes  trip_id
//     u8           call type (0 phone, 1 stand, 2 street)
//     u8           flags (bit 0 origin_call present, bit 1 origin_stand
//                  present, bit 2 missing_data)
//     i64          origin_call (0 when absent)
//     i64          origin_stand (0 when absent)
//     i64          taxi_id
//     i64          timestamp
//     u32          point count
//     f64 x 2      (lat, lon) per point
inline constexpr std::uint32_t kRecordCacheVersion = 1;

void write_record_cache(std::ostream& out, std::span<const TrainRecord> records);
std::vector<TrainRecord> read_record_cache(std::istream& in);

void save_record_cache(const std::filesystem::path& path,
                       std::span<const TrainRecord> records);
std::vector<TrainRecord> load_record_cache(const std::filesystem::path& path);

}  // namespace taxidest::data

#endif  // TAXIDEST_DATA_RECORD_CACHE_H_
