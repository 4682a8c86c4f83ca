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

#include "taxidest/data/record_cache.h"

#include <fstream>

#include "taxidest/binary_io.h"
#include "taxidest/errors.h"

namespace taxidest::data {

void write_record_cache(std::ostream& out, std::span<const TrainRecord> records) {
  out.write("TXRC", 4);
  io::write_le<std::uint32_t>(out, kRecordCacheVersion);
  io::write_le<std::uint64_t>(out, records.size());
  for (const auto& r : records) {
    io::write_string(out, r.trip_id);
    io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(r.call_type));
    std::uint8_t flags = 0;
    if (r.origin_call) flags |= 1;
    if (r.origin_stand) flags |= 2;
    if (r.missing_data) flags |= 4;
    io::write_le<std::uint8_t>(out, flags);
    io::write_le<std::int64_t>(out, r.origin_call.value_or(0));
    io::write_le<std::int64_t>(out, r.origin_stand.value_or(0));
    io::write_le<std::int64_t>(out, r.taxi_id);
    io::write_le<std::int64_t>(out, r.timestamp);
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(r.polyline.size()));
    for (const auto& p : r.polyline) {
      io::write_le<double>(out, p.lat);
      io::write_le<double>(out, p.lon);
    }
  }
}

std::vector<TrainRecord> read_record_cache(std::istream& in) {
  io::expect_magic(in, "TXRC", "record cache");
  const auto version = io::read_le<std::uint32_t>(in);
  if (version != kRecordCacheVersion) {
    throw DataError("unsupported record cache version " + std::to_string(version));
  }
  const auto count = io::read_le<std::uint64_t>(in);
  std::vector<TrainRecord> records;
  records.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 22)));
  for (std::uint64_t i = 0; i < count; ++i) {
    TrainRecord r;
    r.trip_id = io::read_string(in);
    const auto call = io::read_le<std::uint8_t>(in);
    if (call > 2) throw DataError("bad call type in record cache");
    r.call_type = static_cast<CallType>(call);
    const auto flags = io::read_le<std::uint8_t>(in);
    const auto origin_call = io::read_le<std::int64_t>(in);
    const auto origin_stand = io::read_le<std::int64_t>(in);
    if (flags & 1) r.origin_call = origin_call;
    if (flags & 2) r.origin_stand = origin_stand;
    r.missing_data = (flags & 4) != 0;
    r.taxi_id = io::read_le<std::int64_t>(in);
    r.timestamp = io::read_le<std::int64_t>(in);
    const auto n = io::read_le<std::uint32_t>(in);
    r.polyline.reserve(n);
    for (std::uint32_t j = 0; j < n; ++j) {
      const double lat = io::read_le<double>(in);
      const double lon = io::read_le<double>(in);
      r.polyline.push_back({lat, lon});
    }
    records.push_back(std::move(r));
  }
  return records;
}

void save_record_cache(const std::filesystem::path& path,
                       std::span<const TrainRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_record_cache(out, records);
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<TrainRecord> load_record_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_record_cache(in);
}

}  // namespace taxidest::data
