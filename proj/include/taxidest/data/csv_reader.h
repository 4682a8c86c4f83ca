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

#ifndef TAXIDEST_DATA_CSV_READER_H_
#define TAXIDEST_DATA_CSV_READER_H_

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taxidest/data/records.h"

namespace taxidest::data {

// Streams TrainRecords out of a competition-format CSV file:
//
//   TRIP_ID,CALL_TYPE,ORIGIN_CALL,ORIGIN_STAND,TAXI_ID,TIMESTAMP,DAY_TYPE,
//   MISSING_DATA,POLYLINE
//
// Columns are located by header name. POLYLINE is a quoted JSON array of
// [longitude, latitude] pairs. DAY_TYPE is read and ignored. Unusable rows
// (missing data, empty polyline) are still returned; see
// TrainRecord::usable(). Malformed input throws DataError with the 1-based
// line and column of the offending field.
class CsvRecordReader {
 public:
  explicit CsvRecordReader(std::istream& in);

  // Next record in file order, or nullopt at end of input.
  std::optional<TrainRecord> next();

  // Line number of the most recently returned record.
  std::size_t line() const { return line_; }

 private:
  struct Field {
    std::string text;
    std::size_t column = 0;
  };

  bool read_row(std::vector<Field>& fields);

  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t next_line_ = 1;
  std::vector<Field> fields_;
  int col_trip_id_ = -1;
  int col_call_type_ = -1;
  int col_origin_call_ = -1;
  int col_origin_stand_ = -1;
  int col_taxi_id_ = -1;
  int col_timestamp_ = -1;
  int col_missing_ = -1;
  int col_polyline_ = -1;
  std::size_t header_width_ = 0;
};

// Reads the whole stream.
std::vector<TrainRecord> parse_csv(std::istream& in);

// Parses a polyline literal such as "[[-8.61,41.14],[-8.62,41.15]]" into
// (lat, lon) points.
std::vector<GeoPoint> parse_polyline(std::string_view text,
                                     std::size_t line = 0,
                                     std::size_t column = 0);

// Writes records back out in the competition schema. Used by the synthetic
// fixture generator and by tests.
void write_csv(std::ostream& out, const std::vector<TrainRecord>& records);

}  // namespace taxidest::data

#endif  // TAXIDEST_DATA_CSV_READER_H_
