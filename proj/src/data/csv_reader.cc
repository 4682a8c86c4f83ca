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

#include "taxidest/data/csv_reader.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "taxidest/errors.h"

namespace taxidest::data {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::optional<std::int64_t> parse_optional_int(std::string_view text,
                                               const char* name,
                                               std::size_t line,
                                               std::size_t column) {
  text = trim(text);
  if (text.empty() || text == "NA" || text == "NaN") return std::nullopt;
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc() && ptr == text.data() + text.size()) return value;
  // Some exports render integer IDs as "2002.0".
  double d = 0.0;
  auto [dptr, dec] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (dec == std::errc() && dptr == text.data() + text.size() &&
      std::trunc(d) == d && std::abs(d) < 9.0e15) {
    return static_cast<std::int64_t>(d);
  }
  throw DataError(std::string("invalid integer in ") + name + ": '" +
                      std::string(text) + "'",
                  line, column);
}

std::int64_t parse_required_int(std::string_view text, const char* name,
                                std::size_t line, std::size_t column) {
  auto v = parse_optional_int(text, name, line, column);
  if (!v) throw DataError(std::string("missing value for ") + name, line, column);
  return *v;
}

CallType parse_call_type(std::string_view text, std::size_t line,
                         std::size_t column) {
  text = trim(text);
  if (text == "A") return CallType::kPhone;
  if (text == "B") return CallType::kStand;
  if (text == "C") return CallType::kStreet;
  throw DataError("invalid CALL_TYPE '" + std::string(text) + "' (expected A, B or C)",
                  line, column);
}

bool parse_bool(std::string_view text, std::size_t line, std::size_t column) {
  text = trim(text);
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "true" || lower == "1") return true;
  if (lower == "false" || lower == "0") return false;
  throw DataError("invalid MISSING_DATA '" + std::string(text) + "'", line, column);
}

}  // namespace

std::vector<GeoPoint> parse_polyline(std::string_view text, std::size_t line,
                                     std::size_t column) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed POLYLINE: ") + e.what(), line, column);
  }
  if (!doc.is_array()) throw DataError("POLYLINE is not a JSON array", line, column);
  std::vector<GeoPoint> points;
  points.reserve(doc.size());
  for (const auto& pair : doc) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
        !pair[1].is_number()) {
      throw DataError("POLYLINE entry is not a [lon, lat] number pair", line, column);
    }
    const double lon = pair[0].get<double>();
    const double lat = pair[1].get<double>();
    if (!(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0)) {
      throw DataError("POLYLINE coordinate out of range", line, column);
    }
    points.push_back({lat, lon});
  }
  return points;
}

CsvRecordReader::CsvRecordReader(std::istream& in) : in_(in) {
  std::vector<Field> header;
  if (!read_row(header)) throw DataError("empty CSV input: missing header", 1);
  header_width_ = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string_view name = trim(header[i].text);
    const int idx = static_cast<int>(i);
    if (name == "TRIP_ID") col_trip_id_ = idx;
    else if (name == "CALL_TYPE") col_call_type_ = idx;
    else if (name == "ORIGIN_CALL") col_origin_call_ = idx;
    else if (name == "ORIGIN_STAND") col_origin_stand_ = idx;
    else if (name == "TAXI_ID") col_taxi_id_ = idx;
    else if (name == "TIMESTAMP") col_timestamp_ = idx;
    else if (name == "MISSING_DATA") col_missing_ = idx;
    else if (name == "POLYLINE") col_polyline_ = idx;
  }
  const std::pair<const char*, int> required[] = {
      {"TRIP_ID", col_trip_id_},     {"CALL_TYPE", col_call_type_},
      {"ORIGIN_CALL", col_origin_call_}, {"ORIGIN_STAND", col_origin_stand_},
      {"TAXI_ID", col_taxi_id_},     {"TIMESTAMP", col_timestamp_},
      {"MISSING_DATA", col_missing_}, {"POLYLINE", col_polyline_}};
  for (const auto& [name, col] : required) {
    if (col < 0) throw DataError(std::string("header lacks column ") + name, 1);
  }
}

bool CsvRecordReader::read_row(std::vector<Field>& fields) {
  fields.clear();
  std::string raw;
  if (!std::getline(in_, raw)) return false;
  line_ = next_line_++;

  Field current;
  current.column = 1;
  bool in_quotes = false;
  bool was_quoted = false;
  std::size_t pos = 0;
  while (true) {
    if (pos == raw.size()) {
      if (in_quotes) {
        // Quoted field spans a line break.
        std::string more;
        if (!std::getline(in_, more)) {
          throw DataError("unterminated quoted field", line_, current.column);
        }
        ++next_line_;
        current.text.push_back('\n');
        raw = std::move(more);
        pos = 0;
        continue;
      }
      break;
    }
    const char c = raw[pos++];
    if (in_quotes) {
      if (c == '"') {
        if (pos < raw.size() && raw[pos] == '"') {
          current.text.push_back('"');
          ++pos;
        } else {
          in_quotes = false;
        }
      } else {
        current.text.push_back(c);
      }
    } else if (c == '"') {
      if (!current.text.empty() || was_quoted) {
        throw DataError("unexpected quote inside unquoted field", line_, current.column);
      }
      in_quotes = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current = Field{};
      current.column = fields.size() + 1;
      was_quoted = false;
    } else if (c == '\r' && pos == raw.size()) {
      // CRLF line ending.
    } else {
      current.text.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return true;
}

std::optional<TrainRecord> CsvRecordReader::next() {
  while (true) {
    if (!read_row(fields_)) return std::nullopt;
    if (fields_.size() == 1 && trim(fields_[0].text).empty()) continue;
    break;
  }
  if (fields_.size() != header_width_) {
    throw DataError("expected " + std::to_string(header_width_) + " fields, found " +
                        std::to_string(fields_.size()),
                    line_, std::min(fields_.size(), header_width_) + 1);
  }
  auto field = [&](int col) -> const Field& { return fields_[static_cast<std::size_t>(col)]; };

  TrainRecord r;
  r.trip_id = std::string(trim(field(col_trip_id_).text));
  if (r.trip_id.empty()) throw DataError("empty TRIP_ID", line_, field(col_trip_id_).column);
  r.call_type = parse_call_type(field(col_call_type_).text, line_,
                                field(col_call_type_).column);
  r.origin_call = parse_optional_int(field(col_origin_call_).text, "ORIGIN_CALL", line_,
                                     field(col_origin_call_).column);
  r.origin_stand = parse_optional_int(field(col_origin_stand_).text, "ORIGIN_STAND",
                                      line_, field(col_origin_stand_).column);
  r.taxi_id = parse_required_int(field(col_taxi_id_).text, "TAXI_ID", line_,
                                 field(col_taxi_id_).column);
  r.timestamp = parse_required_int(field(col_timestamp_).text, "TIMESTAMP", line_,
                                   field(col_timestamp_).column);
  r.missing_data = parse_bool(field(col_missing_).text, line_, field(col_missing_).column);
  r.polyline = parse_polyline(field(col_polyline_).text, line_, field(col_polyline_).column);
  return r;
}

std::vector<TrainRecord> parse_csv(std::istream& in) {
  CsvRecordReader reader(in);
  std::vector<TrainRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

void write_csv(std::ostream& out, const std::vector<TrainRecord>& records) {
  out << "\"TRIP_ID\",\"CALL_TYPE\",\"ORIGIN_CALL\",\"ORIGIN_STAND\",\"TAXI_ID\","
         "\"TIMESTAMP\",\"DAY_TYPE\",\"MISSING_DATA\",\"POLYLINE\"\n";
  std::ostringstream poly;
  poly << std::setprecision(9);
  for (const auto& r : records) {
    const char* call = r.call_type == CallType::kPhone   ? "A"
                       : r.call_type == CallType::kStand ? "B"
                                                         : "C";
    out << '"' << r.trip_id << "\",\"" << call << "\",";
    if (r.origin_call) out << *r.origin_call;
    out << ',';
    if (r.origin_stand) out << *r.origin_stand;
    out << ',' << r.taxi_id << ',' << r.timestamp << ",\"A\","
        << (r.missing_data ? "True" : "False") << ",\"";
    poly.str({});
    poly << '[';
    for (std::size_t i = 0; i < r.polyline.size(); ++i) {
      if (i) poly << ',';
      poly << '[' << r.polyline[i].lon << ',' << r.polyline[i].lat << ']';
    }
    poly << ']';
    out << poly.str() << "\"\n";
  }
}

}  // namespace taxidest::data
