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

#ifndef TAXIDEST_DATA_TIME_FEATURES_H_
#define TAXIDEST_DATA_TIME_FEATURES_H_

#include <cstdint>

namespace taxidest::data {

inline constexpr int kQuarterHours = 96;
inline constexpr int kDaysOfWeek = 7;
inline constexpr int kWeeksOfYear = 52;

// Calendar features of a ride start, rendered in UTC.
struct TimeFeatures {
  int quarter_hour = 0;  // [0, 95]
  int day_of_week = 0;   // [0, 6], Monday = 0
  int week_of_year = 0;  // ISO week - 1, week 53 clamped to 51

  friend bool operator==(const TimeFeatures&, const TimeFeatures&) = default;
};

TimeFeatures time_features(std::int64_t unix_seconds);

}  // namespace taxidest::data

#endif  // TAXIDEST_DATA_TIME_FEATURES_H_
