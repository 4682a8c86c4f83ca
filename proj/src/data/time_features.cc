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

#include "taxidest/data/time_features.h"

#include <algorithm>
#include <chrono>

#include "taxidest/errors.h"

namespace taxidest::data {

TimeFeatures time_features(std::int64_t unix_seconds) {
  using namespace std::chrono;
  if (unix_seconds < 0) throw PreconditionError("negative timestamp");
  const sys_seconds t{seconds{unix_seconds}};
  const sys_days day = floor<days>(t);
  const auto since_midnight = duration_cast<minutes>(t - day).count();

  TimeFeatures f;
  f.quarter_hour = static_cast<int>(since_midnight / 15);
  const unsigned iso_dow = weekday{day}.iso_encoding();  // Monday = 1
  f.day_of_week = static_cast<int>(iso_dow) - 1;

  // The ISO week belongs to the year containing that week's Thursday.
  const sys_days thursday = day + days{3 - f.day_of_week};
  const year iso_year = year_month_day{thursday}.year();
  const sys_days jan1 = sys_days{iso_year / January / 1};
  const int iso_week = static_cast<int>((thursday - jan1).count() / 7) + 1;
  f.week_of_year = std::min(iso_week - 1, kWeeksOfYear - 1);
  return f;
}

}  // namespace taxidest::data
