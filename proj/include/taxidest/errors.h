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

#ifndef TAXIDEST_ERRORS_H_
#define TAXIDEST_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace taxidest {

// Base class for every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid flags, configuration or API arguments.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed or insufficient input data. Line and column are 1-based; zero
// means "not applicable".
class DataError : public Error {
 public:
  explicit DataError(const std::string& what, std::size_t line = 0,
                     std::size_t column = 0);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// File system failures.
class IoError : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Tensor shapes do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace taxidest

#endif  // TAXIDEST_ERRORS_H_
