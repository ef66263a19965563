// Copyright 2026 The entailrank Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace entailrank {

// Base of every error the library throws. The CLI maps the subclasses onto
// exit statuses: ConfigError -> 1, DataError (and subclasses) -> 2,
// everything else -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration: invalid pattern, parameter out of range, bad flag.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data violates a contract.
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed file content. Carries the 1-based line number when known.
class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Cross-reference violations: gold ids missing from the pool, duplicate ids.
class IntegrityError : public DataError {
 public:
  using DataError::DataError;
};

// Feature schema disagreement between matrices, models or score files.
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

// Filesystem failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace entailrank
