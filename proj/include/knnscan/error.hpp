// Copyright 2026 The knnscan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace knnscan {

// Base class of every error raised by the library. The subclasses map onto
// distinct CLI exit codes (see knnscan/cli.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input: bad file syntax, inconsistent sizes, out-of-range
// parameters.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Input file had a syntax problem at a known line.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : ValidationError(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// No admissible neighborhood family could be built (every component is
// smaller than the requested neighborhood size, or k > n).
class FamilyError : public Error {
 public:
  using Error::Error;
};

// A quantity that must be finite or well-defined was not.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace knnscan
