// Copyright 2026 The tdw Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tdw {

// Base class for all data and I/O failures raised by the library. Contract
// violations (bad arguments to pure functions) throw std::invalid_argument
// instead and are not part of this hierarchy.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input record. `line` is the 1-based physical line in the file,
// counting the header line.
struct ParseError : Error {
  ParseError(std::size_t line_no, const std::string& what)
      : Error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
  std::size_t line;
};

// Geometry outside the configured grid.
struct BoundsError : Error {
  using Error::Error;
};

// Query interval does not align to bucket boundaries and was not flagged exact.
struct AlignmentError : Error {
  using Error::Error;
};

// Query interval does not intersect the warehouse's loaded time range.
struct RangeError : Error {
  using Error::Error;
};

// Warehouse file is corrupt, truncated, or internally inconsistent.
struct IntegrityError : Error {
  using Error::Error;
};

// Warehouse file has an unknown format version.
struct VersionError : Error {
  using Error::Error;
};

// Filesystem-level failure (unreadable input, unwritable output).
struct IoError : Error {
  using Error::Error;
};

}  // namespace tdw
