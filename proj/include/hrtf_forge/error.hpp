// Copyright 2026 The hrtf-forge Authors.
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hforge {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `offset` is a byte offset (binary formats) or a
/// 1-based line number (text formats), as named by `unit`.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset, const char* unit = "byte")
      : Error(what + " (at " + unit + " " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Input violates a documented precondition (bad parameter, wrong topology...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Geometry or topology problem discovered while processing a mesh.
class MeshError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed (singular system, non-finite value, divergence).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Configuration document problem (missing or unknown key, wrong type).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hforge
