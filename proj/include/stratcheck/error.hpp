// Copyright 2026 The stratcheck Authors
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

namespace stratcheck {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax error in an expression string; offset is a byte position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Invalid operation on real numbers: ln of a nonpositive value, division by
// zero, overflow of an exponent.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what, long node = -1) : Error(what), node_(node) {}
  // Index of the expression node that failed, or -1 outside expression evaluation.
  long node() const noexcept { return node_; }

 private:
  long node_;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

// Malformed scenario or stratified-set description. The path names the
// offending JSON field.
class InputError : public Error {
 public:
  InputError(const std::string& path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(path), message_(message) {}
  const std::string& path() const noexcept { return path_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string path_;
  std::string message_;
};

}  // namespace stratcheck
