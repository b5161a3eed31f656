// Copyright 2026 The Alist Authors
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
#include <utility>

namespace alist {

/// Base of every error raised by the library. `kind()` is the stable error
/// name printed by the CLI; `path()` locates the offending value inside an
/// alist using a JSON-path-like notation rooted at "$".
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message, std::string path = {})
      : std::runtime_error(message), kind_(std::move(kind)), path_(std::move(path)) {}

  const std::string& kind() const noexcept { return kind_; }
  const std::string& path() const noexcept { return path_; }

  std::string describe() const {
    std::string out = kind_;
    if (!path_.empty()) out += " at " + path_;
    out += ": ";
    out += what();
    return out;
  }

 private:
  std::string kind_;
  std::string path_;
};

#define ALIST_DEFINE_ERROR(Name, Base)                                         \
  class Name : public Base {                                                   \
   public:                                                                     \
    explicit Name(const std::string& message, std::string path = {})          \
        : Base(#Name, message, std::move(path)) {}                             \
                                                                               \
   protected:                                                                  \
    Name(std::string kind, const std::string& message, std::string path)      \
        : Base(std::move(kind), message, std::move(path)) {}                   \
  };

// Error cannot take the protected constructor form, so the first layer is
// written out by hand.
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& message, std::string path = {})
      : Error("InvariantError", message, std::move(path)) {}

 protected:
  InvariantError(std::string kind, const std::string& message, std::string path)
      : Error(std::move(kind), message, std::move(path)) {}
};

ALIST_DEFINE_ERROR(MultipleProjectionError, InvariantError)
ALIST_DEFINE_ERROR(NoVariableError, InvariantError)
ALIST_DEFINE_ERROR(UnknownVariableError, InvariantError)
ALIST_DEFINE_ERROR(NotSimpleError, InvariantError)
ALIST_DEFINE_ERROR(NotGroundError, InvariantError)
ALIST_DEFINE_ERROR(MissingCoreAttributeError, InvariantError)

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t offset)
      : Error("SyntaxError", message + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class MalformedReificationError : public Error {
 public:
  explicit MalformedReificationError(const std::string& message)
      : Error("MalformedReificationError", message) {}
};

class UnsupportedFormulaError : public Error {
 public:
  explicit UnsupportedFormulaError(const std::string& message)
      : Error("UnsupportedFormulaError", message) {}
};

// Aggregation.
class AggregationError : public Error {
 public:
  explicit AggregationError(const std::string& message)
      : Error("AggregationError", message) {}

 protected:
  AggregationError(std::string kind, const std::string& message, std::string path)
      : Error(std::move(kind), message, std::move(path)) {}
};

ALIST_DEFINE_ERROR(UnknownOperationError, AggregationError)
ALIST_DEFINE_ERROR(ArityError, AggregationError)
ALIST_DEFINE_ERROR(EmptyAggregationError, AggregationError)
ALIST_DEFINE_ERROR(DegenerateDataError, AggregationError)

// Negation strategies.
class NegationError : public Error {
 public:
  explicit NegationError(const std::string& message) : Error("NegationError", message) {}

 protected:
  NegationError(std::string kind, const std::string& message, std::string path)
      : Error(std::move(kind), message, std::move(path)) {}
};

ALIST_DEFINE_ERROR(OpenWorldError, NegationError)
ALIST_DEFINE_ERROR(NotFunctionalError, NegationError)

// Knowledge-source adapters.
class AdapterError : public Error {
 public:
  explicit AdapterError(const std::string& message) : Error("AdapterError", message) {}

 protected:
  AdapterError(std::string kind, const std::string& message, std::string path)
      : Error(std::move(kind), message, std::move(path)) {}
};

ALIST_DEFINE_ERROR(UnsupportedOperationError, AdapterError)
ALIST_DEFINE_ERROR(UnmappedPropertyError, AdapterError)
ALIST_DEFINE_ERROR(MissingSlotError, AdapterError)
ALIST_DEFINE_ERROR(TransportError, AdapterError)
ALIST_DEFINE_ERROR(ParseError, AdapterError)
ALIST_DEFINE_ERROR(ConfigError, AdapterError)

#undef ALIST_DEFINE_ERROR

}  // namespace alist
