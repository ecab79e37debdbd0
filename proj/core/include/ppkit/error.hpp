// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ppkit {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data (taxonomy, PP-XML, embedding store, CSV...).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument or precondition violation at an API boundary.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Non-fatal messages collected during an operation.
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
  bool empty() const { return warnings.empty(); }
};

}  // namespace ppkit
