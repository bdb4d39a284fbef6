// Copyright 2026 The QRDR Authors
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

namespace qrdr {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (range, shape, Hermiticity, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operand shapes do not agree.
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Malformed dataset or report file. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A measurement outcome we condition on has (numerically) zero probability.
class PostselectionError : public Error {
 public:
  using Error::Error;
};

/// The resonance conditions of the QRDR Hamiltonian cannot be met.
class AdmissibilityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace qrdr
