/*
Copyright 2026 the stabkit authors
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
you may obtain a copy of the License at

                http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stabkit {

/// Base class of every exception thrown by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input. Carries a 1-based line number when known.
class ParseError : public Error {
public:
  explicit ParseError(const std::string& msg, std::size_t line = 0)
      : Error(line ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Structurally valid input that violates a data invariant (duplicate dates, ...).
class IntegrityError : public Error {
public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Too few observations to evaluate an operation.
class InsufficientDataError : public Error {
public:
  using Error::Error;
};

/// Series cannot be aligned onto a common date axis.
class AlignmentError : public Error {
public:
  using Error::Error;
};

/// Zero-variance (or otherwise degenerate) input where dispersion is required.
class DegenerateError : public Error {
public:
  using Error::Error;
};

/// Normalization baseline is zero.
class NormalizationError : public Error {
public:
  using Error::Error;
};

/// Regression design cannot be constructed (missing asset, too few rows).
class DesignError : public Error {
public:
  using Error::Error;
};

/// Design matrix is rank deficient.
class SingularDesignError : public DesignError {
public:
  using DesignError::DesignError;
};

/// Two arguments that must share a structure (e.g. a tau grid) do not.
class ContractError : public Error {
public:
  using Error::Error;
};

/// Invalid configuration value.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Market-data transport or payload failure. `retryable()` distinguishes
/// transient transport errors from permanent payload problems.
class FetchError : public Error {
public:
  explicit FetchError(const std::string& msg, bool retryable = false)
      : Error(msg), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

private:
  bool retryable_;
};

}  // namespace stabkit
