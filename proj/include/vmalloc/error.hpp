// Copyright 2026 The vmalloc Authors
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

#ifndef VMALLOC_ERROR_HPP
#define VMALLOC_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vmalloc {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An identifier (host, VM, power model) that does not exist.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A numeric argument outside the domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration: fleet specs, GA parameters, experiment settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string reason)
      : Error("line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(std::move(reason)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

enum class SolverErrc {
  kNoFeasibleHost,
  kUnrepairable,
  kBudgetExceeded,
  kNoFeasibleAssignment,
};

const char* to_string(SolverErrc code) noexcept;

class SolverError : public Error {
 public:
  SolverError(SolverErrc code, const std::string& what)
      : Error(std::string(to_string(code)) + ": " + what), code_(code) {}

  SolverErrc code() const noexcept { return code_; }

 private:
  SolverErrc code_;
};

}  // namespace vmalloc

#endif  // VMALLOC_ERROR_HPP
