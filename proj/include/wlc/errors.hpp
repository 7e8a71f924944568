// Copyright 2026 The wlc Authors
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

#ifndef WLC_ERRORS_HPP
#define WLC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wlc {

// Base for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Budget-type failures. These map to exit code 2 in the CLI: the answer is
// not wrong, it was never computed.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// Renaming/canonicalization search exceeded its node budget.
class SearchBudgetExceeded : public BudgetError {
 public:
  using BudgetError::BudgetError;
};

// Chain or quotient closure exceeded max_states.
class StateExplosion : public BudgetError {
 public:
  using BudgetError::BudgetError;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class InvalidChoice : public Error {
 public:
  using Error::Error;
};

class AdvancePastFinal : public Error {
 public:
  using Error::Error;
};

class NoCoordinatingChoice : public Error {
 public:
  using Error::Error;
};

class MissingStageEntry : public Error {
 public:
  using Error::Error;
};

class InnerSolveFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace wlc

#endif  // WLC_ERRORS_HPP
