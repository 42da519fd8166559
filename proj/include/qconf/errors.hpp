// Copyright 2025 The qconf authors
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

namespace qconf {

/// Base class for all qconf errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: malformed files, states failing validation,
/// instruments failing completeness, bad flags. CLI exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A computation would exceed the configured dimension / resource budget.
/// CLI exit code 3.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// A violated internal invariant (a bug, not a user error). CLI exit code 4.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace qconf
