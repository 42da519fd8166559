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

#include "qconf/budget.hpp"

#include <cstdlib>
#include <string>

#include "qconf/errors.hpp"

namespace qconf {

namespace {

long long read_budget() {
  constexpr long long kDefault = 1LL << 14;
  constexpr long long kCeiling = 1LL << 16;
  const char* env = std::getenv("QCONF_MAX_DIM");
  if (env == nullptr || *env == '\0') return kDefault;
  char* end = nullptr;
  long long value = std::strtoll(env, &end, 10);
  if (end == nullptr || *end != '\0' || value < 2) return kDefault;
  return value > kCeiling ? kCeiling : value;
}

}  // namespace

long long max_ambient_dim() {
  static const long long budget = read_budget();
  return budget;
}

void check_dim(long long dim, const std::string& what) {
  if (dim > max_ambient_dim()) {
    throw BudgetError(what + " requires dimension " + std::to_string(dim) +
                      " which exceeds the budget of " +
                      std::to_string(max_ambient_dim()) +
                      " (override with QCONF_MAX_DIM, up to 65536)");
  }
}

}  // namespace qconf
