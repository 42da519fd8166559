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

#include <string>

namespace qconf {

/// Maximum ambient dimension for any single matrix. Defaults to 2^14.
/// Overridable through the environment variable QCONF_MAX_DIM,
/// clamped to [2, 2^16]. Read once and cached.
long long max_ambient_dim();

/// Throws BudgetError if `dim` exceeds the ambient-dimension budget.
/// `what` names the offending object for the error message.
void check_dim(long long dim, const std::string& what);

}  // namespace qconf
