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

// JSON serialization for states, instruments, protocol specifications and
// reports, plus a small structural checker for the shipped schemas.
//
// State file:       {"dims":[...], "labels":[...], "eve": <label|null>,
//                    "matrix": [[[re,im], ...], ...]}   (row-major)
// Instrument file:  {"party": <label>,
//                    "branches":[{"outcome":"...","kraus":[<matrix>...]}]}
// Party indices in reports are 1-based.

#pragma once

#include <string>

#include <json.hpp>

#include "qconf/protocol.hpp"
#include "qconf/rates.hpp"
#include "qconf/states.hpp"

namespace qconf {

using Json = nlohmann::json;

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, const std::string& context);

Json state_to_json(const MultipartiteState& state);
MultipartiteState state_from_json(const Json& j);

Json instrument_to_json(const Instrument& instrument);
Instrument instrument_from_json(const Json& j);

/// Protocol specification file. `base_dir` resolves the relative "state"
/// and "instruments" paths. Layout:
///   {"state": <path>, "instruments": [<path>...], "n": 2,
///    "bin_counts": [...], "binning": ["random"|"identity", ...]?,
///    "key_size": 4, "hash": "seeded"|"identity"?, "seed": 7?,
///    "decoder": "ML"|"PGM"?}
struct ProtocolFile {
  MultipartiteState state;
  ProtocolSpec spec;
};
ProtocolFile protocol_file_from_json(const Json& j, const std::string& base_dir);

Json rate_report_to_json(const RateReport& report);
Json simulation_report_to_json(const SimulationReport& report);
Json combing_report_to_json(const CombingResult& result);
Json tree_report_to_json(const TreeResult& result, bool connected_note = true);

EdgeWeightGraph weights_from_json(const Json& j);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& value);

/// Structural validation against the subset of JSON Schema used by the
/// shipped schemas: type, properties, required, items, enum, minimum,
/// additionalProperties. Returns human-readable violations (empty = valid).
std::vector<std::string> schema_violations(const Json& value, const Json& schema);

}  // namespace qconf
