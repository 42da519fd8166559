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

#include "qconf/io.hpp"

#include <filesystem>
#include <fstream>

#include "qconf/errors.hpp"

namespace qconf {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw InputError(msg);
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& context) {
  require(j.is_array() && !j.empty(), context + ": matrix must be a nonempty array of rows");
  const size_t rows = j.size();
  require(j[0].is_array() && !j[0].empty(), context + ": row 0 malformed");
  const size_t cols = j[0].size();
  ComplexMatrix m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    require(j[r].is_array() && j[r].size() == cols,
            context + ": row " + std::to_string(r) + " has wrong length");
    for (size_t c = 0; c < cols; ++c) {
      const Json& e = j[r][c];
      require(e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number(),
              context + ": entry (" + std::to_string(r) + "," + std::to_string(c) +
                  ") must be [re, im]");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

Json state_to_json(const MultipartiteState& state) {
  Json j;
  j["dims"] = state.profile.dims;
  j["labels"] = state.profile.labels;
  j["eve"] = state.eve_index ? Json(state.profile.labels[*state.eve_index])
                             : Json(nullptr);
  j["matrix"] = matrix_to_json(state.matrix);
  return j;
}

MultipartiteState state_from_json(const Json& j) {
  require(j.is_object(), "state: top level must be an object");
  for (const char* field : {"dims", "labels", "eve", "matrix"})
    require(j.contains(field), std::string("state: missing field '") + field + "'");
  MultipartiteState state;
  require(j["dims"].is_array(), "state: 'dims' must be an array");
  for (const auto& d : j["dims"]) {
    require(d.is_number_integer() && d.get<long long>() >= 1,
            "state: dimensions must be positive integers");
    state.profile.dims.push_back(d.get<int>());
  }
  require(j["labels"].is_array(), "state: 'labels' must be an array");
  for (const auto& l : j["labels"]) {
    require(l.is_string(), "state: labels must be strings");
    state.profile.labels.push_back(l.get<std::string>());
  }
  state.matrix = matrix_from_json(j["matrix"], "state");
  if (!j["eve"].is_null()) {
    require(j["eve"].is_string(), "state: 'eve' must be a label or null");
    int index = state.profile.index_of(j["eve"].get<std::string>());
    require(index >= 0, "state: eve label '" + j["eve"].get<std::string>() +
                            "' not among the subsystem labels");
    state.eve_index = index;
  }
  state.validate();
  return state;
}

Json instrument_to_json(const Instrument& instrument) {
  Json j;
  j["party"] = instrument.party;
  Json branches = Json::array();
  for (const auto& b : instrument.branches) {
    Json branch;
    branch["outcome"] = b.outcome;
    Json kraus = Json::array();
    for (const auto& e : b.kraus) kraus.push_back(matrix_to_json(e));
    branch["kraus"] = std::move(kraus);
    branches.push_back(std::move(branch));
  }
  j["branches"] = std::move(branches);
  return j;
}

Instrument instrument_from_json(const Json& j) {
  require(j.is_object(), "instrument: top level must be an object");
  require(j.contains("party") && j["party"].is_string(),
          "instrument: missing string field 'party'");
  require(j.contains("branches") && j["branches"].is_array() &&
              !j["branches"].empty(),
          "instrument: 'branches' must be a nonempty array");
  Instrument instrument;
  instrument.party = j["party"].get<std::string>();
  for (const auto& b : j["branches"]) {
    require(b.is_object() && b.contains("outcome") && b["outcome"].is_string() &&
                b.contains("kraus") && b["kraus"].is_array() && !b["kraus"].empty(),
            "instrument: each branch needs 'outcome' and nonempty 'kraus'");
    InstrumentBranch branch;
    branch.outcome = b["outcome"].get<std::string>();
    for (const auto& k : b["kraus"])
      branch.kraus.push_back(matrix_from_json(k, "instrument kraus"));
    instrument.branches.push_back(std::move(branch));
  }
  instrument.validate();
  return instrument;
}

ProtocolFile protocol_file_from_json(const Json& j, const std::string& base_dir) {
  require(j.is_object(), "protocol spec: top level must be an object");
  for (const char* field : {"state", "instruments", "n", "bin_counts", "key_size"})
    require(j.contains(field),
            std::string("protocol spec: missing field '") + field + "'");

  ProtocolFile file;
  require(j["state"].is_string(), "protocol spec: 'state' must be a path");
  file.state = state_from_json(
      load_json_file(resolve(base_dir, j["state"].get<std::string>())));

  require(j["instruments"].is_array() && !j["instruments"].empty(),
          "protocol spec: 'instruments' must be a nonempty array of paths");
  for (const auto& p : j["instruments"]) {
    require(p.is_string(), "protocol spec: instrument entries must be paths");
    file.spec.instruments.push_back(instrument_from_json(
        load_json_file(resolve(base_dir, p.get<std::string>()))));
  }

  require(j["n"].is_number_integer() && j["n"].get<int>() >= 1,
          "protocol spec: 'n' must be a positive integer");
  file.spec.n = j["n"].get<int>();

  require(j["bin_counts"].is_array(), "protocol spec: 'bin_counts' must be an array");
  for (const auto& b : j["bin_counts"]) {
    require(b.is_number_integer() && b.get<long long>() >= 1,
            "protocol spec: bin counts must be positive integers");
    file.spec.bin_counts.push_back(b.get<long long>());
  }

  if (j.contains("binning")) {
    require(j["binning"].is_array(), "protocol spec: 'binning' must be an array");
    for (const auto& mode : j["binning"]) {
      require(mode.is_string() &&
                  (mode.get<std::string>() == "random" ||
                   mode.get<std::string>() == "identity"),
              "protocol spec: binning modes are 'random' or 'identity'");
      file.spec.binning.push_back(mode.get<std::string>() == "random"
                                      ? BinningMode::Random
                                      : BinningMode::Identity);
    }
  }

  require(j["key_size"].is_number_integer() && j["key_size"].get<long long>() >= 1,
          "protocol spec: 'key_size' must be a positive integer");
  file.spec.key_size = j["key_size"].get<long long>();

  if (j.contains("hash")) {
    require(j["hash"].is_string() && (j["hash"].get<std::string>() == "seeded" ||
                                      j["hash"].get<std::string>() == "identity"),
            "protocol spec: hash modes are 'seeded' or 'identity'");
    file.spec.hash = j["hash"].get<std::string>() == "seeded" ? HashMode::Seeded
                                                              : HashMode::Identity;
  }
  if (j.contains("seed")) {
    require(j["seed"].is_number_integer(), "protocol spec: 'seed' must be an integer");
    file.spec.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("decoder")) {
    require(j["decoder"].is_string() && (j["decoder"].get<std::string>() == "ML" ||
                                         j["decoder"].get<std::string>() == "PGM"),
            "protocol spec: decoder is 'ML' or 'PGM'");
    file.spec.decoder = j["decoder"].get<std::string>() == "ML" ? Decoder::ML
                                                                : Decoder::PGM;
  }
  return file;
}

namespace {

Json constraint_to_json(const RateConstraint& c) {
  Json j;
  Json players = Json::array();
  for (int i : c.players) players.push_back(i + 1);
  j["players"] = std::move(players);
  j["bound"] = c.bound;
  j["conditioning_player"] =
      c.conditioning_player ? Json(*c.conditioning_player + 1) : Json(nullptr);
  j["conditioning"] = c.conditioning;
  return j;
}

}  // namespace

Json rate_report_to_json(const RateReport& report) {
  Json j;
  j["theorem"] = report.theorem;
  j["raw"] = report.raw;
  j["clamped"] = report.clamped;
  j["R_CO"] = report.r_co;
  Json rates = Json::array();
  for (double r : report.optimal_rates) rates.push_back(r);
  j["optimal_rates"] = std::move(rates);
  Json binding = Json::array();
  for (const auto& c : report.binding_constraints)
    binding.push_back(constraint_to_json(c));
  j["binding_constraints"] = std::move(binding);
  Json witness;
  witness["secrecy_entropy"] = report.secrecy_entropy;
  if (report.distinguished_player)
    witness["j"] = *report.distinguished_player + 1;
  j["witness"] = std::move(witness);
  return j;
}

Json simulation_report_to_json(const SimulationReport& report) {
  Json j;
  j["reliability"] = report.reliability;
  j["secrecy"] = report.secrecy;
  j["achieved_key_bits"] = report.achieved_key_bits;
  j["transcript_rate_bits"] = report.transcript_rate_bits;
  j["decode_success"] = report.decode_success;
  j["predicted_key_rate"] = report.predicted_key_rate
                                ? Json(*report.predicted_key_rate)
                                : Json(nullptr);
  // The secrecy figure measures distance to uniform x this reference state.
  j["secrecy_reference"] =
      "key-averaged marginal (at most 2x the optimal constant state)";
  j["seed"] = report.seed;
  j["decoder"] = report.decoder == Decoder::ML ? "ML" : "PGM";
  j["key_size"] = report.key_size;
  j["n"] = report.n;
  return j;
}

Json combing_report_to_json(const CombingResult& result) {
  Json j;
  j["method"] = "combing";
  j["raw"] = result.raw;
  j["rate"] = result.clamped;
  j["root"] = result.best_root + 1;
  Json subset = Json::array();
  for (int i : result.binding_subset) subset.push_back(i + 1);
  j["binding_subset"] = std::move(subset);
  return j;
}

Json tree_report_to_json(const TreeResult& result, bool connected_note) {
  Json j;
  j["method"] = "tree";
  j["rate"] = result.rate;
  Json tree = Json::array();
  for (const auto& [a, b] : result.tree)
    tree.push_back(Json::array({a + 1, b + 1}));
  j["tree"] = std::move(tree);
  if (connected_note && result.tree.empty())
    j["note"] = "no spanning tree with positive weights (disconnected)";
  return j;
}

EdgeWeightGraph weights_from_json(const Json& j) {
  require(j.is_object() && j.contains("m") && j.contains("edges"),
          "weights: need fields 'm' and 'edges'");
  require(j["m"].is_number_integer() && j["m"].get<int>() >= 2,
          "weights: 'm' must be an integer >= 2");
  EdgeWeightGraph graph(j["m"].get<int>());
  require(j["edges"].is_array(), "weights: 'edges' must be an array");
  for (const auto& e : j["edges"]) {
    require(e.is_object() && e.contains("i") && e.contains("j") && e.contains("w"),
            "weights: each edge needs 'i', 'j', 'w'");
    int a = e["i"].get<int>() - 1;
    int b = e["j"].get<int>() - 1;
    double w = e["w"].get<double>();
    require(w >= 0.0, "weights: edge weights must be nonnegative");
    graph.set(a, b, w);
  }
  return graph;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw InputError("parse error in '" + path + "': " + e.what());
  }
  return j;
}

void save_json_file(const std::string& path, const Json& value) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << value.dump(1) << "\n";
}

namespace {

bool type_matches(const Json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "number") return value.is_number();
  if (type == "integer") return value.is_number_integer();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  return false;
}

void check_schema(const Json& value, const Json& schema, const std::string& path,
                  std::vector<std::string>& out) {
  if (schema.contains("type")) {
    const Json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(value, t.get<std::string>());
    } else if (t.is_array()) {
      for (const auto& option : t)
        ok = ok || type_matches(value, option.get<std::string>());
    }
    if (!ok) {
      out.push_back(path + ": type mismatch");
      return;
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& option : schema["enum"]) ok = ok || option == value;
    if (!ok) out.push_back(path + ": value not in enum");
  }
  if (schema.contains("minimum") && value.is_number()) {
    if (value.get<double>() < schema["minimum"].get<double>())
      out.push_back(path + ": below minimum");
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& field : schema["required"])
        if (!value.contains(field.get<std::string>()))
          out.push_back(path + ": missing required field '" +
                        field.get<std::string>() + "'");
    }
    if (schema.contains("properties")) {
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (schema["properties"].contains(it.key())) {
          check_schema(it.value(), schema["properties"][it.key()],
                       path + "/" + it.key(), out);
        } else if (schema.contains("additionalProperties") &&
                   schema["additionalProperties"].is_boolean() &&
                   !schema["additionalProperties"].get<bool>()) {
          out.push_back(path + ": unexpected field '" + it.key() + "'");
        }
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    for (size_t i = 0; i < value.size(); ++i)
      check_schema(value[i], schema["items"], path + "[" + std::to_string(i) + "]",
                   out);
  }
}

}  // namespace

std::vector<std::string> schema_violations(const Json& value, const Json& schema) {
  std::vector<std::string> out;
  check_schema(value, schema, "$", out);
  return out;
}

}  // namespace qconf
