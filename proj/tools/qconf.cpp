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

// Command-line front end: load states and instruments, run rate
// computations and protocol simulations, emit human-readable or JSON
// reports. Exit codes: 0 success, 2 input error, 3 resource budget,
// 4 internal invariant violation.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "qconf/budget.hpp"
#include "qconf/errors.hpp"
#include "qconf/io.hpp"
#include "qconf/protocol.hpp"
#include "qconf/rates.hpp"
#include "qconf/states.hpp"

namespace {

using namespace qconf;

std::string fmt6(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6g", x);
  return buffer;
}

std::string schema_dir() {
  const char* env = std::getenv("QCONF_SCHEMA_DIR");
  if (env != nullptr && *env != '\0') return env;
  return "schemas";
}

std::vector<std::string> split_labels(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

/// Orders loaded instruments to match the state's parties; a single
/// instrument is broadcast to every party (relabeled per party).
std::vector<Instrument> bind_instruments(const MultipartiteState& state,
                                         std::vector<Instrument> loaded) {
  std::vector<int> parties = state.party_subsystems();
  if (loaded.size() == 1 && parties.size() > 1) {
    std::vector<Instrument> out;
    for (int p : parties) {
      if (loaded[0].input_dim() != state.profile.dims[p])
        throw InputError("instrument dimension " +
                         std::to_string(loaded[0].input_dim()) +
                         " does not match party '" + state.profile.labels[p] +
                         "'");
      out.push_back(loaded[0].with_party(state.profile.labels[p]));
    }
    return out;
  }
  if (loaded.size() != parties.size())
    throw InputError("need one instrument per party (" +
                     std::to_string(parties.size()) + " parties, " +
                     std::to_string(loaded.size()) + " instruments)");
  std::vector<Instrument> out;
  for (int p : parties) {
    const std::string& label = state.profile.labels[p];
    bool found = false;
    for (const auto& inst : loaded) {
      if (inst.party == label) {
        out.push_back(inst);
        found = true;
        break;
      }
    }
    if (!found)
      throw InputError("no instrument provided for party '" + label + "'");
  }
  return out;
}

void print_rate_report(const RateReport& report) {
  std::cout << "theorem:        " << report.theorem << "\n";
  std::cout << "raw rate:       " << fmt6(report.raw) << " bits\n";
  std::cout << "clamped rate:   " << fmt6(report.clamped) << " bits\n";
  std::cout << "R_CO:           " << fmt6(report.r_co) << " bits\n";
  std::cout << "secrecy term:   " << fmt6(report.secrecy_entropy) << " bits\n";
  if (report.distinguished_player)
    std::cout << "player j:       " << (*report.distinguished_player + 1) << "\n";
  std::cout << "optimal rates:  [";
  for (size_t i = 0; i < report.optimal_rates.size(); ++i)
    std::cout << (i ? ", " : "") << fmt6(report.optimal_rates[i]);
  std::cout << "]\n";
  std::cout << "binding constraints:\n";
  for (const auto& c : report.binding_constraints)
    std::cout << "  " << c.conditioning << " = " << fmt6(c.bound) << "\n";
}

struct RatesArgs {
  std::string state_file;
  std::vector<std::string> instrument_files;
  std::string theorem;
  int j = 0;  // 1-based; 0 = not set
  bool json = false;
};

int cmd_rates(const RatesArgs& args) {
  MultipartiteState state = state_from_json(load_json_file(args.state_file));
  std::vector<Instrument> loaded;
  for (const auto& path : args.instrument_files)
    loaded.push_back(instrument_from_json(load_json_file(path)));
  if (loaded.empty()) throw InputError("no instruments given");
  std::vector<Instrument> instruments = bind_instruments(state, loaded);

  RateReport report;
  if (args.theorem == "key-cq") {
    report = key_rate_cq(state, instruments);
  } else if (args.theorem == "key-c") {
    report = key_rate_c(state, instruments);
  } else if (args.theorem == "ghz-cq") {
    report = args.j > 0 ? ghz_rate_cq(state, instruments, args.j - 1)
                        : ghz_rate_cq_best(state, instruments);
  } else if (args.theorem == "ghz-c") {
    report = ghz_rate_c(state, instruments);
  } else {
    throw InputError("unknown theorem '" + args.theorem + "'");
  }
  if (args.json)
    std::cout << rate_report_to_json(report).dump(1) << "\n";
  else
    print_rate_report(report);
  return 0;
}

struct GhzArgs {
  std::string state_file;
  std::string weights_file;
  std::string method;
  bool json = false;
};

int cmd_ghz(const GhzArgs& args) {
  if (args.method == "combing") {
    if (args.state_file.empty())
      throw InputError("combing needs --state");
    MultipartiteState state = state_from_json(load_json_file(args.state_file));
    CombingResult result = combing_ghz_rate(state);
    if (args.json) {
      std::cout << combing_report_to_json(result).dump(1) << "\n";
    } else {
      std::cout << "combing rate:   " << fmt6(result.clamped) << " bits (raw "
                << fmt6(result.raw) << ")\n";
      std::cout << "best root:      party " << result.best_root + 1 << "\n";
      std::cout << "binding subset: {";
      for (size_t i = 0; i < result.binding_subset.size(); ++i)
        std::cout << (i ? "," : "") << result.binding_subset[i] + 1;
      std::cout << "}\n";
    }
    return 0;
  }
  if (args.method != "tree")
    throw InputError("unknown method '" + args.method + "'");

  TreeResult result;
  if (!args.weights_file.empty()) {
    result = tree_ghz_rate(weights_from_json(load_json_file(args.weights_file)));
  } else if (!args.state_file.empty()) {
    MultipartiteState state = state_from_json(load_json_file(args.state_file));
    result = tree_ghz_rate_from_state(state);
  } else {
    throw InputError("tree needs --state or --weights");
  }
  if (args.json) {
    std::cout << tree_report_to_json(result).dump(1) << "\n";
  } else {
    std::cout << "tree rate:      " << fmt6(result.rate) << " bits\n";
    if (result.tree.empty()) {
      std::cout << "no spanning tree with positive weights (disconnected)\n";
    } else {
      std::cout << "best tree:      {";
      for (size_t i = 0; i < result.tree.size(); ++i)
        std::cout << (i ? "," : "") << result.tree[i].first + 1
                  << result.tree[i].second + 1;
      std::cout << "}\n";
    }
  }
  return 0;
}

struct SimulateArgs {
  std::string spec_file;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool against_co = false;
  int d = 2;
  int k = 2;
  bool json = false;
};

int cmd_simulate(const SimulateArgs& args) {
  SimulationReport report;
  if (args.against_co) {
    report = direct_against_co_protocol(args.d, args.k);
  } else {
    if (args.spec_file.empty()) throw InputError("simulate needs --spec");
    std::string dir = std::filesystem::path(args.spec_file).parent_path().string();
    ProtocolFile file = protocol_file_from_json(load_json_file(args.spec_file), dir);
    file.spec.instruments = bind_instruments(file.state, file.spec.instruments);
    if (args.seed_set) file.spec.seed = args.seed;
    report = run_protocol(file.state, file.spec);
  }
  if (args.json) {
    std::cout << simulation_report_to_json(report).dump(1) << "\n";
  } else {
    std::cout << "reliability:     " << fmt6(report.reliability) << "\n";
    std::cout << "secrecy:         " << fmt6(report.secrecy) << "\n";
    std::cout << "key bits/copy:   " << fmt6(report.achieved_key_bits) << "\n";
    std::cout << "transcript rate: " << fmt6(report.transcript_rate_bits) << "\n";
    std::cout << "decode success:  " << fmt6(report.decode_success) << "\n";
    if (report.predicted_key_rate)
      std::cout << "formula rate:    " << fmt6(*report.predicted_key_rate) << "\n";
  }
  return 0;
}

struct ExampleArgs {
  std::string name;
  std::string out;
  int m = 3;
  int d = 2;
  int k = 2;
  std::string dims;
  int rank = 1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string pbit_spec_file;
};

/// Custom private-bit construction: {"d": 2, "shield_dims": [2,2],
/// "eve_dim": 2, "base": [[re,im], ...], "unitaries": [<matrix>, ...]}.
PbitSpec pbit_spec_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("d") || !j.contains("shield_dims") ||
      !j.contains("eve_dim") || !j.contains("base") || !j.contains("unitaries"))
    throw InputError(
        "pbit spec needs d, shield_dims, eve_dim, base and unitaries");
  PbitSpec spec;
  spec.d = j["d"].get<int>();
  for (const auto& s : j["shield_dims"]) spec.shield_dims.push_back(s.get<int>());
  spec.eve_dim = j["eve_dim"].get<int>();
  const Json& base = j["base"];
  if (!base.is_array() || base.empty())
    throw InputError("pbit spec: 'base' must be a nonempty array of [re,im]");
  spec.base = ComplexVector::Zero(base.size());
  for (size_t i = 0; i < base.size(); ++i) {
    if (!base[i].is_array() || base[i].size() != 2)
      throw InputError("pbit spec: base entries must be [re, im]");
    spec.base[i] = Complex(base[i][0].get<double>(), base[i][1].get<double>());
  }
  for (const auto& u : j["unitaries"])
    spec.unitaries.push_back(matrix_from_json(u, "pbit unitary"));
  return spec;
}

int cmd_example(const ExampleArgs& args) {
  MultipartiteState state;
  if (args.name == "ghz") {
    state = example_ghz(args.m, args.d);
  } else if (args.name == "against-co") {
    state = example_against_co(args.d, args.k);
  } else if (args.name == "against-co-pure") {
    state = example_against_co_pure(args.d, args.k);
  } else if (args.name == "pbit") {
    state = args.pbit_spec_file.empty()
                ? example_pbit(example_pbit_default())
                : example_pbit(
                      pbit_spec_from_json(load_json_file(args.pbit_spec_file)));
  } else if (args.name == "random") {
    if (!args.seed_set) throw InputError("random example needs --seed");
    DimProfile profile;
    int index = 1;
    for (const auto& token : split_labels(args.dims)) {
      profile.dims.push_back(std::stoi(token));
      profile.labels.push_back("A" + std::to_string(index++));
    }
    if (profile.dims.empty()) throw InputError("random example needs --dims");
    state = random_state(profile, args.rank, args.seed);
  } else {
    throw InputError("unknown example '" + args.name + "'");
  }
  if (args.out.empty()) throw InputError("example needs --out");
  save_json_file(args.out, state_to_json(state));
  // Written files must re-validate.
  state_from_json(load_json_file(args.out));
  std::cout << "wrote " << args.out << " (dim " << state.matrix.rows() << ")\n";
  return 0;
}

struct ValidateArgs {
  std::string state_file, instrument_file, spec_file, report_file, schema;
};

int cmd_validate(const ValidateArgs& args) {
  int given = !args.state_file.empty() + !args.instrument_file.empty() +
              !args.spec_file.empty() + !args.report_file.empty();
  if (given != 1)
    throw InputError("validate needs exactly one of --state, --instrument, "
                     "--spec, --report");
  if (!args.state_file.empty()) {
    Json j = load_json_file(args.state_file);
    auto violations = schema_violations(
        j, load_json_file(schema_dir() + "/state.schema.json"));
    for (const auto& v : violations) std::cerr << v << "\n";
    if (!violations.empty()) throw InputError("schema validation failed");
    state_from_json(j);
    std::cout << "valid state\n";
  } else if (!args.instrument_file.empty()) {
    Json j = load_json_file(args.instrument_file);
    auto violations = schema_violations(
        j, load_json_file(schema_dir() + "/instrument.schema.json"));
    for (const auto& v : violations) std::cerr << v << "\n";
    if (!violations.empty()) throw InputError("schema validation failed");
    instrument_from_json(j);
    std::cout << "valid instrument\n";
  } else if (!args.spec_file.empty()) {
    Json j = load_json_file(args.spec_file);
    auto violations = schema_violations(
        j, load_json_file(schema_dir() + "/protocol_spec.schema.json"));
    for (const auto& v : violations) std::cerr << v << "\n";
    if (!violations.empty()) throw InputError("schema validation failed");
    std::string dir = std::filesystem::path(args.spec_file).parent_path().string();
    protocol_file_from_json(j, dir);
    std::cout << "valid protocol spec\n";
  } else {
    if (args.schema.empty())
      throw InputError("--report needs --schema <name>");
    Json j = load_json_file(args.report_file);
    Json schema =
        load_json_file(schema_dir() + "/" + args.schema + ".schema.json");
    auto violations = schema_violations(j, schema);
    for (const auto& v : violations) std::cerr << v << "\n";
    if (!violations.empty()) throw InputError("schema validation failed");
    std::cout << "valid " << args.schema << "\n";
  }
  return 0;
}

struct EntropyArgs {
  std::string state_file;
  std::string subsystems;
  std::string given;
  bool json = false;
};

int cmd_entropy(const EntropyArgs& args) {
  MultipartiteState state = state_from_json(load_json_file(args.state_file));
  auto to_indices = [&](const std::string& csv) {
    std::vector<int> out;
    for (const auto& label : split_labels(csv)) {
      int index = state.profile.index_of(label);
      if (index < 0) throw InputError("unknown subsystem label '" + label + "'");
      out.push_back(index);
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  double value = 0.0;
  if (!args.given.empty()) {
    if (args.subsystems.empty())
      throw InputError("--given needs --subsystems");
    value = conditional_entropy(state.matrix, state.profile,
                                to_indices(args.subsystems),
                                to_indices(args.given));
  } else if (!args.subsystems.empty()) {
    value = von_neumann_entropy(
        partial_trace(state.matrix, state.profile, to_indices(args.subsystems)));
  } else {
    value = von_neumann_entropy(state.matrix);
  }
  if (args.json) {
    Json j;
    j["entropy_bits"] = value;
    if (!args.subsystems.empty()) j["subsystems"] = split_labels(args.subsystems);
    if (!args.given.empty()) j["given"] = split_labels(args.given);
    std::cout << j.dump(1) << "\n";
  } else {
    std::cout << fmt6(value) << " bits\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conference-key and GHZ distillation rate toolkit"};
  app.require_subcommand(1);

  RatesArgs rates_args;
  auto* rates = app.add_subcommand("rates", "rate formulas on a state");
  rates->add_option("--state", rates_args.state_file, "state JSON file")->required();
  rates->add_option("--instrument", rates_args.instrument_files,
                    "instrument JSON file (repeat per party)");
  rates->add_option("--povm", rates_args.instrument_files,
                    "alias for --instrument");
  rates->add_option("--theorem", rates_args.theorem,
                    "one of key-cq, key-c, ghz-cq, ghz-c")->required();
  rates->add_option("--j", rates_args.j, "distinguished player (1-based)");
  rates->add_flag("--json", rates_args.json, "emit the JSON report");

  GhzArgs ghz_args;
  auto* ghz = app.add_subcommand("ghz", "GHZ distillation rates");
  ghz->add_option("--state", ghz_args.state_file, "state JSON file");
  ghz->add_option("--weights", ghz_args.weights_file,
                  "pairwise weight JSON file (tree method)");
  ghz->add_option("--method", ghz_args.method, "combing or tree")->required();
  ghz->add_flag("--json", ghz_args.json, "emit the JSON report");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "exact protocol simulation");
  simulate->add_option("--spec", sim_args.spec_file, "protocol spec JSON file");
  auto* seed_opt = simulate->add_option("--seed", sim_args.seed,
                                        "seed for binning and hashing");
  simulate->add_flag("--against-co", sim_args.against_co,
                     "run the direct protocol on the encrypted example");
  simulate->add_option("--d", sim_args.d, "key dimension (with --against-co)");
  simulate->add_option("--k", sim_args.k, "family size (with --against-co)");
  simulate->add_flag("--json", sim_args.json, "emit the JSON report");

  ExampleArgs example_args;
  auto* example = app.add_subcommand("example", "write a named example state");
  example->add_option("name", example_args.name,
                      "ghz | against-co | against-co-pure | pbit | random")
      ->required();
  example->add_option("--m", example_args.m, "party count (ghz)");
  example->add_option("--d", example_args.d, "local dimension");
  example->add_option("--k", example_args.k, "unitary family size");
  example->add_option("--dims", example_args.dims,
                      "comma-separated dims (random)");
  example->add_option("--rank", example_args.rank, "rank (random)");
  auto* ex_seed = example->add_option("--seed", example_args.seed, "seed (random)");
  example->add_option("--pbit-spec", example_args.pbit_spec_file,
                      "custom shield family JSON (pbit)");
  example->add_option("--out", example_args.out, "output path")->required();

  ValidateArgs validate_args;
  auto* validate = app.add_subcommand("validate", "validate files and reports");
  validate->add_option("--state", validate_args.state_file, "state file");
  validate->add_option("--instrument", validate_args.instrument_file,
                       "instrument file");
  validate->add_option("--spec", validate_args.spec_file, "protocol spec file");
  validate->add_option("--report", validate_args.report_file, "report file");
  validate->add_option("--schema", validate_args.schema,
                       "schema name for --report (e.g. rate_report)");

  EntropyArgs entropy_args;
  auto* entropy = app.add_subcommand("entropy", "entropies of a state");
  entropy->add_option("--state", entropy_args.state_file, "state JSON file")
      ->required();
  entropy->add_option("--subsystems", entropy_args.subsystems,
                      "comma-separated labels to keep");
  entropy->add_option("--given", entropy_args.given,
                      "comma-separated conditioning labels");
  entropy->add_flag("--json", entropy_args.json, "emit the JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    sim_args.seed_set = seed_opt->count() > 0;
    example_args.seed_set = ex_seed->count() > 0;
    if (rates->parsed()) return cmd_rates(rates_args);
    if (ghz->parsed()) return cmd_ghz(ghz_args);
    if (simulate->parsed()) return cmd_simulate(sim_args);
    if (example->parsed()) return cmd_example(example_args);
    if (validate->parsed()) return cmd_validate(validate_args);
    if (entropy->parsed()) return cmd_entropy(entropy_args);
    return 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const std::bad_alloc&) {
    std::cerr << "budget exceeded: allocation failure\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
