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

// Exact small-block simulation of the non-interactive key protocol:
// local measurement, random-binning broadcast, decoding, privacy
// amplification, and exact evaluation of reliability and secrecy.
//
// Everything is computed by full enumeration, never by sampling, so a
// rerun with the same seed is bit-identical. The simulator covers the
// subclass of protocols that apply the same per-copy instrument to every
// copy and broadcast a function of the outcome string; block-level
// instruments are not implemented.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qconf/rates.hpp"
#include "qconf/states.hpp"

namespace qconf {

enum class Decoder { ML, PGM };
enum class BinningMode { Random, Identity };
enum class HashMode { Seeded, Identity };

/// Per-party hash f_j from outcome strings (as mixed-radix indices, copy 0
/// most significant) to bin labels.
struct Binning {
  long long domain = 0;
  long long bins = 1;
  std::vector<long long> assignment;

  long long operator()(long long s) const { return assignment.at(s); }
  std::vector<std::vector<long long>> inverse() const;

  /// Each string mapped uniformly at random to a bin (seeded stream).
  static Binning random(long long domain, long long bins, Rng rng);
  /// Deterministic option: s mod bins (injective when bins >= domain).
  static Binning identity(long long domain, long long bins);
};

/// Per-party binnings with streams forked per party from one seed.
std::vector<Binning> random_binning(const std::vector<long long>& domains,
                                    const std::vector<long long>& bin_counts,
                                    std::uint64_t seed);

/// 2-universal hash ((a x + b) mod p) mod range over the Mersenne prime
/// p = 2^61 - 1 (which exceeds every tuple domain the budget admits),
/// with a, b drawn from a seeded stream; or the plain mod-range map.
class UniversalHash {
 public:
  static UniversalHash seeded(std::uint64_t seed, long long range);
  static UniversalHash identity(long long range);
  long long operator()(long long x) const;
  long long range() const { return range_; }

 private:
  std::uint64_t a_ = 1, b_ = 0;
  long long range_ = 1;
  bool identity_ = true;
};

struct ProtocolSpec {
  std::vector<Instrument> instruments;  // one per party
  int n = 1;                            // block length
  std::vector<long long> bin_counts;    // |L_j| per party
  std::vector<BinningMode> binning;     // empty = all Random
  long long key_size = 2;               // |K|
  HashMode hash = HashMode::Seeded;
  std::optional<std::uint64_t> seed;    // mandatory wherever randomness exists
  Decoder decoder = Decoder::ML;
};

/// n-fold source: outcome alphabet of n-tuples with product probabilities
/// and tensor-product Eve residuals (player residuals are traced out; the
/// joint-measurement decoder below works from the per-copy state instead).
CqState build_iid_source(const CqState& cq, int n);

/// One branch of the joint decoding distribution for a fixed true string.
struct DecodeOutcome {
  std::vector<long long> decoded;  // per player: full-tuple index decoded
  ComplexMatrix eve_op;  // subnormalized Eve operator on E^n for this branch
};

struct DecodeEntry {
  long long true_index = 0;           // tuple index of the source string
  std::vector<long long> bins;        // broadcast labels l_[m]
  std::vector<DecodeOutcome> outcomes;
};

struct DecodeResult {
  double success_probability = 0.0;  // every player recovers the true string
  int parties = 0;
  long long tuple_domain = 0;  // product of per-party string counts
  std::vector<DecodeEntry> entries;
};

/// Exact omniscience decoding over all outcome strings. ML: every player
/// picks the maximum-posterior candidate consistent with the received bins
/// and its own string (lexicographic tie-break), requiring classical side
/// information only. PGM: player j additionally holds its quantum residual
/// block A'_j^n and measures the pretty-good measurement over the
/// bin-consistent candidates; the joint outcome distribution is evaluated
/// on the joint residual state.
DecodeResult decode_omniscience(const CqState& base, int n,
                                const std::vector<Binning>& binnings,
                                Decoder decoder);

/// Final key-and-adversary state: subnormalized Eve blocks indexed by the
/// key values of all players and the broadcast labels. Total trace 1.
struct FinalKeyState {
  long long key_size = 1;
  std::map<std::pair<std::vector<long long>, std::vector<long long>>,
           ComplexMatrix>
      blocks;

  double total_trace() const;
  /// Pr[K_1 = ... = K_m].
  double all_keys_equal_probability() const;
};

/// Applies the key hash to every player's decoded string and aggregates
/// the Eve blocks; keys agree wherever decoding succeeded.
FinalKeyState privacy_amplify(const DecodeResult& decoded, long long key_size,
                              const UniversalHash& hash);

/// (1/2)|| Omega^{K1 L E} - u_{K1} (x) Omega^{L E} ||_1 computed blockwise
/// over the classical labels. The reference state is instantiated as the
/// actual key-averaged marginal, which overestimates the optimum over
/// constant states by at most a factor of 2.
double secrecy_distance(const FinalKeyState& final_state);

struct SimulationReport {
  double reliability = 0.0;           // Pr[K_1 = ... = K_m]
  double secrecy = 0.0;               // blockwise trace-distance figure
  double achieved_key_bits = 0.0;     // log2 |K| / n
  double transcript_rate_bits = 0.0;  // sum_j log2 |L_j| / n
  double decode_success = 0.0;        // all players recover the true string
  std::optional<double> predicted_key_rate;  // instrument-rate formula value
  std::uint64_t seed = 0;
  Decoder decoder = Decoder::ML;
  long long key_size = 1;
  int n = 1;
};

/// measure -> bin -> broadcast -> decode -> hash, with exact reliability
/// and secrecy, plus the formula rate of the same instruments for
/// comparison. The seed is mandatory when any stage is randomized.
SimulationReport run_protocol(const MultipartiteState& rho,
                              const ProtocolSpec& spec);

/// The bespoke protocol for the correlated-encryption example: each player
/// measures its label register and broadcasts; everyone undoes its local
/// encryption unitary and measures the encrypted register. Exact key state
/// against an eavesdropper holding the three labels and the transcript.
SimulationReport direct_against_co_protocol(
    int d, int k, const std::vector<ComplexMatrix>& unitary_family = {});

}  // namespace qconf
