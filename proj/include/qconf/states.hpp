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

// Multipartite state and instrument data model, classical-quantum state
// construction, purification and the library of named example states.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qconf/linalg.hpp"
#include "qconf/rng.hpp"

namespace qconf {

/// Density operator with a subsystem profile. `eve_index`, when present,
/// designates the subsystem held by the eavesdropper.
struct MultipartiteState {
  ComplexMatrix matrix;
  DimProfile profile;
  std::optional<int> eve_index;

  /// Hermitian within 1e-9, PSD within the eigenvalue clamp, trace within
  /// 1e-9 of 1, profile consistent, eve_index in range. Throws InputError.
  void validate() const;

  bool has_eve() const { return eve_index.has_value(); }
  /// Subsystem indices of the legitimate parties, in profile order.
  std::vector<int> party_subsystems() const;
  int party_count() const { return static_cast<int>(party_subsystems().size()); }
  /// Reduced state on the parties only (Eve traced out), with its profile.
  MultipartiteState parties_only() const;
  /// Global purity check: largest eigenvalue within tol of 1.
  bool is_pure(double tol = 1e-9) const;

  /// State with subsystems rearranged; order[p] = original subsystem placed
  /// at position p. eve_index is tracked through the permutation.
  MultipartiteState permuted(const std::vector<int>& order) const;
};

struct InstrumentBranch {
  std::string outcome;
  std::vector<ComplexMatrix> kraus;  // each out_dim x in_dim
};

/// Per-party list of labelled completely positive branches. The branches
/// must be trace-preserving in total: sum_x sum_k E^dag E = 1 within 1e-8.
struct Instrument {
  std::string party;
  std::vector<InstrumentBranch> branches;

  int input_dim() const;
  int output_dim() const;
  int outcome_count() const { return static_cast<int>(branches.size()); }
  bool is_pure() const;  // exactly one Kraus operator per branch
  bool is_povm() const;  // scalar (1-dimensional) output on every branch
  void validate() const;
  Instrument with_party(const std::string& label) const;

  /// Destructive computational-basis measurement: branch x holds the single
  /// row <x|. Both pure and POVM-type.
  static Instrument computational_basis(const std::string& party, int dim);
  /// Destructive measurement of a general POVM {M_x}: branch x holds the
  /// rows <k| sqrt(M_x) over the support of M_x, so the residual output is
  /// trivial and the branch weight is Tr(M_x rho).
  static Instrument from_povm(const std::string& party,
                              const std::vector<ComplexMatrix>& elements,
                              const std::vector<std::string>& outcomes = {});
  /// Identity instrument: one branch, identity Kraus (keeps the system).
  static Instrument trivial(const std::string& party, int dim);
};

/// Classical joint distribution over outcome tuples with attached residual
/// quantum operators on A'_1 x ... x A'_m x E. Weights are subnormalized;
/// tuples with trace <= 1e-12 are not stored (probability zero).
struct CqState {
  std::vector<std::vector<std::string>> outcome_alphabets;  // per party
  DimProfile residual_profile;  // m residual systems then "E" last
  std::map<std::vector<int>, ComplexMatrix> weights;

  int parties() const { return static_cast<int>(outcome_alphabets.size()); }
  int eve_system() const { return residual_profile.count() - 1; }
  long long tuple_count() const;
  double probability(const std::vector<int>& tuple) const;
  double total_trace() const;
  /// Partial trace of one weight onto the given residual systems (sorted).
  ComplexMatrix residual(const std::vector<int>& tuple,
                         const std::vector<int>& keep_systems) const;
  /// Total trace 1 within 1e-8 and every weight PSD within clamp.
  void validate() const;
};

/// Applies one instrument per legitimate party (profile order) and the
/// identity on Eve. The weight of tuple x is the joint Kraus action on rho;
/// the weights sum to a unit-trace operator.
CqState apply_instruments(const MultipartiteState& rho,
                          const std::vector<Instrument>& instruments);

/// Appends an environment subsystem of dimension rank(rho) carrying a
/// purification; the appended subsystem becomes Eve. Tracing it out
/// recovers the input within 1e-8.
MultipartiteState purify(const MultipartiteState& rho);

/// Pure global state with a designated Eve/environment: returns the input
/// unchanged when it is already pure with an Eve subsystem; otherwise
/// purifies, merging any pre-existing Eve subsystem into the environment.
MultipartiteState ensure_purified(const MultipartiteState& rho);

/// Uniform superposition of |i>^(x m), i < d, as a density operator.
MultipartiteState example_ghz(int m, int d);

/// Default encryption family for the correlated-encryption examples:
/// powers of the Fourier matrix, family[j] = QFT_d^j (so I, QFT_d, ...).
std::vector<ComplexMatrix> default_unitary_family(int d, int k);

/// Three players holding (encrypted d-dim register, k-dim label register)
/// and an eavesdropper holding the three labels:
///   rho = (1/(d k^3)) sum_{x,a,b,c} (U_a|x><x|U_a^dag (x) |b><b|)^A
///         (x) (U_b|x><x|U_b^dag (x) |c><c|)^B
///         (x) (U_c|x><x|U_c^dag (x) |a><a|)^C (x) |abc><abc|^E.
MultipartiteState example_against_co(
    int d, int k, const std::vector<ComplexMatrix>& unitary_family = {});

/// Pure coherent version: the same construction as a global superposition
/// over (x, a, b, c) on the three players, with no Eve system.
MultipartiteState example_against_co_pure(
    int d, int k, const std::vector<ComplexMatrix>& unitary_family = {});

struct PbitSpec {
  int d = 2;                           // key alphabet
  std::vector<int> shield_dims;        // per player
  int eve_dim = 1;
  ComplexVector base;                  // |psi0> on shields (x) E
  std::vector<ComplexMatrix> unitaries;  // d operators on the joint shields
};

/// Private-bit state (1/sqrt d) sum_x |x...x> (x) (U_x (x) 1)|psi0>, grouped
/// so party j holds (key register X_j, shield B_j) and Eve holds E. The
/// defining invariant, identical Eve marginals for every x, is checked at
/// construction (deviation > 1e-8 raises InputError).
MultipartiteState example_pbit(const PbitSpec& spec);

/// The shipped two-player, d=2 instance: qubit shields, a qubit Eve
/// entangled with the shields, U_0 = 1 and U_1 = CZ on the shields.
PbitSpec example_pbit_default();

/// Deterministic pseudo-random density operator of the requested rank.
MultipartiteState random_state(const DimProfile& profile, int rank,
                               std::uint64_t seed);

/// Haar-like random unitary from QR of a Gaussian matrix (seeded stream).
ComplexMatrix random_unitary(int dim, Rng& rng);

}  // namespace qconf
