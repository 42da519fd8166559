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

// Rate formulas: communication-for-omniscience constraint generation and
// its linear program, conference-key rates, GHZ distillation rates,
// min-cut coherent information, assisted-entanglement bounds, and exact
// classical min-entropy utilities.
//
// All rate outputs carry both the raw formula value (which may be
// negative, these are lower bounds) and a clamped-at-zero reading.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qconf/states.hpp"

namespace qconf {

/// One linear lower bound sum_{i in J} R_i >= bound (party indices 0-based).
struct RateConstraint {
  std::vector<int> players;                 // J, sorted, nonempty
  double bound = 0.0;                       // bits
  std::optional<int> conditioning_player;   // j for cq constraints
  std::string conditioning;                 // human-readable provenance
};

struct RateOptimum {
  std::vector<double> rates;  // lexicographically smallest optimal vertex
  double sum = 0.0;
};

struct RateRegion {
  int m = 0;
  std::vector<RateConstraint> constraints;
  std::optional<RateOptimum> optimum;
};

/// Pairwise assistance weights; missing edge means weight 0, weights >= 0.
struct EdgeWeightGraph {
  int m = 0;
  std::vector<std::vector<double>> weights;  // m x m symmetric, diag 0

  explicit EdgeWeightGraph(int parties = 0)
      : m(parties), weights(parties, std::vector<double>(parties, 0.0)) {}
  double weight(int i, int j) const { return weights[i][j]; }
  void set(int i, int j, double w);
};

struct RateReport {
  std::string theorem;  // "key-cq" | "key-c" | "ghz-cq" | "ghz-c"
  double raw = 0.0;
  double clamped = 0.0;
  double r_co = 0.0;
  double secrecy_entropy = 0.0;  // the conditional-entropy term
  std::vector<double> optimal_rates;
  std::vector<RateConstraint> binding_constraints;
  std::optional<int> distinguished_player;  // 0-based j, ghz-cq only
};

/// Omniscience constraints with quantum side information: for every player
/// j and every nonempty J subset of the other players, the bound is
/// S(X_J | X_rest, A'_j) on the given cq-state, computed blockwise over the
/// classical registers. Only nonempty J are emitted (the empty set yields
/// the vacuous bound 0 >= 0). Requires m <= 10.
std::vector<RateConstraint> co_constraints_cq(const CqState& cq);

/// Mixed-radix classical joint distribution over outcome tuples.
struct JointDistribution {
  std::vector<int> sizes;
  std::vector<double> p;  // indexed mixed-radix, first register most significant

  long long tuple_count() const;
  void validate() const;  // sizes consistent, normalized within 1e-9
};

/// Outcome distribution of a cq-state (residuals traced out).
JointDistribution classical_joint(const CqState& cq);

/// Classical omniscience constraints: one per nonempty proper subset I with
/// bound H(X_I | X_rest). Requires m <= 16.
std::vector<RateConstraint> co_constraints_c(const JointDistribution& joint);

/// Exact LP optimum of min sum R_j subject to the constraints and R >= 0.
/// Solved with a floating-point simplex (Bland's rule) on the dual, then
/// refined to the lexicographically smallest optimal vertex.
RateRegion min_sum_rate(const std::vector<RateConstraint>& constraints, int m);

/// Conference key rate with instruments: S(X|E) on the induced cq-state
/// minus the omniscience LP optimum over co_constraints_cq.
RateReport key_rate_cq(const MultipartiteState& rho,
                       const std::vector<Instrument>& instruments);

/// Full-measurement special case: all instruments must be POVM-type
/// (trivial residual); constraints come from the classical generator.
RateReport key_rate_c(const MultipartiteState& rho,
                      const std::vector<Instrument>& povms);

/// GHZ rate by making the key protocol coherent: S(X | E, A' of everyone
/// but j) minus the same omniscience optimum, on the purified input.
/// Every instrument must be pure (one Kraus operator per branch).
RateReport ghz_rate_cq(const MultipartiteState& rho,
                       const std::vector<Instrument>& instruments, int j);

/// Max over the distinguished player (ties resolved toward smaller j).
RateReport ghz_rate_cq_best(const MultipartiteState& rho,
                            const std::vector<Instrument>& instruments);

/// Rank-one-POVM special case on the purified input: S(X|E) - R_CO^c.
RateReport ghz_rate_c(const MultipartiteState& rho,
                      const std::vector<Instrument>& rank_one_povms);

/// min over J subset of [m]\{i,j} of I_c(A_i A_J > A_rest) on the
/// parties-only state (Eve, when present, is traced out). m <= 16.
double min_cut_coherent_information(const MultipartiteState& rho, int i, int j);

struct EoaBound {
  double raw = 0.0;
  double clamped = 0.0;
};

/// Identity-map lower bound on the assisted entanglement between i and j:
/// max of the two directed min-cut coherent informations. (The general
/// bound also optimizes over local preprocessing channels; only the
/// identity point is evaluated here, and reports label it as such.)
EoaBound eoa_lower_bound(const MultipartiteState& rho, int i, int j);

struct CombingResult {
  double raw = 0.0;
  double clamped = 0.0;
  int best_root = 0;              // 0-based
  std::vector<int> binding_subset;  // 0-based party indices
};

/// GHZ rate via entanglement combing: max over roots i of the min over
/// nonempty J avoiding i of I(A_J > A_rest)/|J|. Exhaustive enumeration;
/// ties resolved toward the smallest root and the first binding subset in
/// ascending bitmask order.
CombingResult combing_ghz_rate(const MultipartiteState& rho);

struct TreeResult {
  double rate = 0.0;
  std::vector<std::pair<int, int>> tree;  // edges (i<j), 0-based
};

/// GHZ rate over spanning trees: maximizing (sum 1/w_e)^-1 equals a
/// minimum spanning tree on reciprocal weights; zero-weight edges are
/// never selected. No finite spanning tree yields rate 0 and an empty
/// tree. Deterministic lexicographic tie-break on edges.
TreeResult tree_ghz_rate(const EdgeWeightGraph& graph);

/// Pairwise assistance weights from eoa_lower_bound (clamped at zero).
EdgeWeightGraph assistance_weight_graph(const MultipartiteState& rho);

TreeResult tree_ghz_rate_from_state(const MultipartiteState& rho);

/// Exact classical-classical conditional min-entropy
/// H_min(Z|E) = -log2 sum_e max_z p(z,e); rows index z, columns e.
double classical_min_entropy(const Eigen::MatrixXd& joint);

/// S(X_1...X_m | E) on a cq-state, blockwise.
double cq_entropy_given_eve(const CqState& cq);

/// S(X_1...X_m | E, all residuals except A'_j), blockwise.
double cq_entropy_given_eve_and_other_residuals(const CqState& cq, int j);

}  // namespace qconf
