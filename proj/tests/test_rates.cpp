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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "qconf/errors.hpp"
#include "qconf/rates.hpp"

using namespace qconf;

namespace {

double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

MultipartiteState classical_corr_bit(bool with_eve_copy = false) {
  MultipartiteState s;
  if (!with_eve_copy) {
    s.matrix = 0.5 * (basis_projector(4, 0) + basis_projector(4, 3));
    s.profile.dims = {2, 2};
    s.profile.labels = {"A1", "A2"};
  } else {
    s.matrix = 0.5 * (basis_projector(8, 0) + basis_projector(8, 7));
    s.profile.dims = {2, 2, 2};
    s.profile.labels = {"A1", "A2", "E"};
    s.eve_index = 2;
  }
  return s;
}

MultipartiteState independent_bits() {
  MultipartiteState s;
  s.matrix = 0.25 * identity_matrix(4);
  s.profile.dims = {2, 2};
  s.profile.labels = {"A1", "A2"};
  return s;
}

std::vector<Instrument> basis_instruments(const MultipartiteState& s) {
  std::vector<Instrument> out;
  for (int p : s.party_subsystems())
    out.push_back(Instrument::computational_basis(s.profile.labels[p],
                                                  s.profile.dims[p]));
  return out;
}

RateConstraint make_constraint(std::vector<int> players, double bound) {
  RateConstraint c;
  c.players = std::move(players);
  c.bound = bound;
  return c;
}

/// Brute-force LP oracle: enumerate intersections of m hyperplanes drawn
/// from the constraint planes and the axes, keep the feasible ones, and
/// take the smallest coordinate sum.
double vertex_enumeration_min_sum(const std::vector<RateConstraint>& cons,
                                  int m) {
  std::vector<Eigen::RowVectorXd> normals;
  std::vector<double> rhs;
  for (const auto& c : cons) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m);
    for (int i : c.players) row[i] = 1.0;
    normals.push_back(row);
    rhs.push_back(c.bound);
  }
  for (int i = 0; i < m; ++i) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m);
    row[i] = 1.0;
    normals.push_back(row);
    rhs.push_back(0.0);
  }

  const int total = static_cast<int>(normals.size());
  std::vector<int> pick(m);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int, int)> recurse = [&](int start, int depth) {
    if (depth == m) {
      Eigen::MatrixXd a(m, m);
      Eigen::VectorXd b(m);
      for (int r = 0; r < m; ++r) {
        a.row(r) = normals[pick[r]];
        b[r] = rhs[pick[r]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (!lu.isInvertible()) return;
      Eigen::VectorXd x = lu.solve(b);
      for (int i = 0; i < m; ++i)
        if (x[i] < -1e-9) return;
      for (size_t c = 0; c < cons.size(); ++c)
        if (normals[c].dot(x) < rhs[c] - 1e-9) return;
      best = std::min(best, x.sum());
      return;
    }
    for (int i = start; i < total; ++i) {
      pick[depth] = i;
      recurse(i + 1, depth + 1);
    }
  };
  recurse(0, 0);
  return best;
}

/// All labelled spanning trees on m vertices (Pruefer decoding).
std::vector<std::vector<std::pair<int, int>>> all_spanning_trees(int m) {
  std::vector<std::vector<std::pair<int, int>>> trees;
  if (m == 2) {
    trees.push_back({{0, 1}});
    return trees;
  }
  std::vector<int> seq(m - 2, 0);
  while (true) {
    std::vector<int> degree(m, 1);
    for (int v : seq) ++degree[v];
    std::vector<std::pair<int, int>> edges;
    std::vector<int> work = seq;
    std::vector<bool> used(m, false);
    for (int v : work) {
      for (int u = 0; u < m; ++u) {
        if (!used[u] && degree[u] == 1) {
          edges.emplace_back(std::min(u, v), std::max(u, v));
          used[u] = true;
          --degree[v];
          break;
        }
      }
    }
    std::vector<int> leftover;
    for (int u = 0; u < m; ++u)
      if (!used[u] && degree[u] == 1) leftover.push_back(u);
    edges.emplace_back(leftover[0], leftover[1]);
    trees.push_back(edges);

    int pos = m - 3;
    while (pos >= 0) {
      if (++seq[pos] < m) break;
      seq[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return trees;
}

}  // namespace

TEST_CASE("classical omniscience constraints") {
  JointDistribution corr;
  corr.sizes = {2, 2};
  corr.p = {0.5, 0.0, 0.0, 0.5};
  auto cons = co_constraints_c(corr);
  REQUIRE(cons.size() == 2);
  CHECK(cons[0].bound == doctest::Approx(0.0));
  CHECK(cons[1].bound == doctest::Approx(0.0));

  JointDistribution indep;
  indep.sizes = {2, 2};
  indep.p = {0.25, 0.25, 0.25, 0.25};
  cons = co_constraints_c(indep);
  for (const auto& c : cons) CHECK(c.bound == doctest::Approx(1.0));

  // X1 = X2 uniform, X3 independent uniform.
  JointDistribution three;
  three.sizes = {2, 2, 2};
  three.p.assign(8, 0.0);
  three.p[0] = three.p[1] = 0.25;  // 000, 001
  three.p[6] = three.p[7] = 0.25;  // 110, 111
  cons = co_constraints_c(three);
  for (const auto& c : cons) {
    if (c.players == std::vector<int>{2}) CHECK(c.bound == doctest::Approx(1.0));
    if (c.players == std::vector<int>{0}) CHECK(c.bound == doctest::Approx(0.0));
  }

  JointDistribution broken = corr;
  broken.p[0] = 0.4;
  CHECK_THROWS_AS(co_constraints_c(broken), InputError);
}

TEST_CASE("cq omniscience constraints reduce to Shannon bounds") {
  CqState cq = apply_instruments(classical_corr_bit(),
                                 basis_instruments(classical_corr_bit()));
  auto cons = co_constraints_cq(cq);
  REQUIRE(cons.size() == 2);  // per player: one nonempty subset of the other
  for (const auto& c : cons) CHECK(c.bound == doctest::Approx(0.0));

  CqState ind = apply_instruments(independent_bits(),
                                  basis_instruments(independent_bits()));
  for (const auto& c : co_constraints_cq(ind))
    CHECK(c.bound == doctest::Approx(1.0));

  MultipartiteState ghz = example_ghz(3, 2);
  CqState cg = apply_instruments(ghz, basis_instruments(ghz));
  for (const auto& c : co_constraints_cq(cg))
    CHECK(c.bound == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("minimum sum rate: closed forms") {
  RateRegion empty = min_sum_rate({make_constraint({0}, -0.3),
                                   make_constraint({1}, 0.0)},
                                  2);
  CHECK(empty.optimum->sum == doctest::Approx(0.0));
  CHECK(empty.optimum->rates[0] == doctest::Approx(0.0));
  CHECK(empty.optimum->rates[1] == doctest::Approx(0.0));

  RateRegion indep = min_sum_rate({make_constraint({0}, 1.0),
                                   make_constraint({1}, 1.0)},
                                  2);
  CHECK(indep.optimum->sum == doctest::Approx(2.0));

  // Doubly symmetric binary source with crossover 0.11.
  JointDistribution dsbs;
  dsbs.sizes = {2, 2};
  dsbs.p = {0.445, 0.055, 0.055, 0.445};
  RateRegion region = min_sum_rate(co_constraints_c(dsbs), 2);
  CHECK(region.optimum->sum ==
        doctest::Approx(2.0 * binary_entropy(0.11)).epsilon(1e-9));

  // Degenerate optimal face: the tie-break picks the lexicographically
  // smallest vertex of the segment (0,2)-(2,0).
  RateRegion face = min_sum_rate({make_constraint({0, 1}, 2.0)}, 2);
  CHECK(face.optimum->sum == doctest::Approx(2.0));
  CHECK(face.optimum->rates[0] == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(face.optimum->rates[1] == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("party-count budgets on the constraint generators") {
  CqState wide;
  wide.outcome_alphabets.assign(11, {"0"});
  for (int j = 0; j < 11; ++j) {
    wide.residual_profile.dims.push_back(1);
    wide.residual_profile.labels.push_back("A" + std::to_string(j + 1) + "'");
  }
  wide.residual_profile.dims.push_back(1);
  wide.residual_profile.labels.push_back("E");
  wide.weights[std::vector<int>(11, 0)] = ComplexMatrix::Ones(1, 1);
  CHECK_THROWS_AS(co_constraints_cq(wide), BudgetError);

  JointDistribution wide_joint;
  wide_joint.sizes.assign(17, 1);
  wide_joint.p = {1.0};
  CHECK_THROWS_AS(co_constraints_c(wide_joint), BudgetError);

  MultipartiteState many;
  many.matrix = ComplexMatrix::Ones(1, 1);
  many.profile.dims.assign(17, 1);
  for (int s = 0; s < 17; ++s)
    many.profile.labels.push_back("A" + std::to_string(s + 1));
  CHECK_THROWS_AS(min_cut_coherent_information(many, 0, 1), BudgetError);
}

TEST_CASE("LP against vertex enumeration on seeded constraint sets") {
  Rng rng(24601);
  for (int trial = 0; trial < 50; ++trial) {
    int m = 2 + static_cast<int>(rng.next_below(3));  // 2..4
    int k = 2 + static_cast<int>(rng.next_below(9));
    std::vector<RateConstraint> cons;
    for (int c = 0; c < k; ++c) {
      std::vector<int> players;
      while (players.empty()) {
        players.clear();
        for (int i = 0; i < m; ++i)
          if (rng.next_below(2)) players.push_back(i);
      }
      cons.push_back(make_constraint(players, -0.5 + 3.5 * rng.next_double()));
    }
    RateRegion region = min_sum_rate(cons, m);
    const auto& rates = region.optimum->rates;
    // Feasibility of the returned vertex.
    for (const auto& c : cons) {
      double sum = 0.0;
      for (int i : c.players) sum += rates[i];
      CHECK(sum >= c.bound - 1e-7);
    }
    for (double r : rates) CHECK(r >= -1e-9);
    double enumerated = vertex_enumeration_min_sum(cons, m);
    if (m <= 3) {
      CHECK(region.optimum->sum == doctest::Approx(enumerated).epsilon(1e-7));
    }
    // Sharpness: a sum smaller by 1e-3 is infeasible.
    CHECK(enumerated >= region.optimum->sum - 1e-3);
  }
}

TEST_CASE("conference key rates with instruments") {
  RateReport corr = key_rate_cq(classical_corr_bit(),
                                basis_instruments(classical_corr_bit()));
  CHECK(corr.raw == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(corr.r_co == doctest::Approx(0.0));

  RateReport ind = key_rate_cq(independent_bits(),
                               basis_instruments(independent_bits()));
  CHECK(ind.secrecy_entropy == doctest::Approx(2.0));
  CHECK(ind.r_co == doctest::Approx(2.0));
  CHECK(ind.raw == doctest::Approx(0.0).epsilon(1e-9));

  MultipartiteState leaky = classical_corr_bit(true);
  RateReport eve_copy = key_rate_cq(leaky, basis_instruments(leaky));
  CHECK(eve_copy.secrecy_entropy == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(eve_copy.raw <= 1e-9);
  CHECK(eve_copy.clamped == doctest::Approx(0.0));
}

TEST_CASE("conference key rates with full measurements") {
  MultipartiteState leaky = classical_corr_bit(true);
  CHECK(key_rate_c(leaky, basis_instruments(leaky)).clamped ==
        doctest::Approx(0.0));
  CHECK(key_rate_c(classical_corr_bit(), basis_instruments(classical_corr_bit()))
            .raw == doctest::Approx(1.0));

  // POVM-type precondition.
  std::vector<Instrument> keep = {Instrument::trivial("A1", 2),
                                  Instrument::trivial("A2", 2)};
  CHECK_THROWS_WITH_AS(key_rate_c(classical_corr_bit(), keep),
                       doctest::Contains("nontrivial quantum output"),
                       InputError);
}

TEST_CASE("encrypted-example regression: omniscience forfeits secrecy") {
  // Frozen from a full numeric evaluation of the d=2, k=2 example with
  // computational-basis measurements on every full party. The pairwise
  // bounds H(X_i X_j | X_k) = 27/8 each force R_CO = (3/2)(27/8) = 81/16,
  // while S(X|E) = 19/8, so the raw value is -43/16.
  MultipartiteState rho = example_against_co(2, 2);
  std::vector<Instrument> basis;
  for (const auto& label : {"A", "B", "C"})
    basis.push_back(Instrument::computational_basis(label, 4));
  RateReport report = key_rate_c(rho, basis);
  CHECK(report.secrecy_entropy == doctest::Approx(2.375).epsilon(1e-10));
  CHECK(report.r_co == doctest::Approx(5.0625).epsilon(1e-10));
  CHECK(report.raw == doctest::Approx(-2.6875).epsilon(1e-10));
  // Far below the direct-protocol rate log2(2) = 1, and under the
  // measure-for-omniscience ceiling (1/2)log2(2) + 1 bookkeeping slack.
  CHECK(report.clamped <= 0.5 * std::log2(2.0) + 1.0);

  // d=2, k=1 with the identity family: no encryption, rate 1 bit.
  MultipartiteState plain = example_against_co(2, 1);
  std::vector<Instrument> basis2;
  for (const auto& label : {"A", "B", "C"})
    basis2.push_back(Instrument::computational_basis(label, 2));
  CHECK(key_rate_c(plain, basis2).raw == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("GHZ rates from coherent key protocols") {
  MultipartiteState ghz = example_ghz(3, 2);
  auto basis = basis_instruments(ghz);
  for (int j = 0; j < 3; ++j) {
    RateReport r = ghz_rate_cq(ghz, basis, j);
    CHECK(r.raw == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.distinguished_player == j);
  }
  CHECK(ghz_rate_cq_best(ghz, basis).raw == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(ghz_rate_c(ghz, basis).raw == doctest::Approx(1.0).epsilon(1e-9));

  // Eve's copy (through purification of a classical state) kills the rate.
  MultipartiteState leaky = classical_corr_bit(true);
  RateReport blocked = ghz_rate_cq(leaky, basis_instruments(leaky), 0);
  CHECK(blocked.raw <= 1e-9);

  // Maximally mixed three-qubit input: purification knows everything.
  MultipartiteState mixed;
  mixed.matrix = identity_matrix(8) / 8.0;
  mixed.profile.dims = {2, 2, 2};
  mixed.profile.labels = {"A1", "A2", "A3"};
  RateReport hopeless = ghz_rate_c(mixed, basis_instruments(mixed));
  CHECK(hopeless.raw <= 1e-9);
  CHECK(hopeless.clamped == doctest::Approx(0.0));

  // EPR with basis measurements recovers one EPR pair per copy.
  MultipartiteState epr = example_ghz(2, 2);
  CHECK(ghz_rate_c(epr, basis_instruments(epr)).raw ==
        doctest::Approx(1.0).epsilon(1e-9));

  // Asymmetric instruments: when one player keeps its register coherent,
  // the rate survives only for that distinguished player. Hand values:
  // S(X|E A'_2) = 0 and S(X|E A'_1) = 1, with R_CO = 0.
  std::vector<Instrument> mixed_io = {Instrument::computational_basis("A1", 2),
                                      Instrument::trivial("A2", 2)};
  CHECK(ghz_rate_cq(epr, mixed_io, 0).raw == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(ghz_rate_cq(epr, mixed_io, 1).raw == doctest::Approx(1.0).epsilon(1e-9));
  RateReport best = ghz_rate_cq_best(epr, mixed_io);
  CHECK(best.raw == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(best.distinguished_player == 1);

  // Preconditions: pure instruments / rank-one elements.
  std::vector<Instrument> impure = {
      Instrument::from_povm("A1", {0.5 * identity_matrix(2),
                                   0.5 * identity_matrix(2)}),
      Instrument::computational_basis("A2", 2)};
  CHECK_THROWS_WITH_AS(ghz_rate_cq(epr, impure, 0),
                       doctest::Contains("rank one"), InputError);
  CHECK_THROWS_WITH_AS(ghz_rate_c(epr, impure), doctest::Contains("rank one"),
                       InputError);
}

TEST_CASE("coherent protocols never beat the key rate") {
  Rng rng(555);
  for (int trial = 0; trial < 100; ++trial) {
    int m = 2 + static_cast<int>(rng.next_below(2));
    DimProfile profile;
    for (int p = 0; p < m; ++p) {
      profile.dims.push_back(2);
      profile.labels.push_back("A" + std::to_string(p + 1));
    }
    MultipartiteState rho =
        random_state(profile, 1 + static_cast<int>(rng.next_below(2)),
                     rng.next_u64());
    MultipartiteState psi = purify(rho);

    // Random pure instruments: two outcomes, residual dimension 1 or 2.
    std::vector<Instrument> instruments;
    for (int p = 0; p < m; ++p) {
      int d_out = 1 + static_cast<int>(rng.next_below(2));
      int total = d_out * 2;
      ComplexMatrix g(total, total);
      for (int r = 0; r < total; ++r)
        for (int c = 0; c < total; ++c)
          g(r, c) = Complex(rng.next_gaussian(), rng.next_gaussian());
      Eigen::HouseholderQR<ComplexMatrix> qr(g);
      ComplexMatrix isometry = ComplexMatrix(qr.householderQ()).leftCols(2);
      Instrument inst;
      inst.party = "A" + std::to_string(p + 1);
      for (int b = 0; b < 2; ++b) {
        InstrumentBranch branch;
        branch.outcome = std::to_string(b);
        branch.kraus.push_back(isometry.middleRows(b * d_out, d_out));
        inst.branches.push_back(std::move(branch));
      }
      instruments.push_back(std::move(inst));
    }

    int j = static_cast<int>(rng.next_below(m));
    RateReport ghz = ghz_rate_cq(psi, instruments, j);
    RateReport key = key_rate_cq(psi, instruments);
    CHECK(ghz.raw <= key.raw + 1e-8);
  }
}

TEST_CASE("min-cut coherent information and assistance bounds") {
  MultipartiteState epr = example_ghz(2, 2);
  CHECK(min_cut_coherent_information(epr, 0, 1) == doctest::Approx(1.0));

  MultipartiteState ghz = example_ghz(3, 2);
  CHECK(min_cut_coherent_information(ghz, 0, 1) == doctest::Approx(1.0));

  MultipartiteState product = independent_bits();
  CHECK(min_cut_coherent_information(product, 0, 1) <= 0.0);

  CHECK(eoa_lower_bound(epr, 0, 1).raw == doctest::Approx(1.0));
  for (auto [i, j] : {std::pair<int, int>{0, 1}, {0, 2}, {1, 2}})
    CHECK(eoa_lower_bound(ghz, i, j).clamped == doctest::Approx(1.0));
  EoaBound separable = eoa_lower_bound(product, 0, 1);
  CHECK(separable.raw <= 0.0);
  CHECK(separable.clamped == doctest::Approx(0.0));

  CHECK_THROWS_AS(min_cut_coherent_information(epr, 0, 0), InputError);
}

TEST_CASE("min-cut never exceeds the trivial-cut coherent information") {
  // The minimum ranges over a set containing the empty helper subset, so
  // it is bounded by I_c(A_i > A_rest).
  Rng rng(4242);
  DimProfile profile;
  profile.dims = {2, 2, 2};
  profile.labels = {"A1", "A2", "A3"};
  for (int trial = 0; trial < 25; ++trial) {
    MultipartiteState rho =
        random_state(profile, 1 + static_cast<int>(rng.next_below(8)),
                     rng.next_u64());
    for (int i = 0; i < 3; ++i) {
      std::vector<int> rest;
      for (int s = 0; s < 3; ++s)
        if (s != i) rest.push_back(s);
      double trivial_cut =
          coherent_information(rho.matrix, rho.profile, {i}, rest);
      for (int j = 0; j < 3; ++j) {
        if (j == i) continue;
        CHECK(min_cut_coherent_information(rho, i, j) <= trivial_cut + 1e-12);
      }
    }
  }
}

TEST_CASE("combing rate") {
  CombingResult ghz = combing_ghz_rate(example_ghz(3, 2));
  CHECK(ghz.raw == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(ghz.binding_subset.size() == 2);

  CombingResult epr = combing_ghz_rate(example_ghz(2, 2));
  CHECK(epr.raw == doctest::Approx(1.0));

  MultipartiteState mixed;
  mixed.matrix = identity_matrix(8) / 8.0;
  mixed.profile.dims = {2, 2, 2};
  mixed.profile.labels = {"A1", "A2", "A3"};
  CombingResult hopeless = combing_ghz_rate(mixed);
  CHECK(hopeless.raw < 0.0);
  CHECK(hopeless.clamped == doctest::Approx(0.0));
}

TEST_CASE("spanning-tree rate: closed forms and the enumeration oracle") {
  EdgeWeightGraph uniform(3);
  uniform.set(0, 1, 1.0);
  uniform.set(0, 2, 1.0);
  uniform.set(1, 2, 1.0);
  TreeResult flat = tree_ghz_rate(uniform);
  CHECK(flat.rate == doctest::Approx(0.5));

  EdgeWeightGraph triangle(3);
  triangle.set(0, 1, 2.0);
  triangle.set(0, 2, 2.0);
  triangle.set(1, 2, 1.0);
  TreeResult best = tree_ghz_rate(triangle);
  CHECK(best.rate == doctest::Approx(1.0));
  CHECK(best.tree == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}});

  EdgeWeightGraph star(3);
  star.set(0, 1, 1.0);
  TreeResult cut = tree_ghz_rate(star);
  CHECK(cut.rate == doctest::Approx(0.0));
  CHECK(cut.tree.empty());

  Rng rng(808);
  for (int m = 2; m <= 6; ++m) {
    for (int trial = 0; trial < 20; ++trial) {
      EdgeWeightGraph graph(m);
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
          double w = rng.next_below(5) == 0 ? 0.0 : 0.1 + 2.9 * rng.next_double();
          graph.set(i, j, w);
        }
      TreeResult got = tree_ghz_rate(graph);

      double best_rate = 0.0;
      std::set<std::vector<std::pair<int, int>>> argmax;
      for (auto& tree : all_spanning_trees(m)) {
        double cost = 0.0;
        bool valid = true;
        for (auto [a, b] : tree) {
          if (graph.weight(a, b) <= 0.0) {
            valid = false;
            break;
          }
          cost += 1.0 / graph.weight(a, b);
        }
        if (!valid) continue;
        double rate = 1.0 / cost;
        std::sort(tree.begin(), tree.end());
        if (rate > best_rate + 1e-12) {
          best_rate = rate;
          argmax = {tree};
        } else if (rate > best_rate - 1e-12) {
          argmax.insert(tree);
        }
      }
      CHECK(got.rate == doctest::Approx(best_rate).epsilon(1e-9));
      if (best_rate > 0.0) {
        std::vector<std::pair<int, int>> sorted = got.tree;
        std::sort(sorted.begin(), sorted.end());
        CHECK(argmax.count(sorted) == 1);
      } else {
        CHECK(got.tree.empty());
      }
    }
  }
}

TEST_CASE("tree rate from a state") {
  CHECK(tree_ghz_rate_from_state(example_ghz(3, 2)).rate ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(tree_ghz_rate_from_state(example_ghz(2, 2)).rate ==
        doctest::Approx(1.0));

  // EPR between the first two parties, third party detached.
  MultipartiteState epr_plus;
  epr_plus.matrix = kron(example_ghz(2, 2).matrix, basis_projector(2, 0));
  epr_plus.profile.dims = {2, 2, 2};
  epr_plus.profile.labels = {"A1", "A2", "A3"};
  TreeResult detached = tree_ghz_rate_from_state(epr_plus);
  CHECK(detached.rate == doctest::Approx(0.0));
  CHECK(detached.tree.empty());
}

TEST_CASE("exact classical min-entropy and its chain rule") {
  Eigen::MatrixXd uniform4(4, 1);
  uniform4.setConstant(0.25);
  CHECK(classical_min_entropy(uniform4) == doctest::Approx(2.0));

  Eigen::MatrixXd copies(2, 2);
  copies << 0.5, 0.0, 0.0, 0.5;
  CHECK(classical_min_entropy(copies) == doctest::Approx(0.0));

  Eigen::MatrixXd skewed(2, 2);
  skewed << 0.5, 0.0, 0.25, 0.25;
  CHECK(classical_min_entropy(skewed) ==
        doctest::Approx(-std::log2(0.75)).epsilon(1e-12));

  Eigen::MatrixXd broken(2, 1);
  broken << 0.5, 0.4;
  CHECK_THROWS_AS(classical_min_entropy(broken), InputError);

  // H_min(Z|YE) >= H_min(Z|E) - log|Y| on seeded classical triples.
  Rng rng(909);
  for (int trial = 0; trial < 100; ++trial) {
    int nz = 2 + static_cast<int>(rng.next_below(3));
    int ny = 2 + static_cast<int>(rng.next_below(3));
    int ne = 2 + static_cast<int>(rng.next_below(3));
    Eigen::MatrixXd with_y(nz, ny * ne);
    double total = 0.0;
    for (int z = 0; z < nz; ++z)
      for (int c = 0; c < ny * ne; ++c) {
        with_y(z, c) = rng.next_double();
        total += with_y(z, c);
      }
    with_y /= total;
    Eigen::MatrixXd without_y = Eigen::MatrixXd::Zero(nz, ne);
    for (int z = 0; z < nz; ++z)
      for (int y = 0; y < ny; ++y)
        for (int e = 0; e < ne; ++e) without_y(z, e) += with_y(z, y * ne + e);
    CHECK(classical_min_entropy(with_y) >=
          classical_min_entropy(without_y) - std::log2(double(ny)) - 1e-12);
  }
}

TEST_CASE("min-entropy rate of the i.i.d. test source approaches the entropy") {
  // Fixed three-outcome source: Z uniform on {0,1,2}, binary E with
  // p(e=1|z) = 0.52, 0.50, 0.48.
  Eigen::MatrixXd base(3, 2);
  base << 0.48 / 3, 0.52 / 3, 0.50 / 3, 0.50 / 3, 0.52 / 3, 0.48 / 3;
  double h_ze = 0.0;
  for (int z = 0; z < 3; ++z)
    for (int e = 0; e < 2; ++e) h_ze -= base(z, e) * std::log2(base(z, e));
  double conditional = h_ze - 1.0;  // H(E) = 1 by symmetry

  double previous = -1.0;
  Eigen::MatrixXd power = Eigen::MatrixXd::Ones(1, 1);
  for (int n = 1; n <= 8; ++n) {
    Eigen::MatrixXd next(power.rows() * 3, power.cols() * 2);
    for (int r = 0; r < power.rows(); ++r)
      for (int c = 0; c < power.cols(); ++c)
        next.block(r * 3, c * 2, 3, 2) = power(r, c) * base;
    power = std::move(next);
    double rate = classical_min_entropy(power) / n;
    CHECK(rate >= previous - 1e-12);  // nondecreasing toward S(Z|E)
    CHECK(rate <= conditional + 1e-12);
    previous = rate;
    if (n == 8) CHECK(std::abs(rate - conditional) <= 0.1);
  }
}

TEST_CASE("rates are invariant under subsystem relabeling") {
  Rng rng(111);
  DimProfile profile;
  profile.dims = {2, 2, 2};
  profile.labels = {"A1", "A2", "A3"};
  for (int trial = 0; trial < 10; ++trial) {
    MultipartiteState rho = random_state(profile, 2, rng.next_u64());
    MultipartiteState psi = purify(rho);
    auto basis = basis_instruments(psi);
    int j = static_cast<int>(rng.next_below(3));
    RateReport key = key_rate_cq(psi, basis);
    RateReport ghz = ghz_rate_cq(psi, basis, j);
    CombingResult comb = combing_ghz_rate(psi);

    std::vector<int> order = {2, 0, 1, 3};  // rotate parties, Eve stays last
    MultipartiteState moved = psi.permuted(order);
    std::vector<Instrument> moved_basis;
    for (int p = 0; p < 3; ++p) moved_basis.push_back(basis[order[p]]);
    int moved_j = 0;
    for (int p = 0; p < 3; ++p)
      if (order[p] == j) moved_j = p;

    CHECK(key_rate_cq(moved, moved_basis).raw ==
          doctest::Approx(key.raw).epsilon(1e-8));
    CHECK(ghz_rate_cq(moved, moved_basis, moved_j).raw ==
          doctest::Approx(ghz.raw).epsilon(1e-8));
    CHECK(combing_ghz_rate(moved).raw ==
          doctest::Approx(comb.raw).epsilon(1e-8));
  }
}
