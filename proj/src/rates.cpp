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

#include "qconf/rates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "qconf/budget.hpp"
#include "qconf/errors.hpp"

namespace qconf {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw InputError(msg);
}

std::string subset_to_string(const std::vector<int>& players) {
  std::string s = "{";
  for (size_t i = 0; i < players.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(players[i] + 1);
  }
  return s + "}";
}

// ---------------------------------------------------------------------------
// Linear programming: min c^T x  s.t.  A x >= b, x >= 0, with c >= 0.
//
// Solved through the dual max b^T y s.t. A^T y <= c, y >= 0, for which the
// all-slack basis is immediately feasible (c >= 0). Plain dense tableau
// simplex with Bland's rule, so termination is guaranteed; the duals stay
// tiny here (at most m rows).
// ---------------------------------------------------------------------------

constexpr double kPivotTol = 1e-9;

double lp_min_nonneg(const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                     const Eigen::VectorXd& b) {
  const int k = static_cast<int>(a.rows());  // primal constraints = dual vars
  const int m = static_cast<int>(a.cols());  // primal vars = dual constraints
  if (c.minCoeff() < 0.0)
    throw InternalError("lp_min_nonneg: objective must be nonnegative");
  if (k == 0) return 0.0;  // unconstrained beyond x >= 0; x = 0 is optimal

  const int ncols = k + m;
  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m + 1, ncols + 1);
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < k; ++j) tab(i, j) = a(j, i);  // A^T
    tab(i, k + i) = 1.0;
    tab(i, ncols) = c[i];
    basis[i] = k + i;
  }
  for (int j = 0; j < k; ++j) tab(m, j) = -b[j];

  for (long iter = 0;; ++iter) {
    if (iter > 200000)
      throw InternalError("lp_min_nonneg: iteration limit exceeded");
    int enter = -1;
    for (int j = 0; j < ncols; ++j) {
      if (tab(m, j) < -kPivotTol) {
        enter = j;
        break;  // Bland: smallest index
      }
    }
    if (enter < 0) break;  // optimal

    int leave_row = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      if (tab(i, enter) > kPivotTol) {
        double ratio = tab(i, ncols) / tab(i, enter);
        if (leave_row < 0 || ratio < best_ratio - kPivotTol ||
            (ratio < best_ratio + kPivotTol && basis[i] < basis[leave_row])) {
          leave_row = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave_row < 0)
      throw InternalError("lp_min_nonneg: dual unbounded (primal infeasible)");

    double pivot = tab(leave_row, enter);
    tab.row(leave_row) /= pivot;
    for (int i = 0; i <= m; ++i) {
      if (i == leave_row) continue;
      double factor = tab(i, enter);
      if (factor != 0.0) tab.row(i) -= factor * tab.row(leave_row);
    }
    basis[leave_row] = enter;
  }
  return tab(m, ncols);
}

}  // namespace

void EdgeWeightGraph::set(int i, int j, double w) {
  require(i >= 0 && j >= 0 && i < m && j < m && i != j,
          "EdgeWeightGraph: invalid edge");
  require(w >= 0.0, "EdgeWeightGraph: weights must be nonnegative");
  weights[i][j] = w;
  weights[j][i] = w;
}

long long JointDistribution::tuple_count() const {
  long long n = 1;
  for (int s : sizes) n *= s;
  return n;
}

void JointDistribution::validate() const {
  require(!sizes.empty(), "distribution: no registers");
  for (int s : sizes) require(s >= 1, "distribution: invalid register size");
  require(static_cast<long long>(p.size()) == tuple_count(),
          "distribution: probability vector length mismatch");
  double total = 0.0;
  for (double x : p) {
    require(x >= -1e-12, "distribution: negative probability");
    total += x;
  }
  require(std::abs(total - 1.0) <= 1e-9,
          "distribution not normalized: sum " + std::to_string(total));
}

JointDistribution classical_joint(const CqState& cq) {
  JointDistribution joint;
  for (const auto& a : cq.outcome_alphabets)
    joint.sizes.push_back(static_cast<int>(a.size()));
  joint.p.assign(static_cast<size_t>(joint.tuple_count()), 0.0);
  for (const auto& [tuple, w] : cq.weights) {
    long long index = 0;
    for (int j = 0; j < cq.parties(); ++j)
      index = index * joint.sizes[j] + tuple[j];
    joint.p[static_cast<size_t>(index)] = w.trace().real();
  }
  return joint;
}

namespace {

double shannon_entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log2(x);
  return h;
}

/// Entropy of the marginal on the registers selected by `mask`.
double marginal_entropy(const JointDistribution& joint, unsigned mask) {
  const int m = static_cast<int>(joint.sizes.size());
  std::map<std::vector<int>, double> grouped;
  const long long total = joint.tuple_count();
  for (long long index = 0; index < total; ++index) {
    double prob = joint.p[static_cast<size_t>(index)];
    if (prob <= 0.0) continue;
    std::vector<int> key;
    long long rest = index;
    for (int j = m - 1; j >= 0; --j) {
      int digit = static_cast<int>(rest % joint.sizes[j]);
      rest /= joint.sizes[j];
      if (mask & (1u << j)) key.push_back(digit);
    }
    grouped[key] += prob;
  }
  double h = 0.0;
  for (const auto& [key, prob] : grouped)
    if (prob > 0.0) h -= prob * std::log2(prob);
  return h;
}

}  // namespace

std::vector<RateConstraint> co_constraints_cq(const CqState& cq) {
  const int m = cq.parties();
  if (m > 10)
    throw BudgetError("co_constraints_cq: more than 10 parties (" +
                      std::to_string(m) + ")");

  std::vector<RateConstraint> out;
  for (int j = 0; j < m; ++j) {
    // Per-tuple residual on A'_j only; entropies of classical-quantum
    // block decompositions are sums of per-block entropies, so no joint
    // matrix over the classical registers is ever assembled.
    std::map<std::vector<int>, ComplexMatrix> blocks;
    double full_term = 0.0;
    for (const auto& [tuple, w] : cq.weights) {
      ComplexMatrix sigma = cq.residual(tuple, {j});
      full_term += subnormalized_entropy(sigma);
      blocks.emplace(tuple, std::move(sigma));
    }

    for (unsigned mask = 1; mask < (1u << m); ++mask) {
      if (mask & (1u << j)) continue;  // J must avoid the conditioning player
      std::map<std::vector<int>, ComplexMatrix> grouped;
      for (const auto& [tuple, sigma] : blocks) {
        std::vector<int> key;
        for (int i = 0; i < m; ++i)
          if (!(mask & (1u << i))) key.push_back(tuple[i]);
        auto [it, inserted] = grouped.emplace(key, sigma);
        if (!inserted) it->second += sigma;
      }
      double cond_term = 0.0;
      for (const auto& [key, sigma] : grouped)
        cond_term += subnormalized_entropy(sigma);

      RateConstraint c;
      for (int i = 0; i < m; ++i)
        if (mask & (1u << i)) c.players.push_back(i);
      c.bound = full_term - cond_term;
      c.conditioning_player = j;
      std::vector<int> rest;
      for (int i = 0; i < m; ++i)
        if (!(mask & (1u << i))) rest.push_back(i);
      c.conditioning =
          "S(X" + subset_to_string(c.players) + "|X" + subset_to_string(rest) +
          ",A'" + std::to_string(j + 1) + ")";
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<RateConstraint> co_constraints_c(const JointDistribution& joint) {
  joint.validate();
  const int m = static_cast<int>(joint.sizes.size());
  if (m > 16) throw BudgetError("co_constraints_c: more than 16 parties");

  double h_full = shannon_entropy(joint.p);
  const unsigned all = (1u << m) - 1;
  std::vector<RateConstraint> out;
  for (unsigned mask = 1; mask < all; ++mask) {  // nonempty proper subsets
    RateConstraint c;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) c.players.push_back(i);
    std::vector<int> rest;
    for (int i = 0; i < m; ++i)
      if (!(mask & (1u << i))) rest.push_back(i);
    c.bound = h_full - marginal_entropy(joint, all & ~mask);
    c.conditioning =
        "H(X" + subset_to_string(c.players) + "|X" + subset_to_string(rest) + ")";
    out.push_back(std::move(c));
  }
  return out;
}

RateRegion min_sum_rate(const std::vector<RateConstraint>& constraints, int m) {
  require(m >= 1, "min_sum_rate: need at least one party");
  for (const auto& c : constraints) {
    require(!c.players.empty(), "min_sum_rate: empty player set");
    require(std::isfinite(c.bound), "min_sum_rate: non-finite bound");
    for (int i : c.players)
      require(i >= 0 && i < m, "min_sum_rate: player index out of range");
  }

  const int k = static_cast<int>(constraints.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, m);
  Eigen::VectorXd b(k);
  for (int r = 0; r < k; ++r) {
    for (int i : constraints[r].players) a(r, i) = 1.0;
    b[r] = constraints[r].bound;
  }

  const double slack = 1e-9;
  double optimum = lp_min_nonneg(Eigen::VectorXd::Ones(m), a, b);

  // Lexicographically smallest optimal vertex: fix the optimal sum, then
  // minimize coordinates one at a time.
  Eigen::MatrixXd a_fix = a;
  Eigen::VectorXd b_fix = b;
  auto append_row = [&](const Eigen::RowVectorXd& row, double rhs) {
    a_fix.conservativeResize(a_fix.rows() + 1, Eigen::NoChange);
    a_fix.row(a_fix.rows() - 1) = row;
    b_fix.conservativeResize(b_fix.size() + 1);
    b_fix[b_fix.size() - 1] = rhs;
  };
  append_row(Eigen::RowVectorXd::Constant(m, -1.0), -(optimum + slack));

  std::vector<double> rates(m, 0.0);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd objective = Eigen::VectorXd::Zero(m);
    objective[i] = 1.0;
    rates[i] = std::max(0.0, lp_min_nonneg(objective, a_fix, b_fix));
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m);
    row[i] = -1.0;
    append_row(row, -(rates[i] + slack));
  }

  RateRegion region;
  region.m = m;
  region.constraints = constraints;
  region.optimum = RateOptimum{rates, optimum};
  return region;
}

double cq_entropy_given_eve(const CqState& cq) {
  const int eve = cq.eve_system();
  ComplexMatrix total;
  bool first = true;
  double blockwise = 0.0;
  for (const auto& [tuple, w] : cq.weights) {
    ComplexMatrix sigma = cq.residual(tuple, {eve});
    blockwise += subnormalized_entropy(sigma);
    if (first) {
      total = sigma;
      first = false;
    } else {
      total += sigma;
    }
  }
  if (first) throw InputError("cq-state has no support");
  return blockwise - subnormalized_entropy(total);
}

double cq_entropy_given_eve_and_other_residuals(const CqState& cq, int j) {
  require(j >= 0 && j < cq.parties(), "distinguished player out of range");
  std::vector<int> keep;
  for (int s = 0; s < cq.residual_profile.count(); ++s)
    if (s != j) keep.push_back(s);
  ComplexMatrix total;
  bool first = true;
  double blockwise = 0.0;
  for (const auto& [tuple, w] : cq.weights) {
    ComplexMatrix sigma = cq.residual(tuple, keep);
    blockwise += subnormalized_entropy(sigma);
    if (first) {
      total = sigma;
      first = false;
    } else {
      total += sigma;
    }
  }
  if (first) throw InputError("cq-state has no support");
  return blockwise - subnormalized_entropy(total);
}

namespace {

std::vector<RateConstraint> binding_of(const std::vector<RateConstraint>& cons,
                                       const std::vector<double>& rates,
                                       double tol = 1e-7) {
  std::vector<RateConstraint> out;
  for (const auto& c : cons) {
    double sum = 0.0;
    for (int i : c.players) sum += rates[i];
    if (std::abs(sum - c.bound) <= tol) out.push_back(c);
  }
  return out;
}

RateReport assemble_report(const std::string& theorem, double secrecy_entropy,
                           const std::vector<RateConstraint>& cons, int m) {
  RateRegion region = min_sum_rate(cons, m);
  RateReport report;
  report.theorem = theorem;
  report.secrecy_entropy = secrecy_entropy;
  report.r_co = region.optimum->sum;
  report.raw = secrecy_entropy - report.r_co;
  report.clamped = std::max(0.0, report.raw);
  report.optimal_rates = region.optimum->rates;
  report.binding_constraints = binding_of(cons, region.optimum->rates);
  return report;
}

}  // namespace

RateReport key_rate_cq(const MultipartiteState& rho,
                       const std::vector<Instrument>& instruments) {
  CqState cq = apply_instruments(rho, instruments);
  return assemble_report("key-cq", cq_entropy_given_eve(cq),
                         co_constraints_cq(cq), cq.parties());
}

RateReport key_rate_c(const MultipartiteState& rho,
                      const std::vector<Instrument>& povms) {
  for (const auto& inst : povms) {
    if (!inst.is_povm())
      throw InputError("instrument '" + inst.party +
                       "' has nontrivial quantum output (POVM-type required)");
  }
  CqState cq = apply_instruments(rho, povms);
  return assemble_report("key-c", cq_entropy_given_eve(cq),
                         co_constraints_c(classical_joint(cq)), cq.parties());
}

RateReport ghz_rate_cq(const MultipartiteState& rho,
                       const std::vector<Instrument>& instruments, int j) {
  for (const auto& inst : instruments) {
    if (!inst.is_pure())
      throw InputError("instrument branch not rank one (instrument '" +
                       inst.party + "')");
  }
  MultipartiteState psi = ensure_purified(rho);
  CqState cq = apply_instruments(psi, instruments);
  RateReport report =
      assemble_report("ghz-cq", cq_entropy_given_eve_and_other_residuals(cq, j),
                      co_constraints_cq(cq), cq.parties());
  report.distinguished_player = j;
  return report;
}

RateReport ghz_rate_cq_best(const MultipartiteState& rho,
                            const std::vector<Instrument>& instruments) {
  MultipartiteState psi = ensure_purified(rho);
  RateReport best;
  bool first = true;
  for (int j = 0; j < psi.party_count(); ++j) {
    RateReport r = ghz_rate_cq(psi, instruments, j);
    if (first || r.raw > best.raw + 1e-12) {
      best = r;
      first = false;
    }
  }
  return best;
}

RateReport ghz_rate_c(const MultipartiteState& rho,
                      const std::vector<Instrument>& rank_one_povms) {
  for (const auto& inst : rank_one_povms) {
    if (!inst.is_povm())
      throw InputError("instrument '" + inst.party +
                       "' has nontrivial quantum output (POVM-type required)");
    for (const auto& b : inst.branches) {
      ComplexMatrix element =
          ComplexMatrix::Zero(inst.input_dim(), inst.input_dim());
      for (const auto& e : b.kraus) element += e.adjoint() * e;
      RealVector values = hermitian_eigenvalues(element);
      if (values.size() >= 2 && values[1] > 1e-9)
        throw InputError("POVM element for outcome '" + b.outcome +
                         "' of instrument '" + inst.party +
                         "' is not rank one");
    }
  }
  MultipartiteState psi = ensure_purified(rho);
  CqState cq = apply_instruments(psi, rank_one_povms);
  return assemble_report("ghz-c", cq_entropy_given_eve(cq),
                         co_constraints_c(classical_joint(cq)), cq.parties());
}

double min_cut_coherent_information(const MultipartiteState& rho, int i, int j) {
  MultipartiteState parties = rho.parties_only();
  const int m = parties.profile.count();
  require(i != j, "min-cut: the two parties must differ");
  require(i >= 0 && i < m && j >= 0 && j < m, "min-cut: party out of range");
  if (m > 16) throw BudgetError("min-cut: more than 16 parties");

  double s_all = von_neumann_entropy(parties.matrix);
  std::vector<int> helpers;
  for (int s = 0; s < m; ++s)
    if (s != i && s != j) helpers.push_back(s);

  double best = 0.0;
  bool first = true;
  for (unsigned mask = 0; mask < (1u << helpers.size()); ++mask) {
    std::vector<int> left = {i};  // i together with the helper subset J
    for (size_t h = 0; h < helpers.size(); ++h)
      if (mask & (1u << h)) left.push_back(helpers[h]);
    std::sort(left.begin(), left.end());
    std::vector<int> target;  // [m] \ (J u {i}), always contains j
    for (int s = 0; s < m; ++s)
      if (!std::binary_search(left.begin(), left.end(), s)) target.push_back(s);
    double coherent =
        von_neumann_entropy(partial_trace(parties.matrix, parties.profile,
                                          target)) -
        s_all;
    if (first || coherent < best) {
      best = coherent;
      first = false;
    }
  }
  return best;
}

EoaBound eoa_lower_bound(const MultipartiteState& rho, int i, int j) {
  double forward = min_cut_coherent_information(rho, i, j);
  double backward = min_cut_coherent_information(rho, j, i);
  EoaBound out;
  out.raw = std::max(forward, backward);
  out.clamped = std::max(0.0, out.raw);
  return out;
}

CombingResult combing_ghz_rate(const MultipartiteState& rho) {
  MultipartiteState parties = rho.parties_only();
  const int m = parties.profile.count();
  require(m >= 2, "combing: need at least two parties");
  if (m > 16) throw BudgetError("combing: more than 16 parties");

  double s_all = von_neumann_entropy(parties.matrix);
  CombingResult result;
  bool first_root = true;
  for (int root = 0; root < m; ++root) {
    double root_min = 0.0;
    std::vector<int> root_binding;
    bool first_subset = true;
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
      if (mask & (1u << root)) continue;
      std::vector<int> complement;  // [m] \ J, contains the root
      std::vector<int> subset;
      for (int s = 0; s < m; ++s) {
        if (mask & (1u << s))
          subset.push_back(s);
        else
          complement.push_back(s);
      }
      double coherent =
          von_neumann_entropy(
              partial_trace(parties.matrix, parties.profile, complement)) -
          s_all;
      double value = coherent / static_cast<double>(subset.size());
      if (first_subset || value < root_min) {
        root_min = value;
        root_binding = subset;
        first_subset = false;
      }
    }
    if (first_root || root_min > result.raw) {
      result.raw = root_min;
      result.best_root = root;
      result.binding_subset = root_binding;
      first_root = false;
    }
  }
  result.clamped = std::max(0.0, result.raw);
  return result;
}

TreeResult tree_ghz_rate(const EdgeWeightGraph& graph) {
  require(graph.m >= 2, "tree rate: need at least two parties");
  struct Edge {
    double cost;
    int i, j;
  };
  std::vector<Edge> edges;
  for (int i = 0; i < graph.m; ++i)
    for (int j = i + 1; j < graph.m; ++j)
      if (graph.weight(i, j) > 0.0)
        edges.push_back({1.0 / graph.weight(i, j), i, j});
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  std::vector<int> parent(graph.m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  TreeResult result;
  double total_cost = 0.0;
  for (const Edge& e : edges) {
    int a = find(e.i), b = find(e.j);
    if (a == b) continue;
    parent[a] = b;
    result.tree.emplace_back(e.i, e.j);
    total_cost += e.cost;
    if (static_cast<int>(result.tree.size()) == graph.m - 1) break;
  }
  if (static_cast<int>(result.tree.size()) != graph.m - 1) {
    result.tree.clear();
    result.rate = 0.0;
  } else {
    result.rate = 1.0 / total_cost;
  }
  return result;
}

EdgeWeightGraph assistance_weight_graph(const MultipartiteState& rho) {
  MultipartiteState parties = rho.parties_only();
  const int m = parties.profile.count();
  EdgeWeightGraph graph(m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      graph.set(i, j, eoa_lower_bound(parties, i, j).clamped);
  return graph;
}

TreeResult tree_ghz_rate_from_state(const MultipartiteState& rho) {
  return tree_ghz_rate(assistance_weight_graph(rho));
}

double classical_min_entropy(const Eigen::MatrixXd& joint) {
  double total = 0.0;
  for (Eigen::Index z = 0; z < joint.rows(); ++z)
    for (Eigen::Index e = 0; e < joint.cols(); ++e) {
      require(joint(z, e) >= -1e-12, "min-entropy: negative probability");
      total += joint(z, e);
    }
  require(std::abs(total - 1.0) <= 1e-9,
          "min-entropy: distribution not normalized");
  double guess = 0.0;
  for (Eigen::Index e = 0; e < joint.cols(); ++e)
    guess += joint.col(e).maxCoeff();
  return -std::log2(guess);
}

}  // namespace qconf
