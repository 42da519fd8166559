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

#include "qconf/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "qconf/budget.hpp"
#include "qconf/errors.hpp"

namespace qconf {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw InputError(msg);
}

constexpr double kWeightCutoff = 1e-12;

std::string fresh_label(const std::vector<std::string>& taken,
                        const std::string& base) {
  std::set<std::string> used(taken.begin(), taken.end());
  if (used.count(base) == 0) return base;
  for (int i = 2;; ++i) {
    std::string candidate = base + std::to_string(i);
    if (used.count(candidate) == 0) return candidate;
  }
}

ComplexMatrix outer(const ComplexVector& v) { return v * v.adjoint(); }

}  // namespace

void MultipartiteState::validate() const {
  require(matrix.rows() == matrix.cols(), "state matrix not square");
  profile.validate(matrix.rows());
  if (eve_index) {
    require(*eve_index >= 0 && *eve_index < profile.count(),
            "eve index out of range");
  }
  if (!is_hermitian(matrix)) throw InputError("state matrix not Hermitian");
  double trace = matrix.trace().real();
  require(std::abs(trace - 1.0) <= 1e-9,
          "state trace " + std::to_string(trace) + " deviates from 1");
  RealVector values = hermitian_eigenvalues(matrix);
  double min_value = values[values.size() - 1];
  if (min_value < -kEigenvalueClamp) {
    throw InputError("state has eigenvalue " + std::to_string(min_value) +
                     " below the PSD clamp");
  }
}

std::vector<int> MultipartiteState::party_subsystems() const {
  std::vector<int> out;
  for (int s = 0; s < profile.count(); ++s)
    if (!eve_index || s != *eve_index) out.push_back(s);
  return out;
}

MultipartiteState MultipartiteState::parties_only() const {
  if (!eve_index) return *this;
  std::vector<int> keep = party_subsystems();
  MultipartiteState out;
  out.matrix = partial_trace(matrix, profile, keep);
  out.profile = profile.keep(keep);
  return out;
}

bool MultipartiteState::is_pure(double tol) const {
  RealVector values = hermitian_eigenvalues(matrix);
  return std::abs(values[0] - 1.0) <= tol;
}

MultipartiteState MultipartiteState::permuted(const std::vector<int>& order) const {
  MultipartiteState out;
  out.matrix = permute_subsystems(matrix, profile, order);
  out.profile = profile.permuted(order);
  if (eve_index) {
    for (size_t p = 0; p < order.size(); ++p)
      if (order[p] == *eve_index) out.eve_index = static_cast<int>(p);
  }
  return out;
}

int Instrument::input_dim() const {
  require(!branches.empty() && !branches.front().kraus.empty(),
          "instrument '" + party + "' has no branches");
  return static_cast<int>(branches.front().kraus.front().cols());
}

int Instrument::output_dim() const {
  require(!branches.empty() && !branches.front().kraus.empty(),
          "instrument '" + party + "' has no branches");
  return static_cast<int>(branches.front().kraus.front().rows());
}

bool Instrument::is_pure() const {
  for (const auto& b : branches)
    if (b.kraus.size() != 1) return false;
  return true;
}

bool Instrument::is_povm() const { return output_dim() == 1; }

void Instrument::validate() const {
  require(!branches.empty(), "instrument '" + party + "' has no branches");
  const int in = input_dim();
  const int out = output_dim();
  std::set<std::string> outcomes;
  ComplexMatrix sum = ComplexMatrix::Zero(in, in);
  for (const auto& b : branches) {
    require(outcomes.insert(b.outcome).second,
            "instrument '" + party + "': duplicate outcome '" + b.outcome + "'");
    require(!b.kraus.empty(),
            "instrument '" + party + "': branch '" + b.outcome + "' empty");
    for (const auto& e : b.kraus) {
      require(e.cols() == in && e.rows() == out,
              "instrument '" + party + "': inconsistent Kraus dimensions");
      sum += e.adjoint() * e;
    }
  }
  double dev = (sum - identity_matrix(in)).cwiseAbs().maxCoeff();
  if (dev > 1e-8) {
    throw InputError("instrument '" + party + "' is not trace preserving: " +
                     "sum E^dag E deviates from identity by " +
                     std::to_string(dev));
  }
}

Instrument Instrument::with_party(const std::string& label) const {
  Instrument out = *this;
  out.party = label;
  return out;
}

Instrument Instrument::computational_basis(const std::string& party, int dim) {
  Instrument inst;
  inst.party = party;
  for (int x = 0; x < dim; ++x) {
    InstrumentBranch b;
    b.outcome = std::to_string(x);
    b.kraus.push_back(basis_vector(dim, x).adjoint());
    inst.branches.push_back(std::move(b));
  }
  return inst;
}

Instrument Instrument::from_povm(const std::string& party,
                                 const std::vector<ComplexMatrix>& elements,
                                 const std::vector<std::string>& outcomes) {
  require(!elements.empty(), "from_povm: no elements");
  require(outcomes.empty() || outcomes.size() == elements.size(),
          "from_povm: outcome label count mismatch");
  Instrument inst;
  inst.party = party;
  for (size_t x = 0; x < elements.size(); ++x) {
    InstrumentBranch b;
    b.outcome = outcomes.empty() ? std::to_string(x) : outcomes[x];
    EigenSystem es = hermitian_eigen(elements[x]);
    for (Eigen::Index i = 0; i < es.values.size(); ++i) {
      double lambda = es.values[i];
      if (lambda < -kEigenvalueClamp)
        throw InputError("from_povm: element not PSD");
      if (lambda > kWeightCutoff)
        b.kraus.push_back(std::sqrt(lambda) * es.vectors.col(i).adjoint());
    }
    if (b.kraus.empty())  // zero element: keep an explicit zero row
      b.kraus.push_back(ComplexMatrix::Zero(1, elements[x].rows()));
    inst.branches.push_back(std::move(b));
  }
  inst.validate();
  return inst;
}

Instrument Instrument::trivial(const std::string& party, int dim) {
  Instrument inst;
  inst.party = party;
  InstrumentBranch b;
  b.outcome = "0";
  b.kraus.push_back(identity_matrix(dim));
  inst.branches.push_back(std::move(b));
  return inst;
}

long long CqState::tuple_count() const {
  long long n = 1;
  for (const auto& a : outcome_alphabets) n *= static_cast<long long>(a.size());
  return n;
}

double CqState::probability(const std::vector<int>& tuple) const {
  auto it = weights.find(tuple);
  return it == weights.end() ? 0.0 : it->second.trace().real();
}

double CqState::total_trace() const {
  double t = 0.0;
  for (const auto& [tuple, w] : weights) t += w.trace().real();
  return t;
}

ComplexMatrix CqState::residual(const std::vector<int>& tuple,
                                const std::vector<int>& keep_systems) const {
  auto it = weights.find(tuple);
  if (it == weights.end())
    return ComplexMatrix::Zero(residual_profile.subset_dim(keep_systems),
                               residual_profile.subset_dim(keep_systems));
  return partial_trace(it->second, residual_profile, keep_systems);
}

void CqState::validate() const {
  double t = total_trace();
  require(std::abs(t - 1.0) <= 1e-8,
          "cq-state total trace " + std::to_string(t) + " deviates from 1");
  for (const auto& [tuple, w] : weights) {
    require(static_cast<int>(tuple.size()) == parties(),
            "cq-state tuple length mismatch");
    RealVector values = hermitian_eigenvalues(w);
    if (values[values.size() - 1] < -kEigenvalueClamp)
      throw InputError("cq-state weight not PSD within clamp");
  }
}

CqState apply_instruments(const MultipartiteState& rho,
                          const std::vector<Instrument>& instruments) {
  rho.validate();
  std::vector<int> parties = rho.party_subsystems();
  require(instruments.size() == parties.size(),
          "need exactly one instrument per non-Eve party (" +
              std::to_string(parties.size()) + " parties, " +
              std::to_string(instruments.size()) + " instruments)");

  // Canonical order: parties first (profile order), Eve last.
  std::vector<int> order = parties;
  int eve_dim = 1;
  if (rho.eve_index) {
    order.push_back(*rho.eve_index);
    eve_dim = rho.profile.dims[*rho.eve_index];
  }
  ComplexMatrix arranged = (order.size() == static_cast<size_t>(rho.profile.count()) &&
                            std::is_sorted(order.begin(), order.end()))
                               ? rho.matrix
                               : permute_subsystems(rho.matrix, rho.profile, order);

  const int m = static_cast<int>(parties.size());
  CqState cq;
  cq.outcome_alphabets.resize(m);
  long long out_dim_total = eve_dim;
  for (int j = 0; j < m; ++j) {
    const Instrument& inst = instruments[j];
    inst.validate();
    const std::string& expected = rho.profile.labels[parties[j]];
    require(inst.party == expected,
            "instrument for party '" + expected + "' is labelled '" +
                inst.party + "'");
    require(inst.input_dim() == rho.profile.dims[parties[j]],
            "instrument '" + inst.party + "' input dimension " +
                std::to_string(inst.input_dim()) + " does not match party (" +
                std::to_string(rho.profile.dims[parties[j]]) + ")");
    for (const auto& b : inst.branches)
      cq.outcome_alphabets[j].push_back(b.outcome);
    cq.residual_profile.dims.push_back(inst.output_dim());
    cq.residual_profile.labels.push_back(expected + "'");
    out_dim_total *= inst.output_dim();
  }
  check_dim(out_dim_total, "apply_instruments residual");
  cq.residual_profile.dims.push_back(eve_dim);
  cq.residual_profile.labels.push_back(
      fresh_label(cq.residual_profile.labels, "E"));

  // Enumerate outcome tuples (odometer over per-party branch indices).
  std::vector<int> tuple(m, 0);
  const ComplexMatrix eye_e = identity_matrix(eve_dim);
  while (true) {
    // weight = sum over Kraus combinations of (K (x) 1_E) rho (K (x) 1_E)^dag
    std::vector<size_t> kcombo(m, 0);
    ComplexMatrix weight;
    bool first = true;
    while (true) {
      ComplexMatrix joint = ComplexMatrix::Ones(1, 1);
      for (int j = 0; j < m; ++j)
        joint = kron(joint, instruments[j].branches[tuple[j]].kraus[kcombo[j]]);
      joint = kron(joint, eye_e);
      ComplexMatrix term = joint * arranged * joint.adjoint();
      if (first) {
        weight = term;
        first = false;
      } else {
        weight += term;
      }
      int pos = m - 1;
      while (pos >= 0) {
        if (++kcombo[pos] < instruments[pos].branches[tuple[pos]].kraus.size())
          break;
        kcombo[pos] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
    if (weight.trace().real() > kWeightCutoff) cq.weights[tuple] = weight;

    int pos = m - 1;
    while (pos >= 0) {
      if (++tuple[pos] < static_cast<int>(cq.outcome_alphabets[pos].size()))
        break;
      tuple[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }

  double t = cq.total_trace();
  if (std::abs(t - 1.0) > 1e-8)
    throw InternalError("apply_instruments: total trace " + std::to_string(t));
  return cq;
}

MultipartiteState purify(const MultipartiteState& rho) {
  rho.validate();
  EigenSystem es = hermitian_eigen(rho.matrix);
  int rank = 0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (es.values[i] > kWeightCutoff) ++rank;
  rank = std::max(rank, 1);

  const long long dim = rho.matrix.rows();
  check_dim(dim * rank, "purification");
  ComplexVector psi = ComplexVector::Zero(dim * rank);
  for (int i = 0; i < rank; ++i) {
    double amp = std::sqrt(std::max(es.values[i], 0.0));
    for (long long r = 0; r < dim; ++r)
      psi[r * rank + i] += amp * es.vectors(r, i);
  }

  MultipartiteState out;
  out.matrix = outer(psi);
  out.profile = rho.profile;
  out.profile.dims.push_back(rank);
  out.profile.labels.push_back(fresh_label(rho.profile.labels, "E"));
  out.eve_index = out.profile.count() - 1;
  return out;
}

MultipartiteState ensure_purified(const MultipartiteState& rho) {
  rho.validate();
  if (rho.eve_index && rho.is_pure(1e-9)) return rho;
  if (!rho.eve_index) return purify(rho);
  // Mixed state that already carries an Eve subsystem: move Eve last,
  // purify, and merge Eve with the fresh environment into one subsystem.
  std::vector<int> order = rho.party_subsystems();
  order.push_back(*rho.eve_index);
  MultipartiteState arranged = rho.permuted(order);
  MultipartiteState pure = purify(arranged);
  int n = pure.profile.count();
  DimProfile merged;
  for (int s = 0; s + 2 < n; ++s) {
    merged.dims.push_back(pure.profile.dims[s]);
    merged.labels.push_back(pure.profile.labels[s]);
  }
  merged.dims.push_back(pure.profile.dims[n - 2] * pure.profile.dims[n - 1]);
  merged.labels.push_back(fresh_label(merged.labels, "E"));
  MultipartiteState out;
  out.matrix = pure.matrix;
  out.profile = merged;
  out.eve_index = merged.count() - 1;
  return out;
}

MultipartiteState example_ghz(int m, int d) {
  require(m >= 2, "ghz: need at least two parties");
  require(d >= 2, "ghz: local dimension must be at least 2");
  long long dim = 1;
  for (int j = 0; j < m; ++j) {
    dim *= d;
    check_dim(dim, "ghz state");
  }
  ComplexVector psi = ComplexVector::Zero(dim);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) {
    long long index = 0;
    for (int j = 0; j < m; ++j) index = index * d + i;
    psi[index] = amp;
  }
  MultipartiteState out;
  out.matrix = outer(psi);
  for (int j = 0; j < m; ++j) {
    out.profile.dims.push_back(d);
    out.profile.labels.push_back("A" + std::to_string(j + 1));
  }
  return out;
}

std::vector<ComplexMatrix> default_unitary_family(int d, int k) {
  std::vector<ComplexMatrix> family;
  ComplexMatrix f = qft_matrix(d);
  ComplexMatrix power = identity_matrix(d);
  for (int j = 0; j < k; ++j) {
    family.push_back(power);
    power = f * power;
  }
  return family;
}

namespace {

void check_unitary_family(const std::vector<ComplexMatrix>& family, int d,
                          int k) {
  require(static_cast<int>(family.size()) == k,
          "unitary family must contain exactly k matrices");
  for (const auto& u : family) {
    require(u.rows() == d && u.cols() == d, "unitary family dimension mismatch");
    double dev = (u.adjoint() * u - identity_matrix(d)).cwiseAbs().maxCoeff();
    require(dev <= 1e-9, "family member not unitary (deviation " +
                             std::to_string(dev) + ")");
  }
}

}  // namespace

MultipartiteState example_against_co(int d, int k,
                                     const std::vector<ComplexMatrix>& family_in) {
  require(d >= 1 && k >= 1, "against-co: d and k must be positive");
  std::vector<ComplexMatrix> family =
      family_in.empty() ? default_unitary_family(d, k) : family_in;
  check_unitary_family(family, d, k);

  const long long player = static_cast<long long>(d) * k;
  const long long eve = static_cast<long long>(k) * k * k;
  check_dim(player * player * player * eve, "against-co state");

  const long long dim = player * player * player * eve;
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  const double weight = 1.0 / (static_cast<double>(d) * k * k * k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      for (int c = 0; c < k; ++c) {
        long long eve_idx = (static_cast<long long>(a) * k + b) * k + c;
        for (int x = 0; x < d; ++x) {
          // Per-player layout: encrypted register most significant, label
          // register least significant. A holds (U_a|x>, |b>), B holds
          // (U_b|x>, |c>), C holds (U_c|x>, |a>).
          ComplexVector pa = ComplexVector::Zero(player);
          ComplexVector pb = ComplexVector::Zero(player);
          ComplexVector pc = ComplexVector::Zero(player);
          for (int r = 0; r < d; ++r) {
            pa[static_cast<long long>(r) * k + b] = family[a].col(x)[r];
            pb[static_cast<long long>(r) * k + c] = family[b].col(x)[r];
            pc[static_cast<long long>(r) * k + a] = family[c].col(x)[r];
          }
          ComplexVector v = ComplexVector::Zero(dim);
          // kron of pa, pb, pc and Eve basis vector, assembled directly.
          for (long long ia = 0; ia < player; ++ia) {
            if (pa[ia] == Complex(0, 0)) continue;
            for (long long ib = 0; ib < player; ++ib) {
              if (pb[ib] == Complex(0, 0)) continue;
              for (long long ic = 0; ic < player; ++ic) {
                if (pc[ic] == Complex(0, 0)) continue;
                long long idx = ((ia * player + ib) * player + ic) * eve + eve_idx;
                v[idx] = pa[ia] * pb[ib] * pc[ic];
              }
            }
          }
          rho.noalias() += weight * (v * v.adjoint());
        }
      }
    }
  }

  MultipartiteState out;
  out.matrix = rho;
  out.profile.dims = {static_cast<int>(player), static_cast<int>(player),
                      static_cast<int>(player), static_cast<int>(eve)};
  out.profile.labels = {"A", "B", "C", "E"};
  out.eve_index = 3;
  return out;
}

MultipartiteState example_against_co_pure(
    int d, int k, const std::vector<ComplexMatrix>& family_in) {
  require(d >= 1 && k >= 1, "against-co-pure: d and k must be positive");
  std::vector<ComplexMatrix> family =
      family_in.empty() ? default_unitary_family(d, k) : family_in;
  check_unitary_family(family, d, k);

  const long long player = static_cast<long long>(d) * k;
  const long long dim = player * player * player;
  check_dim(dim, "against-co-pure state");

  ComplexVector psi = ComplexVector::Zero(dim);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d) * k * k * k);
  for (int x = 0; x < d; ++x) {
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        for (int c = 0; c < k; ++c) {
          for (int ra = 0; ra < d; ++ra) {
            Complex ca = family[a].col(x)[ra];
            if (ca == Complex(0, 0)) continue;
            for (int rb = 0; rb < d; ++rb) {
              Complex cb = family[b].col(x)[rb];
              if (cb == Complex(0, 0)) continue;
              for (int rc = 0; rc < d; ++rc) {
                Complex cc = family[c].col(x)[rc];
                if (cc == Complex(0, 0)) continue;
                long long ia = static_cast<long long>(ra) * k + b;
                long long ib = static_cast<long long>(rb) * k + c;
                long long ic = static_cast<long long>(rc) * k + a;
                psi[(ia * player + ib) * player + ic] += amp * ca * cb * cc;
              }
            }
          }
        }
      }
    }
  }

  MultipartiteState out;
  out.matrix = outer(psi);
  out.profile.dims = {static_cast<int>(player), static_cast<int>(player),
                      static_cast<int>(player)};
  out.profile.labels = {"A", "B", "C"};
  return out;
}

MultipartiteState example_pbit(const PbitSpec& spec) {
  require(spec.d >= 2, "pbit: key dimension must be at least 2");
  require(!spec.shield_dims.empty(), "pbit: need at least one shield");
  require(spec.eve_dim >= 1, "pbit: invalid Eve dimension");
  long long shield = 1;
  for (int s : spec.shield_dims) {
    require(s >= 1, "pbit: invalid shield dimension");
    shield *= s;
  }
  require(spec.base.size() == shield * spec.eve_dim,
          "pbit: base state has wrong dimension");
  require(std::abs(spec.base.norm() - 1.0) <= 1e-9,
          "pbit: base state not normalized");
  require(static_cast<int>(spec.unitaries.size()) == spec.d,
          "pbit: need exactly d shield operators");

  const int m = static_cast<int>(spec.shield_dims.size());
  // Branch vectors |psi_x> = (U_x (x) 1_E)|psi0> and the Eve-marginal check.
  std::vector<ComplexVector> branch(spec.d);
  DimProfile shield_eve;
  shield_eve.dims = {static_cast<int>(shield), spec.eve_dim};
  shield_eve.labels = {"B", "E"};
  ComplexMatrix reference;
  double worst = 0.0;
  for (int x = 0; x < spec.d; ++x) {
    const ComplexMatrix& u = spec.unitaries[x];
    require(u.rows() == shield && u.cols() == shield,
            "pbit: shield operator dimension mismatch");
    ComplexMatrix lifted = kron(u, identity_matrix(spec.eve_dim));
    branch[x] = lifted * spec.base;
    ComplexMatrix eve_marginal =
        partial_trace(outer(branch[x]), shield_eve, {1});
    if (x == 0) {
      reference = eve_marginal;
    } else {
      worst = std::max(worst,
                       (eve_marginal - reference).cwiseAbs().maxCoeff());
    }
  }
  if (worst > 1e-8) {
    throw InputError("pbit: Eve marginals differ by " + std::to_string(worst) +
                     " (invalid shield family)");
  }

  // Global vector over X_1 ... X_m B_1 ... B_m E, then regrouped so that
  // party j holds (X_j, B_j). Assembled directly in the target layout.
  std::vector<int> party_dims(m);
  long long dim = spec.eve_dim;
  for (int j = 0; j < m; ++j) {
    party_dims[j] = spec.d * spec.shield_dims[j];
    dim *= party_dims[j];
  }
  check_dim(dim, "pbit state");

  auto shield_strides = detail::subsystem_strides(
      std::vector<int>(spec.shield_dims.begin(), spec.shield_dims.end()));
  ComplexVector psi = ComplexVector::Zero(dim);
  const double amp = 1.0 / std::sqrt(static_cast<double>(spec.d));
  for (int x = 0; x < spec.d; ++x) {
    for (long long bs = 0; bs < shield; ++bs) {
      for (int e = 0; e < spec.eve_dim; ++e) {
        Complex value = branch[x][bs * spec.eve_dim + e];
        if (value == Complex(0, 0)) continue;
        long long index = 0;
        long long rest = bs;
        for (int j = 0; j < m; ++j) {
          long long bj = rest / shield_strides[j];
          rest %= shield_strides[j];
          long long local = static_cast<long long>(x) * spec.shield_dims[j] + bj;
          index = index * party_dims[j] + local;
        }
        index = index * spec.eve_dim + e;
        psi[index] += amp * value;
      }
    }
  }

  MultipartiteState out;
  out.matrix = outer(psi);
  for (int j = 0; j < m; ++j) {
    out.profile.dims.push_back(party_dims[j]);
    out.profile.labels.push_back("A" + std::to_string(j + 1));
  }
  out.profile.dims.push_back(spec.eve_dim);
  out.profile.labels.push_back("E");
  out.eve_index = m;
  return out;
}

PbitSpec example_pbit_default() {
  PbitSpec spec;
  spec.d = 2;
  spec.shield_dims = {2, 2};
  spec.eve_dim = 2;
  // |psi0> on B1 B2 E: (|000> + |011> + |110> + |101>)/2; Eve marginal is
  // maximally mixed, so it is genuinely correlated with the shields.
  spec.base = ComplexVector::Zero(8);
  spec.base[0] = 0.5;  // 000
  spec.base[3] = 0.5;  // 011
  spec.base[6] = 0.5;  // 110
  spec.base[5] = 0.5;  // 101
  ComplexMatrix cz = identity_matrix(4);
  cz(3, 3) = -1.0;
  spec.unitaries = {identity_matrix(4), cz};
  return spec;
}

MultipartiteState random_state(const DimProfile& profile, int rank,
                               std::uint64_t seed) {
  profile.validate();
  const long long dim = profile.total_dim();
  check_dim(dim, "random state");
  require(rank >= 1 && rank <= dim, "random_state: rank out of range");
  Rng rng = Rng(seed).fork("random-state");
  ComplexMatrix g(dim, rank);
  for (long long r = 0; r < dim; ++r)
    for (int c = 0; c < rank; ++c)
      g(r, c) = Complex(rng.next_gaussian(), rng.next_gaussian());
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  MultipartiteState out;
  out.matrix = rho;
  out.profile = profile;
  return out;
}

ComplexMatrix random_unitary(int dim, Rng& rng) {
  ComplexMatrix g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      g(r, c) = Complex(rng.next_gaussian(), rng.next_gaussian());
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase convention so the result is well distributed.
  for (int c = 0; c < dim; ++c) {
    Complex d = r(c, c);
    double mag = std::abs(d);
    if (mag > 1e-12) q.col(c) *= d / mag;
  }
  return q;
}

}  // namespace qconf
