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

#include "qconf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qconf/budget.hpp"
#include "qconf/errors.hpp"

namespace qconf {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void require(bool cond, const std::string& msg) {
  if (!cond) throw InputError(msg);
}

double log2_clamped(double x) { return std::log2(x); }

/// -sum lambda log2 lambda over a clamped spectrum.
double entropy_of_spectrum(const RealVector& values) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    double lambda = values[i];
    if (lambda < -kEigenvalueClamp) {
      throw InputError("eigenvalue " + std::to_string(lambda) +
                       " below -1e-10: not a valid (sub)state");
    }
    if (lambda > 0.0) s -= lambda * log2_clamped(lambda);
  }
  return s;
}

}  // namespace

long long DimProfile::total_dim() const {
  long long d = 1;
  for (int x : dims) d *= x;
  return d;
}

void DimProfile::validate(long long ambient) const {
  require(!dims.empty(), "DimProfile: empty dimension list");
  require(dims.size() == labels.size(),
          "DimProfile: dims and labels must have equal length");
  for (int d : dims) require(d >= 1, "DimProfile: dimensions must be positive");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    require(!l.empty(), "DimProfile: empty label");
    require(seen.insert(l).second, "DimProfile: duplicate label '" + l + "'");
  }
  if (ambient >= 0) {
    require(total_dim() == ambient,
            "DimProfile: dimensions multiply to " + std::to_string(total_dim()) +
                " but the matrix is " + std::to_string(ambient) + "-dimensional");
  }
}

long long DimProfile::subset_dim(const std::vector<int>& subsys) const {
  long long d = 1;
  for (int s : subsys) d *= dims.at(s);
  return d;
}

int DimProfile::index_of(const std::string& label) const {
  for (int i = 0; i < count(); ++i)
    if (labels[i] == label) return i;
  return -1;
}

DimProfile DimProfile::keep(const std::vector<int>& subsys) const {
  DimProfile out;
  for (int s : subsys) {
    out.dims.push_back(dims.at(s));
    out.labels.push_back(labels.at(s));
  }
  return out;
}

DimProfile DimProfile::permuted(const std::vector<int>& order) const {
  return keep(order);
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

ComplexMatrix hermitize(const ComplexMatrix& m, double tol) {
  require(m.rows() == m.cols(), "hermitize: matrix not square");
  double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol) {
    throw InputError("matrix asymmetry " + std::to_string(asym) +
                     " exceeds the Hermitian tolerance");
  }
  return 0.5 * (m + m.adjoint());
}

ComplexMatrix identity_matrix(int dim) {
  return ComplexMatrix::Identity(dim, dim);
}

ComplexVector basis_vector(int dim, int k) {
  ComplexVector v = ComplexVector::Zero(dim);
  v[k] = 1.0;
  return v;
}

ComplexMatrix basis_projector(int dim, int k) {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(k, k) = 1.0;
  return m;
}

ComplexMatrix qft_matrix(int d) {
  require(d >= 1, "qft_matrix: dimension must be positive");
  ComplexMatrix f(d, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      double angle = 2.0 * kPi * j * k / d;
      f(j, k) = scale * Complex(std::cos(angle), std::sin(angle));
    }
  }
  ComplexMatrix check = f.adjoint() * f;
  if ((check - identity_matrix(d)).cwiseAbs().maxCoeff() > 1e-12) {
    throw InternalError("qft_matrix: unitarity check failed");
  }
  return f;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  check_dim(static_cast<long long>(a.rows()) * b.rows(), "kron result (rows)");
  check_dim(static_cast<long long>(a.cols()) * b.cols(), "kron result (cols)");
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace detail {

std::vector<long long> subsystem_strides(const std::vector<int>& dims) {
  std::vector<long long> strides(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
    strides[i] = strides[i + 1] * dims[i + 1];
  return strides;
}

std::vector<long long> offset_table(const std::vector<int>& dims,
                                    const std::vector<int>& subsys) {
  auto strides = subsystem_strides(dims);
  long long local = 1;
  for (int s : subsys) local *= dims[s];
  std::vector<long long> table(static_cast<size_t>(local), 0);
  for (long long idx = 0; idx < local; ++idx) {
    long long rest = idx, offset = 0;
    for (int p = static_cast<int>(subsys.size()) - 1; p >= 0; --p) {
      int s = subsys[p];
      offset += (rest % dims[s]) * strides[s];
      rest /= dims[s];
    }
    table[static_cast<size_t>(idx)] = offset;
  }
  return table;
}

}  // namespace detail

ComplexMatrix partial_trace(const ComplexMatrix& rho, const DimProfile& profile,
                            const std::vector<int>& keep) {
  require(rho.rows() == rho.cols(), "partial_trace: matrix not square");
  profile.validate(rho.rows());
  std::vector<int> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          "partial_trace: duplicate subsystem index");
  require(sorted == keep, "partial_trace: keep set must be sorted");
  for (int s : keep)
    require(s >= 0 && s < profile.count(), "partial_trace: index out of range");

  std::vector<int> traced;
  for (int s = 0; s < profile.count(); ++s)
    if (!std::binary_search(keep.begin(), keep.end(), s)) traced.push_back(s);

  auto keep_off = detail::offset_table(profile.dims, keep);
  auto traced_off = detail::offset_table(profile.dims, traced);
  const long long dk = static_cast<long long>(keep_off.size());

  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (long long r = 0; r < dk; ++r) {
    for (long long c = 0; c < dk; ++c) {
      Complex sum = 0.0;
      for (long long t : traced_off) sum += rho(keep_off[r] + t, keep_off[c] + t);
      out(r, c) = sum;
    }
  }
  return out;
}

ComplexMatrix permute_subsystems(const ComplexMatrix& rho,
                                 const DimProfile& profile,
                                 const std::vector<int>& order) {
  require(rho.rows() == rho.cols(), "permute_subsystems: matrix not square");
  profile.validate(rho.rows());
  require(static_cast<int>(order.size()) == profile.count(),
          "permute_subsystems: permutation length mismatch");
  std::vector<bool> seen(order.size(), false);
  for (int s : order) {
    require(s >= 0 && s < profile.count() && !seen[s],
            "permute_subsystems: not a permutation");
    seen[s] = true;
  }

  auto old_strides = detail::subsystem_strides(profile.dims);
  std::vector<int> new_dims(order.size());
  for (size_t p = 0; p < order.size(); ++p) new_dims[p] = profile.dims[order[p]];

  const long long dim = rho.rows();
  std::vector<long long> to_old(static_cast<size_t>(dim), 0);
  for (long long idx = 0; idx < dim; ++idx) {
    long long rest = idx, old_index = 0;
    for (int p = static_cast<int>(order.size()) - 1; p >= 0; --p) {
      old_index += (rest % new_dims[p]) * old_strides[order[p]];
      rest /= new_dims[p];
    }
    to_old[static_cast<size_t>(idx)] = old_index;
  }

  ComplexMatrix out(dim, dim);
  for (long long r = 0; r < dim; ++r)
    for (long long c = 0; c < dim; ++c) out(r, c) = rho(to_old[r], to_old[c]);
  return out;
}

EigenSystem hermitian_eigen(const ComplexMatrix& m) {
  ComplexMatrix h = hermitize(m);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw InternalError("hermitian_eigen: decomposition failed");
  EigenSystem out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  ComplexMatrix h = hermitize(m);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw InternalError("hermitian_eigenvalues: decomposition failed");
  return solver.eigenvalues().reverse();
}

double von_neumann_entropy(const ComplexMatrix& rho) {
  require(rho.rows() == rho.cols(), "entropy: matrix not square");
  double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > 1e-9) {
    throw InputError("entropy: trace " + std::to_string(trace) +
                     " deviates from 1 beyond 1e-9");
  }
  double s = entropy_of_spectrum(hermitian_eigenvalues(rho));
  double cap = std::log2(static_cast<double>(rho.rows()));
  return std::clamp(s, 0.0, cap);
}

double subnormalized_entropy(const ComplexMatrix& block) {
  if (block.rows() == 0) return 0.0;
  return entropy_of_spectrum(hermitian_eigenvalues(block));
}

namespace {

std::vector<int> sorted_union(const std::vector<int>& a,
                              const std::vector<int>& b) {
  std::vector<int> u = a;
  u.insert(u.end(), b.begin(), b.end());
  std::sort(u.begin(), u.end());
  return u;
}

void require_disjoint(const std::vector<int>& a, const std::vector<int>& b) {
  std::set<int> sa(a.begin(), a.end());
  for (int x : b) require(sa.count(x) == 0, "subsystem parts overlap");
}

}  // namespace

double conditional_entropy(const ComplexMatrix& rho, const DimProfile& profile,
                           const std::vector<int>& part_a,
                           const std::vector<int>& part_b) {
  require_disjoint(part_a, part_b);
  std::vector<int> ab = sorted_union(part_a, part_b);
  std::vector<int> b = part_b;
  std::sort(b.begin(), b.end());
  double s_ab = von_neumann_entropy(partial_trace(rho, profile, ab));
  double s_b = von_neumann_entropy(partial_trace(rho, profile, b));
  return s_ab - s_b;
}

double coherent_information(const ComplexMatrix& rho, const DimProfile& profile,
                            const std::vector<int>& part_a,
                            const std::vector<int>& part_b) {
  return -conditional_entropy(rho, profile, part_a, part_b);
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "trace_distance: dimension mismatch");
  require(is_hermitian(a) && is_hermitian(b),
          "trace_distance: both operands must be Hermitian");
  RealVector values = hermitian_eigenvalues(a - b);
  return 0.5 * values.cwiseAbs().sum();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  EigenSystem es = hermitian_eigen(m);
  RealVector roots(es.values.size());
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    double lambda = es.values[i];
    if (lambda < -kEigenvalueClamp) {
      throw InputError("psd_sqrt: eigenvalue " + std::to_string(lambda) +
                       " below the clamp tolerance");
    }
    roots[i] = lambda > 0.0 ? std::sqrt(lambda) : 0.0;
  }
  return es.vectors * roots.asDiagonal() * es.vectors.adjoint();
}

double fidelity(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "fidelity: dimension mismatch");
  ComplexMatrix product = psd_sqrt(a) * psd_sqrt(b);
  Eigen::JacobiSVD<ComplexMatrix> svd(product);
  double f = svd.singularValues().sum();
  return std::clamp(f, 0.0, 1.0 + 1e-9);
}

double purified_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  double f = fidelity(a, b);
  return std::sqrt(std::max(0.0, 1.0 - f * f));
}

}  // namespace qconf
