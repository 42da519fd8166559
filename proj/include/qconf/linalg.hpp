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

// Dense complex multilinear algebra and entropic functionals.
//
// Conventions, fixed globally:
//   * all logarithms are base 2 (entropies are in bits);
//   * tensor indices are row-major with the LEFT factor most significant,
//     i.e. the ambient basis index of subsystems (s_0, ..., s_{n-1}) is
//     ((i_0 * d_1 + i_1) * d_2 + i_2) ...;
//   * eigenvalues in [-1e-10, 0) are clamped to 0 before entropies; more
//     negative values signal an invalid state and raise InputError;
//   * matrices with asymmetry max|M - M^dag| <= 1e-9 are silently
//     symmetrized as (M + M^dag)/2; larger asymmetry raises InputError.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace qconf {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-9;
inline constexpr double kEigenvalueClamp = 1e-10;

/// Ordered subsystem dimensions plus distinct party labels. The product of
/// `dims` must equal the ambient matrix dimension it describes.
struct DimProfile {
  std::vector<int> dims;
  std::vector<std::string> labels;

  int count() const { return static_cast<int>(dims.size()); }
  long long total_dim() const;
  /// Checks positivity of dims, label uniqueness and, when `ambient` >= 0,
  /// that the dims multiply out to `ambient`. Throws InputError.
  void validate(long long ambient = -1) const;
  long long subset_dim(const std::vector<int>& subsys) const;
  int index_of(const std::string& label) const;  // -1 when absent
  /// Profile for the kept subsystems, in their original order.
  DimProfile keep(const std::vector<int>& subsys) const;
  /// Profile after reordering: position p of the result holds subsystem
  /// order[p] of *this.
  DimProfile permuted(const std::vector<int>& order) const;
};

bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol);

/// (M + M^dag)/2 when the asymmetry is within `tol`, otherwise InputError.
ComplexMatrix hermitize(const ComplexMatrix& m, double tol = kHermitianTol);

ComplexMatrix identity_matrix(int dim);
ComplexVector basis_vector(int dim, int k);
ComplexMatrix basis_projector(int dim, int k);

/// Fourier matrix with entries exp(2*pi*i*j*k/d)/sqrt(d). Unitarity is
/// asserted after construction.
ComplexMatrix qft_matrix(int d);

/// Kronecker product, left factor most significant. Rectangular factors
/// allowed. Throws BudgetError when a result dimension exceeds the budget.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Reduced operator on the kept subsystems in their original order.
/// `keep` must be a sorted, duplicate-free list of subsystem indices; an
/// empty list yields the 1x1 matrix holding the trace. Trace is preserved.
ComplexMatrix partial_trace(const ComplexMatrix& rho, const DimProfile& profile,
                            const std::vector<int>& keep);

/// State re-expressed in permuted tensor order. `order[p]` is the original
/// subsystem placed at position p of the result (gather convention).
ComplexMatrix permute_subsystems(const ComplexMatrix& rho,
                                 const DimProfile& profile,
                                 const std::vector<int>& order);

struct EigenSystem {
  RealVector values;      // descending
  ComplexMatrix vectors;  // columns, matching order
};

/// Eigendecomposition of a Hermitian matrix (asymmetry <= 1e-9 tolerated
/// and symmetrized away). Eigenvalues sorted descending; the reconstruction
/// max|V L V^dag - M| stays below 1e-8.
EigenSystem hermitian_eigen(const ComplexMatrix& m);

/// Eigenvalues only, descending.
RealVector hermitian_eigenvalues(const ComplexMatrix& m);

/// Von Neumann entropy -sum lambda log2 lambda in bits of a unit-trace
/// density operator (trace within 1e-9 of 1). The result is clamped into
/// [0, log2 dim].
double von_neumann_entropy(const ComplexMatrix& rho);

/// Entropy in bits of a subnormalized PSD block; no trace-1 requirement.
/// Used for classical-quantum block decompositions.
double subnormalized_entropy(const ComplexMatrix& block);

/// S(A|B) = S(AB) - S(B); parts are disjoint subsystem index sets and the
/// rest of the system is traced out first.
double conditional_entropy(const ComplexMatrix& rho, const DimProfile& profile,
                           const std::vector<int>& part_a,
                           const std::vector<int>& part_b);

/// I(A>B) = S(B) - S(AB), the coherent information.
double coherent_information(const ComplexMatrix& rho, const DimProfile& profile,
                            const std::vector<int>& part_a,
                            const std::vector<int>& part_b);

/// (1/2)||a - b||_1 from the spectrum of the Hermitian difference.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// ||sqrt(a) sqrt(b)||_1 for normalized states; symmetric within 1e-8.
double fidelity(const ComplexMatrix& a, const ComplexMatrix& b);

/// sqrt(1 - F(a,b)^2). Provided as a derived convenience for normalized
/// states only (no sub-normalized generalized-fidelity branch).
double purified_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// PSD square root via eigendecomposition with the standard clamp.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

namespace detail {
/// strides[i] = product of dims[i+1..]; ambient index = sum digit_i*strides[i]
std::vector<long long> subsystem_strides(const std::vector<int>& dims);
/// Ambient offsets of every local index of `subsys` (others fixed at 0).
std::vector<long long> offset_table(const std::vector<int>& dims,
                                    const std::vector<int>& subsys);
}  // namespace detail

}  // namespace qconf
