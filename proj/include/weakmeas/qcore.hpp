// Copyright 2026 The weakmeas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace weakmeas {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Errors. Each names the contract it enforces; all carry a human message.
// ---------------------------------------------------------------------------

// Matrix fails the Hermiticity check max|M - M†| <= 1e-12.
class NonHermitian : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Requested operation exceeds a hard dimension cap.
class DimensionTooLarge : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Vector/matrix/factor dimensions do not line up.
class DimensionMismatch : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Pre- and postselected states are orthogonal: the conditioned value is undefined.
class OrthogonalPostselection : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// The observable has (numerically) zero variance in the given state.
class ZeroVariance : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// The requested conditioned value is unreachable from the given state.
class DegenerateTarget : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// A probability parameter lies outside its admissible interval.
class ProbabilityOutOfRange : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// The extreme eigenvalues coincide; no two-level reduction exists.
class DegenerateExtremes : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// A probability-derivative vector is inconsistent with conservation of probability.
class InconsistentDerivative : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// A state expected to be normalized is not.
class NotNormalized : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// A set of states expected to be orthonormal is not.
class BasisNotOrthonormal : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// The conditioned-value parameter hits a pole of the construction.
class SingularWeakValue : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// The supplied elements do not form a positive resolution of the identity.
class BasisNotPovm : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Input parameters make the requested quantity ill-defined (e.g. 0/0).
class DegenerateInput : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Command-line / config-file input is unusable.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// A file could not be read or written.
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
// An experiment produced no rows.
class EmptyTable : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Numeric policy shared across modules.
// ---------------------------------------------------------------------------

// Hard cap on the dimension handled by the dense eigensolver.
inline constexpr int kMaxEigenDim = 64;
// Hermiticity tolerance: max|M - M†| must not exceed this.
inline constexpr double kHermitianTol = 1e-12;
// Eigenvalues closer than this are treated as one degenerate cluster.
inline constexpr double kDegenerateTol = 1e-10;
// Overlaps/probabilities below this floor count as exactly zero.
inline constexpr double kZeroProbabilityFloor = 1e-300;
// Default tolerance for normalization checks.
inline constexpr double kNormTol = 1e-12;

// ---------------------------------------------------------------------------
// Dense square complex matrix (row-major). Small and unapologetically simple:
// every operator in this library is a dense matrix of dimension <= a few
// thousand.
// ---------------------------------------------------------------------------
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  // Zero matrix of the given dimension.
  explicit ComplexMatrix(int dim);
  // Build from explicit rows; all rows must have size rows.size().
  static ComplexMatrix from_rows(const std::vector<std::vector<Complex>>& rows);
  static ComplexMatrix identity(int dim);

  int dim() const { return dim_; }
  Complex& at(int r, int c) { return a_[static_cast<size_t>(r) * dim_ + c]; }
  const Complex& at(int r, int c) const { return a_[static_cast<size_t>(r) * dim_ + c]; }

  ComplexMatrix adjoint() const;
  // Largest |entry|.
  double max_abs() const;

 private:
  int dim_ = 0;
  std::vector<Complex> a_;
};

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
ComplexMatrix operator+(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(Complex scale, const ComplexMatrix& m);
// Tensor (Kronecker) product.
ComplexMatrix kron(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

// ---------------------------------------------------------------------------
// Pure state on a tensor product of finite factors. Amplitudes are stored
// big-endian: the first factor varies slowest. States may be unnormalized
// (conditioning produces unnormalized residues); operations that require a
// normalized input say so.
// ---------------------------------------------------------------------------
class QuantumState {
 public:
  QuantumState() = default;
  // amplitudes.size() must equal the product of dims; all entries finite.
  QuantumState(std::vector<Complex> amplitudes, std::vector<int> dims);

  const std::vector<Complex>& amplitudes() const { return amplitudes_; }
  const std::vector<int>& dims() const { return dims_; }
  int total_dim() const { return static_cast<int>(amplitudes_.size()); }

  double norm() const;
  bool is_normalized(double tol = kNormTol) const;
  // Returns the state scaled to unit norm; throws DegenerateInput on a null vector.
  QuantumState normalized() const;

 private:
  std::vector<Complex> amplitudes_;
  std::vector<int> dims_;
};

// Basis vector |index⟩ of the given factor structure (flat, big-endian index).
QuantumState basis_state(const std::vector<int>& dims, int index);
// Inner product ⟨a|b⟩.
Complex overlap(const QuantumState& a, const QuantumState& b);
// Joint state a ⊗ b; factor lists concatenate.
QuantumState tensor(const QuantumState& a, const QuantumState& b);
// Fixes the global phase: first amplitude with |amp| > 1e-12·max becomes real positive.
QuantumState canonical_phase(const QuantumState& s);
// min over phases of ‖a − e^{iφ}b‖, computed entrywise (no cancellation at small distances).
double phase_free_distance(const QuantumState& a, const QuantumState& b);

// ---------------------------------------------------------------------------
// Eigendecomposition.
// ---------------------------------------------------------------------------

struct Eigensystem {
  std::vector<double> values;                 // ascending
  std::vector<std::vector<Complex>> vectors;  // vectors[k] pairs with values[k]
};

// Cyclic complex Jacobi for Hermitian matrices. Off-diagonal Frobenius
// tolerance 1e-14 (relative), at most 100 sweeps, dimension capped at 64.
// Eigenvalues ascending; degenerate clusters (gap < 1e-10) re-orthonormalized
// by modified Gram–Schmidt; every vector gets the canonical phase.
// Throws NonHermitian / DimensionTooLarge.
Eigensystem eig_hermitian(const ComplexMatrix& m);

// Extreme eigenpairs plus degeneracy bookkeeping. When an extreme eigenvalue
// is degenerate, its reported vector is the (deterministic) normalized
// projection of the lowest-index basis vector onto the degenerate subspace.
struct SpectrumSummary {
  double a_min = 0.0;
  double a_max = 0.0;
  double delta = 0.0;  // a_max - a_min
  std::vector<Complex> v_min;
  std::vector<Complex> v_max;
  bool degenerate_min = false;
  bool degenerate_max = false;
};

// ---------------------------------------------------------------------------
// Hermitian observable with a lazily cached eigensystem (shared across copies).
// ---------------------------------------------------------------------------
class HermitianObservable {
 public:
  // Validates max|M - M†| <= 1e-12; throws NonHermitian.
  explicit HermitianObservable(ComplexMatrix m);

  int dim() const { return matrix_.dim(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  // Computed on first use; cached; dimension capped at 64.
  const Eigensystem& eigensystem() const;
  SpectrumSummary spectrum() const;

 private:
  struct EigenCache;
  ComplexMatrix matrix_;
  std::shared_ptr<EigenCache> cache_;
};

// The Pauli observables, used throughout the qubit protocol.
HermitianObservable pauli_x();
HermitianObservable pauli_y();
HermitianObservable pauli_z();

// ---------------------------------------------------------------------------
// Operations.
// ---------------------------------------------------------------------------

// M|ψ⟩ for an arbitrary square matrix (generally unnormalized).
QuantumState apply_matrix(const ComplexMatrix& m, const QuantumState& state);
// O|ψ⟩ (generally unnormalized).
QuantumState apply(const HermitianObservable& obs, const QuantumState& state);
// ⟨ψ|O|ψ⟩ for a normalized state (real by Hermiticity).
double expectation(const QuantumState& state, const HermitianObservable& obs);
// ⟨O²⟩ − ⟨O⟩², clamped at 0.
double variance(const QuantumState& state, const HermitianObservable& obs);
// Joint observable a ⊗ b.
HermitianObservable tensor(const HermitianObservable& a, const HermitianObservable& b);

// Conditioning |joint⟩ on finding |target⟩ in the listed factors (strictly
// increasing, 0-based). `collapsed` keeps the remaining factors and is NOT
// normalized: probability = ‖collapsed‖². When every factor is conditioned
// the residue is a single amplitude (one factor of dimension 1).
// zero_overlap flags probability < 1e-300; no exception is thrown for it.
struct PostselectionResult {
  QuantumState collapsed;
  double probability = 0.0;
  bool zero_overlap = false;
};
PostselectionResult postselect(const QuantumState& joint, const QuantumState& target,
                               const std::vector<int>& factors);

// exp(−i·angle·G)|ψ⟩ via the eigendecomposition of G (dimension capped at 64).
QuantumState evolve_exp(const QuantumState& state, const HermitianObservable& generator,
                        double angle);

// Orthonormal basis whose first element is `seed` (normalized), completed by
// Gram–Schmidt over computational basis vectors in index order.
std::vector<QuantumState> complete_orthonormal_basis(const QuantumState& seed);

}  // namespace weakmeas
