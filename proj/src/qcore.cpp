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

#include "weakmeas/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace weakmeas {

namespace {

// Product of factor dimensions, guarding against overflow of int.
long long dims_product(const std::vector<int>& dims) {
  long long p = 1;
  for (int d : dims) {
    if (d < 1) throw DimensionMismatch("factor dimensions must be >= 1");
    p *= d;
    if (p > (1LL << 40)) throw DimensionTooLarge("factor dimension product overflows");
  }
  return p;
}

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

// ------------------------------------------------------------ ComplexMatrix

ComplexMatrix::ComplexMatrix(int dim) : dim_(dim) {
  if (dim < 1) throw DimensionMismatch("matrix dimension must be >= 1");
  a_.assign(static_cast<size_t>(dim) * dim, Complex(0.0, 0.0));
}

ComplexMatrix ComplexMatrix::from_rows(const std::vector<std::vector<Complex>>& rows) {
  const int n = static_cast<int>(rows.size());
  ComplexMatrix m(n);
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(rows[r].size()) != n)
      throw DimensionMismatch("matrix rows must form a square");
    for (int c = 0; c < n; ++c) m.at(r, c) = rows[r][c];
  }
  return m;
}

ComplexMatrix ComplexMatrix::identity(int dim) {
  ComplexMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) m.at(r, c) = std::conj(at(c, r));
  return m;
}

double ComplexMatrix::max_abs() const {
  double mx = 0.0;
  for (const Complex& z : a_) mx = std::max(mx, std::abs(z));
  return mx;
}

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  if (lhs.dim() != rhs.dim()) throw DimensionMismatch("matrix product dimension mismatch");
  const int n = lhs.dim();
  ComplexMatrix out(n);
  for (int r = 0; r < n; ++r)
    for (int k = 0; k < n; ++k) {
      const Complex lrk = lhs.at(r, k);
      if (lrk == Complex(0.0, 0.0)) continue;
      for (int c = 0; c < n; ++c) out.at(r, c) += lrk * rhs.at(k, c);
    }
  return out;
}

ComplexMatrix operator+(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  if (lhs.dim() != rhs.dim()) throw DimensionMismatch("matrix sum dimension mismatch");
  ComplexMatrix out(lhs.dim());
  for (int r = 0; r < lhs.dim(); ++r)
    for (int c = 0; c < lhs.dim(); ++c) out.at(r, c) = lhs.at(r, c) + rhs.at(r, c);
  return out;
}

ComplexMatrix operator-(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  if (lhs.dim() != rhs.dim()) throw DimensionMismatch("matrix difference dimension mismatch");
  ComplexMatrix out(lhs.dim());
  for (int r = 0; r < lhs.dim(); ++r)
    for (int c = 0; c < lhs.dim(); ++c) out.at(r, c) = lhs.at(r, c) - rhs.at(r, c);
  return out;
}

ComplexMatrix operator*(Complex scale, const ComplexMatrix& m) {
  ComplexMatrix out(m.dim());
  for (int r = 0; r < m.dim(); ++r)
    for (int c = 0; c < m.dim(); ++c) out.at(r, c) = scale * m.at(r, c);
  return out;
}

ComplexMatrix kron(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  const int nl = lhs.dim();
  const int nr = rhs.dim();
  if (static_cast<long long>(nl) * nr > 4096)
    throw DimensionTooLarge("dense tensor-product operator exceeds dimension 4096");
  ComplexMatrix out(nl * nr);
  for (int r1 = 0; r1 < nl; ++r1)
    for (int c1 = 0; c1 < nl; ++c1) {
      const Complex l = lhs.at(r1, c1);
      if (l == Complex(0.0, 0.0)) continue;
      for (int r2 = 0; r2 < nr; ++r2)
        for (int c2 = 0; c2 < nr; ++c2)
          out.at(r1 * nr + r2, c1 * nr + c2) = l * rhs.at(r2, c2);
    }
  return out;
}

// ------------------------------------------------------------- QuantumState

QuantumState::QuantumState(std::vector<Complex> amplitudes, std::vector<int> dims)
    : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
  if (dims_.empty()) throw DimensionMismatch("state needs at least one factor");
  const long long want = dims_product(dims_);
  if (want != static_cast<long long>(amplitudes_.size()))
    throw DimensionMismatch("amplitude count does not match factor dimensions");
  for (const Complex& z : amplitudes_)
    if (!is_finite(z)) throw std::invalid_argument("state amplitudes must be finite");
}

double QuantumState::norm() const {
  double s = 0.0;
  for (const Complex& z : amplitudes_) s += std::norm(z);
  return std::sqrt(s);
}

bool QuantumState::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

QuantumState QuantumState::normalized() const {
  const double n = norm();
  if (n < kZeroProbabilityFloor) throw DegenerateInput("cannot normalize a null state");
  std::vector<Complex> amps = amplitudes_;
  for (Complex& z : amps) z /= n;
  return QuantumState(std::move(amps), dims_);
}

QuantumState basis_state(const std::vector<int>& dims, int index) {
  const long long total = dims_product(dims);
  if (index < 0 || index >= total) throw DimensionMismatch("basis index out of range");
  std::vector<Complex> amps(static_cast<size_t>(total), Complex(0.0, 0.0));
  amps[static_cast<size_t>(index)] = 1.0;
  return QuantumState(std::move(amps), dims);
}

Complex overlap(const QuantumState& a, const QuantumState& b) {
  if (a.total_dim() != b.total_dim()) throw DimensionMismatch("overlap dimension mismatch");
  Complex s(0.0, 0.0);
  for (int i = 0; i < a.total_dim(); ++i)
    s += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
  return s;
}

QuantumState tensor(const QuantumState& a, const QuantumState& b) {
  std::vector<int> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  std::vector<Complex> amps;
  amps.reserve(static_cast<size_t>(a.total_dim()) * b.total_dim());
  for (const Complex& za : a.amplitudes())
    for (const Complex& zb : b.amplitudes()) amps.push_back(za * zb);
  return QuantumState(std::move(amps), std::move(dims));
}

QuantumState canonical_phase(const QuantumState& s) {
  double mx = 0.0;
  for (const Complex& z : s.amplitudes()) mx = std::max(mx, std::abs(z));
  if (mx == 0.0) return s;
  std::vector<Complex> amps = s.amplitudes();
  for (const Complex& z : amps) {
    const double a = std::abs(z);
    if (a > 1e-12 * mx) {
      const Complex phase = std::conj(z) / a;
      for (Complex& w : amps) w *= phase;
      break;
    }
  }
  return QuantumState(std::move(amps), s.dims());
}

double phase_free_distance(const QuantumState& a, const QuantumState& b) {
  Complex ov = overlap(b, a);  // optimal phase aligns b onto a
  const double mag = std::abs(ov);
  const Complex phase = mag > 0.0 ? ov / mag : Complex(1.0, 0.0);
  double s = 0.0;
  for (int i = 0; i < a.total_dim(); ++i)
    s += std::norm(a.amplitudes()[i] - phase * b.amplitudes()[i]);
  return std::sqrt(s);
}

// ---------------------------------------------------------------- eigensolve

namespace {

// Canonical phase for a raw eigenvector (same convention as states).
void canonicalize_vector(std::vector<Complex>& v) {
  double mx = 0.0;
  for (const Complex& z : v) mx = std::max(mx, std::abs(z));
  if (mx == 0.0) return;
  for (const Complex& z : v) {
    const double a = std::abs(z);
    if (a > 1e-12 * mx) {
      const Complex phase = std::conj(z) / a;
      for (Complex& w : v) w *= phase;
      return;
    }
  }
}

double vec_norm(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const Complex& z : v) s += std::norm(z);
  return std::sqrt(s);
}

Complex vec_dot(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  Complex s(0.0, 0.0);
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

Eigensystem eig_hermitian(const ComplexMatrix& m) {
  const int n = m.dim();
  if (n > kMaxEigenDim) throw DimensionTooLarge("eigensolver handles dimension <= 64");
  const double scale = std::max(m.max_abs(), 1.0);
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c)
      if (std::abs(m.at(r, c) - std::conj(m.at(c, r))) > kHermitianTol)
        throw NonHermitian("matrix is not Hermitian within 1e-12");

  // Work on the symmetrized copy so roundoff asymmetry cannot accumulate.
  ComplexMatrix a(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a.at(r, c) = 0.5 * (m.at(r, c) + std::conj(m.at(c, r)));
  ComplexMatrix v = ComplexMatrix::identity(n);

  // Frobenius norm, for the relative convergence test.
  double fro = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) fro += std::norm(a.at(r, c));
  fro = std::sqrt(fro);

  const int kMaxSweeps = 100;
  bool converged = (n == 1);
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    double off = 0.0;
    for (int r = 0; r < n; ++r)
      for (int c = r + 1; c < n; ++c) off += 2.0 * std::norm(a.at(r, c));
    off = std::sqrt(off);
    if (off <= 1e-14 * std::max(fro, 1e-300)) {
      converged = true;
      break;
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Complex b = a.at(p, q);
        const double ab = std::abs(b);
        if (ab == 0.0) continue;
        const Complex e = b / ab;  // phase of the pivot
        const double app = a.at(p, p).real();
        const double aqq = a.at(q, q).real();
        const double tau = (app - aqq) / (2.0 * ab);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Right multiplication by the rotation (columns p, q).
        for (int i = 0; i < n; ++i) {
          const Complex x = a.at(i, p);
          const Complex y = a.at(i, q);
          a.at(i, p) = c * x + s * std::conj(e) * y;
          a.at(i, q) = -s * e * x + c * y;
        }
        // Left multiplication by its adjoint (rows p, q).
        for (int j = 0; j < n; ++j) {
          const Complex x = a.at(p, j);
          const Complex y = a.at(q, j);
          a.at(p, j) = c * x + s * e * y;
          a.at(q, j) = -s * std::conj(e) * x + c * y;
        }
        a.at(p, q) = 0.0;
        a.at(q, p) = 0.0;
        a.at(p, p) = Complex(a.at(p, p).real(), 0.0);
        a.at(q, q) = Complex(a.at(q, q).real(), 0.0);
        // Accumulate eigenvectors (columns of v).
        for (int i = 0; i < n; ++i) {
          const Complex x = v.at(i, p);
          const Complex y = v.at(i, q);
          v.at(i, p) = c * x + s * std::conj(e) * y;
          v.at(i, q) = -s * e * x + c * y;
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (int r = 0; r < n; ++r)
      for (int c = r + 1; c < n; ++c) off += 2.0 * std::norm(a.at(r, c));
    if (std::sqrt(off) > 1e-14 * std::max(fro, 1e-300))
      throw std::runtime_error("eigensolver did not converge within 100 sweeps");
  }

  // Sort ascending, carrying eigenvectors along.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a.at(i, i).real() < a.at(j, j).real(); });
  Eigensystem out;
  out.values.resize(n);
  out.vectors.assign(n, std::vector<Complex>(n));
  for (int k = 0; k < n; ++k) {
    out.values[k] = a.at(order[k], order[k]).real();
    for (int i = 0; i < n; ++i) out.vectors[k][i] = v.at(i, order[k]);
  }

  // Re-orthonormalize degenerate clusters (modified Gram–Schmidt) so repeated
  // eigenvalues yield a deterministic, exactly orthonormal block.
  const double cluster_tol = kDegenerateTol * scale;
  int lo = 0;
  while (lo < n) {
    int hi = lo + 1;
    while (hi < n && out.values[hi] - out.values[hi - 1] < cluster_tol) ++hi;
    for (int k = lo; k < hi; ++k) {
      for (int j = lo; j < k; ++j) {
        const Complex proj = vec_dot(out.vectors[j], out.vectors[k]);
        for (int i = 0; i < n; ++i) out.vectors[k][i] -= proj * out.vectors[j][i];
      }
      const double nk = vec_norm(out.vectors[k]);
      if (nk < 1e-8) throw std::runtime_error("degenerate cluster lost rank");
      for (int i = 0; i < n; ++i) out.vectors[k][i] /= nk;
    }
    lo = hi;
  }
  for (auto& vec : out.vectors) canonicalize_vector(vec);
  return out;
}

// ------------------------------------------------------ HermitianObservable

struct HermitianObservable::EigenCache {
  std::once_flag flag;
  Eigensystem eig;
};

HermitianObservable::HermitianObservable(ComplexMatrix m)
    : matrix_(std::move(m)), cache_(std::make_shared<EigenCache>()) {
  const int n = matrix_.dim();
  if (n < 1) throw DimensionMismatch("observable needs dimension >= 1");
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c)
      if (std::abs(matrix_.at(r, c) - std::conj(matrix_.at(c, r))) > kHermitianTol)
        throw NonHermitian("observable is not Hermitian within 1e-12");
}

const Eigensystem& HermitianObservable::eigensystem() const {
  std::call_once(cache_->flag, [this] { cache_->eig = eig_hermitian(matrix_); });
  return cache_->eig;
}

SpectrumSummary HermitianObservable::spectrum() const {
  const Eigensystem& eig = eigensystem();
  const int n = dim();
  const double scale = std::max(matrix_.max_abs(), 1.0);
  const double tol = kDegenerateTol * scale;
  SpectrumSummary out;
  out.a_min = eig.values.front();
  out.a_max = eig.values.back();
  out.delta = out.a_max - out.a_min;

  // Collect the clusters at each extreme and, when degenerate, replace the
  // reported vector by the projection of the lowest-index basis vector onto
  // the cluster span (stable under any eigensolver ordering).
  auto cluster_vector = [&](bool at_min, bool* degenerate) {
    std::vector<int> members;
    for (int k = 0; k < n; ++k) {
      const double d = at_min ? (eig.values[k] - out.a_min) : (out.a_max - eig.values[k]);
      if (d < tol) members.push_back(k);
    }
    *degenerate = members.size() > 1;
    if (!*degenerate) return eig.vectors[members.front()];
    for (int j = 0; j < n; ++j) {
      std::vector<Complex> proj(n, Complex(0.0, 0.0));
      double norm2 = 0.0;
      for (int k : members) {
        const Complex coeff = std::conj(eig.vectors[k][j]);
        norm2 += std::norm(coeff);
        for (int i = 0; i < n; ++i) proj[i] += coeff * eig.vectors[k][i];
      }
      if (norm2 > 1e-12) {
        const double nn = std::sqrt(norm2);
        for (Complex& z : proj) z /= nn;
        canonicalize_vector(proj);
        return proj;
      }
    }
    throw std::runtime_error("degenerate extreme cluster has no basis support");
  };
  out.v_min = cluster_vector(true, &out.degenerate_min);
  out.v_max = cluster_vector(false, &out.degenerate_max);
  return out;
}

HermitianObservable pauli_x() {
  return HermitianObservable(ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}));
}

HermitianObservable pauli_y() {
  return HermitianObservable(
      ComplexMatrix::from_rows({{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}}));
}

HermitianObservable pauli_z() {
  return HermitianObservable(ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}}));
}

// --------------------------------------------------------------- operations

QuantumState apply_matrix(const ComplexMatrix& m, const QuantumState& state) {
  if (m.dim() != state.total_dim())
    throw DimensionMismatch("matrix/state dimension mismatch");
  const int n = m.dim();
  std::vector<Complex> out(n, Complex(0.0, 0.0));
  for (int r = 0; r < n; ++r) {
    Complex s(0.0, 0.0);
    for (int c = 0; c < n; ++c) s += m.at(r, c) * state.amplitudes()[c];
    out[r] = s;
  }
  return QuantumState(std::move(out), state.dims());
}

QuantumState apply(const HermitianObservable& obs, const QuantumState& state) {
  return apply_matrix(obs.matrix(), state);
}

double expectation(const QuantumState& state, const HermitianObservable& obs) {
  return overlap(state, apply(obs, state)).real();
}

double variance(const QuantumState& state, const HermitianObservable& obs) {
  const QuantumState w = apply(obs, state);
  const double second_moment = overlap(w, w).real();  // ⟨O²⟩, exactly real
  const double mean = overlap(state, w).real();
  return std::max(0.0, second_moment - mean * mean);
}

HermitianObservable tensor(const HermitianObservable& a, const HermitianObservable& b) {
  return HermitianObservable(kron(a.matrix(), b.matrix()));
}

PostselectionResult postselect(const QuantumState& joint, const QuantumState& target,
                               const std::vector<int>& factors) {
  const auto& dims = joint.dims();
  const int m = static_cast<int>(dims.size());
  if (factors.empty()) throw DimensionMismatch("postselection needs at least one factor");
  for (size_t i = 0; i < factors.size(); ++i) {
    if (factors[i] < 0 || factors[i] >= m)
      throw DimensionMismatch("postselection factor index out of range");
    if (i > 0 && factors[i] <= factors[i - 1])
      throw DimensionMismatch("postselection factors must be strictly increasing");
  }
  {
    std::vector<int> tdims;
    for (int f : factors) tdims.push_back(dims[f]);
    if (tdims != target.dims())
      throw DimensionMismatch("target factors do not match the selected factors");
  }

  std::vector<bool> selected(m, false);
  for (int f : factors) selected[f] = true;
  std::vector<int> rest_dims;
  for (int i = 0; i < m; ++i)
    if (!selected[i]) rest_dims.push_back(dims[i]);
  const bool full = rest_dims.empty();
  if (full) rest_dims.push_back(1);

  long long rest_total = 1;
  for (int d : rest_dims) rest_total *= d;
  std::vector<Complex> collapsed(static_cast<size_t>(rest_total), Complex(0.0, 0.0));

  // One pass over the joint amplitudes: split each flat index into the
  // selected-factor part and the remaining part.
  const int total = joint.total_dim();
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    long long t_index = 0;
    long long r_index = 0;
    for (int i = 0; i < m; ++i) {
      int stride = 1;
      for (int j = i + 1; j < m; ++j) stride *= dims[j];
      const int digit = rem / stride;
      rem %= stride;
      if (selected[i])
        t_index = t_index * dims[i] + digit;
      else
        r_index = r_index * dims[i] + digit;
    }
    const Complex t_amp = target.amplitudes()[static_cast<size_t>(t_index)];
    if (t_amp == Complex(0.0, 0.0)) continue;
    collapsed[static_cast<size_t>(full ? 0 : r_index)] +=
        std::conj(t_amp) * joint.amplitudes()[idx];
  }

  PostselectionResult out;
  out.collapsed = QuantumState(std::move(collapsed), rest_dims);
  const double n = out.collapsed.norm();
  out.probability = n * n;
  out.zero_overlap = out.probability < kZeroProbabilityFloor;
  return out;
}

QuantumState evolve_exp(const QuantumState& state, const HermitianObservable& generator,
                        double angle) {
  if (generator.dim() != state.total_dim())
    throw DimensionMismatch("generator/state dimension mismatch");
  const Eigensystem& eig = generator.eigensystem();
  const int n = generator.dim();
  std::vector<Complex> out(n, Complex(0.0, 0.0));
  for (int k = 0; k < n; ++k) {
    Complex coeff(0.0, 0.0);
    for (int i = 0; i < n; ++i) coeff += std::conj(eig.vectors[k][i]) * state.amplitudes()[i];
    coeff *= std::exp(Complex(0.0, -angle * eig.values[k]));
    for (int i = 0; i < n; ++i) out[i] += coeff * eig.vectors[k][i];
  }
  return QuantumState(std::move(out), state.dims());
}

std::vector<QuantumState> complete_orthonormal_basis(const QuantumState& seed) {
  const QuantumState first = seed.normalized();
  const int n = first.total_dim();
  std::vector<std::vector<Complex>> basis{first.amplitudes()};
  for (int j = 0; j < n && static_cast<int>(basis.size()) < n; ++j) {
    std::vector<Complex> v(n, Complex(0.0, 0.0));
    v[j] = 1.0;
    for (const auto& b : basis) {
      const Complex proj = vec_dot(b, v);
      for (int i = 0; i < n; ++i) v[i] -= proj * b[i];
    }
    const double nn = vec_norm(v);
    if (nn > 1e-8) {
      for (Complex& z : v) z /= nn;
      canonicalize_vector(v);
      basis.push_back(std::move(v));
    }
  }
  if (static_cast<int>(basis.size()) != n)
    throw std::runtime_error("orthonormal completion lost rank");
  std::vector<QuantumState> out;
  out.reserve(n);
  for (auto& v : basis) out.emplace_back(std::move(v), seed.dims());
  return out;
}

}  // namespace weakmeas
