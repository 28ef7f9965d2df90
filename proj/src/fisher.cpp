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

#include "weakmeas/fisher.hpp"

#include <cmath>

namespace weakmeas {

namespace {

constexpr double kFdStep = 1e-6;

// Pointer moments used by every first-order expression.
struct PointerMoments {
  double mean_f = 0.0;       // ⟨F̂⟩
  double second_f = 0.0;     // ⟨F̂²⟩
  double var_f = 0.0;        // Var(F̂)
};

PointerMoments pointer_moments(const WeakMeasurementSetup& setup) {
  PointerMoments m;
  const QuantumState w = apply(setup.pointer_obs, setup.pointer_init);
  m.second_f = overlap(w, w).real();
  m.mean_f = overlap(setup.pointer_init, w).real();
  m.var_f = std::max(0.0, m.second_f - m.mean_f * m.mean_f);
  return m;
}

// exp(−i·angle·Â⊗F̂)|joint⟩, matrix-free: scaled Taylor series applied with
// one factor at a time. Handles joint dimensions far beyond the dense
// eigensolver cap.
std::vector<Complex> evolve_product_generator(const std::vector<Complex>& joint,
                                              const ComplexMatrix& a, const ComplexMatrix& f,
                                              double angle) {
  const int ds = a.dim();
  const int dp = f.dim();
  // Crude spectral bound for step control: product of Frobenius norms.
  double fro_a = 0.0, fro_f = 0.0;
  for (int r = 0; r < ds; ++r)
    for (int c = 0; c < ds; ++c) fro_a += std::norm(a.at(r, c));
  for (int r = 0; r < dp; ++r)
    for (int c = 0; c < dp; ++c) fro_f += std::norm(f.at(r, c));
  const double bound = std::sqrt(fro_a * fro_f) * std::abs(angle);
  int steps = 1;
  while (bound / steps > 0.5 && steps < (1 << 20)) steps *= 2;
  const double h = angle / steps;

  auto apply_generator = [&](const std::vector<Complex>& in) {
    std::vector<Complex> tmp(in.size(), Complex(0.0, 0.0));
    for (int s = 0; s < ds; ++s)
      for (int p = 0; p < dp; ++p) {
        Complex acc(0.0, 0.0);
        for (int q = 0; q < dp; ++q) acc += f.at(p, q) * in[static_cast<size_t>(s) * dp + q];
        tmp[static_cast<size_t>(s) * dp + p] = acc;
      }
    std::vector<Complex> out(in.size(), Complex(0.0, 0.0));
    for (int p = 0; p < dp; ++p)
      for (int s = 0; s < ds; ++s) {
        Complex acc(0.0, 0.0);
        for (int t = 0; t < ds; ++t) acc += a.at(s, t) * tmp[static_cast<size_t>(t) * dp + p];
        out[static_cast<size_t>(s) * dp + p] = acc;
      }
    return out;
  };

  std::vector<Complex> state = joint;
  for (int step = 0; step < steps; ++step) {
    std::vector<Complex> term = state;
    std::vector<Complex> sum = state;
    for (int k = 1; k < 64; ++k) {
      term = apply_generator(term);
      const Complex factor = Complex(0.0, -h) / static_cast<double>(k);
      double mag = 0.0;
      for (size_t i = 0; i < term.size(); ++i) {
        term[i] *= factor;
        sum[i] += term[i];
        mag += std::norm(term[i]);
      }
      if (std::sqrt(mag) < 1e-18) break;
    }
    state = std::move(sum);
  }
  return state;
}

// The unnormalized branch residue u_k(g): pointer-space vector left after the
// interaction when the system is found in `branch`.
std::vector<Complex> branch_residue(const std::vector<Complex>& evolved_joint,
                                    const QuantumState& branch, int pointer_dim) {
  const int ds = branch.total_dim();
  std::vector<Complex> u(pointer_dim, Complex(0.0, 0.0));
  for (int s = 0; s < ds; ++s) {
    const Complex c = std::conj(branch.amplitudes()[s]);
    if (c == Complex(0.0, 0.0)) continue;
    for (int p = 0; p < pointer_dim; ++p)
      u[p] += c * evolved_joint[static_cast<size_t>(s) * pointer_dim + p];
  }
  return u;
}

double vec_norm2(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const Complex& z : v) s += std::norm(z);
  return s;
}

Complex vec_dot(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  Complex s(0.0, 0.0);
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

void check_orthonormal(const std::vector<QuantumState>& branches, int dim) {
  if (branches.empty()) throw BasisNotOrthonormal("branch set is empty");
  if (static_cast<int>(branches.size()) > dim)
    throw BasisNotOrthonormal("more branches than the space supports");
  for (size_t a = 0; a < branches.size(); ++a) {
    if (branches[a].total_dim() != dim)
      throw DimensionMismatch("branch dimension does not match the system");
    for (size_t b = 0; b <= a; ++b) {
      const double want = a == b ? 1.0 : 0.0;
      if (std::abs(std::abs(overlap(branches[a], branches[b])) - want) > 1e-10)
        throw BasisNotOrthonormal("branch states are not orthonormal within 1e-10");
    }
  }
}

}  // namespace

double classical_fisher(const OutcomeDistribution& dist) {
  if (dist.probabilities.size() != dist.derivatives.size())
    throw DimensionMismatch("probability/derivative length mismatch");
  double total = 0.0;
  for (double p : dist.probabilities) {
    if (p < 0.0) throw ProbabilityOutOfRange("probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-8)
    throw ProbabilityOutOfRange("probabilities must sum to 1 within 1e-8");
  double dsum = 0.0;
  for (double d : dist.derivatives) dsum += d;
  if (std::abs(dsum) > 1e-8)
    throw InconsistentDerivative("derivatives must sum to 0 within 1e-8");
  double info = 0.0;
  for (size_t j = 0; j < dist.probabilities.size(); ++j)
    if (dist.probabilities[j] >= kZeroProbabilityFloor)
      info += dist.derivatives[j] * dist.derivatives[j] / dist.probabilities[j];
  return info;
}

double quantum_fisher_pure(const QuantumState& state, const QuantumState& derivative) {
  if (state.total_dim() != derivative.total_dim())
    throw DimensionMismatch("state/derivative dimension mismatch");
  if (std::abs(state.norm() - 1.0) > 1e-10)
    throw NotNormalized("quantum Fisher information requires a normalized state");
  const Complex sd = overlap(state, derivative);
  const double dd = overlap(derivative, derivative).real();
  return std::max(0.0, 4.0 * (dd - std::norm(sd)));
}

double no_postselection_qfi(const WeakMeasurementSetup& setup) {
  const QuantumState a_psi = apply(setup.system_obs, setup.psi_i);
  const double second_a = overlap(a_psi, a_psi).real();
  const double mean_a = overlap(setup.psi_i, a_psi).real();
  const PointerMoments pm = pointer_moments(setup);
  return 4.0 * (second_a * pm.second_f - mean_a * mean_a * pm.mean_f * pm.mean_f);
}

void validate_povm(const std::vector<PovmElement>& elements, int dim) {
  if (elements.empty()) throw BasisNotPovm("POVM needs at least one element");
  ComplexMatrix sum(dim);
  for (const PovmElement& e : elements) {
    if (e.matrix.dim() != dim) throw BasisNotPovm("POVM element dimension mismatch");
    const Eigensystem eig = eig_hermitian(e.matrix);  // also enforces Hermiticity
    if (eig.values.front() < -1e-10)
      throw BasisNotPovm("POVM element is not positive semidefinite");
    sum = sum + e.matrix;
  }
  const ComplexMatrix defect = sum - ComplexMatrix::identity(dim);
  if (defect.max_abs() > 1e-10)
    throw BasisNotPovm("POVM elements do not resolve the identity within 1e-10");
}

double branch_information_linear(const WeakMeasurementSetup& setup,
                                 const QuantumState& branch) {
  if (branch.total_dim() != setup.psi_i.total_dim())
    throw DimensionMismatch("branch dimension does not match the system");
  const Complex m = overlap(branch, apply(setup.system_obs, setup.psi_i));
  const Complex o = overlap(branch, setup.psi_i);
  const PointerMoments pm = pointer_moments(setup);
  const double m2 = std::norm(m);
  double info = m2 * pm.var_f;
  if (std::abs(o) > 1e-12) {
    const double g = setup.coupling;
    const double im_weighted = m2 * std::imag(m / o);  // |m|²·Im(m/o)
    info -= pm.second_f *
            (2.0 * g * pm.mean_f * im_weighted + g * g * pm.second_f * m2 * m2 / std::norm(o));
  }
  return 4.0 * info;
}

std::vector<QuantumState> default_branch_basis(const QuantumState& psi_i,
                                               const HermitianObservable& obs, Complex target) {
  return complete_orthonormal_basis(
      optimal_postselection_for_weak_value(psi_i, obs, target).psi_f);
}

FisherReport per_branch_fisher(const WeakMeasurementSetup& setup,
                               const std::vector<QuantumState>& branches) {
  const int ds = setup.psi_i.total_dim();
  const int dp = setup.pointer_init.total_dim();
  check_orthonormal(branches, ds);

  // Joint amplitudes ψ_i ⊗ D, evolved at the five couplings the
  // Richardson-refined central differences need.
  std::vector<Complex> joint(static_cast<size_t>(ds) * dp);
  for (int s = 0; s < ds; ++s)
    for (int p = 0; p < dp; ++p)
      joint[static_cast<size_t>(s) * dp + p] =
          setup.psi_i.amplitudes()[s] * setup.pointer_init.amplitudes()[p];
  const ComplexMatrix& a = setup.system_obs.matrix();
  const ComplexMatrix& f = setup.pointer_obs.matrix();
  const double g = setup.coupling;
  const double h = kFdStep;
  const auto at_g = evolve_product_generator(joint, a, f, g);
  const auto at_ph = evolve_product_generator(joint, a, f, g + h);
  const auto at_mh = evolve_product_generator(joint, a, f, g - h);
  const auto at_ph2 = evolve_product_generator(joint, a, f, g + 0.5 * h);
  const auto at_mh2 = evolve_product_generator(joint, a, f, g - 0.5 * h);

  FisherReport report;
  report.quantum = no_postselection_qfi(setup);

  std::vector<double> probs;
  std::vector<double> derivs;
  for (size_t k = 0; k < branches.size(); ++k) {
    const QuantumState& branch = branches[k];
    BranchInfo info;
    info.label = "branch" + std::to_string(k);
    const Complex o = overlap(branch, setup.psi_i);
    const Complex m = overlap(branch, apply(setup.system_obs, setup.psi_i));
    info.probability = std::norm(o);
    info.weak_value_finite = std::abs(o) > 1e-12;
    info.weak_value = info.weak_value_finite ? m / o : Complex(0.0, 0.0);
    info.weighted_info = branch_information_linear(setup, branch);

    // Exact branch residue u(g) and its Richardson-refined derivative.
    const auto u = branch_residue(at_g, branch, dp);
    const auto up = branch_residue(at_ph, branch, dp);
    const auto um = branch_residue(at_mh, branch, dp);
    const auto up2 = branch_residue(at_ph2, branch, dp);
    const auto um2 = branch_residue(at_mh2, branch, dp);
    std::vector<Complex> du(dp);
    for (int p = 0; p < dp; ++p) {
      const Complex wide = (up[p] - um[p]) / (2.0 * h);
      const Complex tight = (up2[p] - um2[p]) / h;
      du[p] = (4.0 * tight - wide) / 3.0;
    }
    const double prob_exact = vec_norm2(u);
    double correction = 0.0;
    if (prob_exact >= kZeroProbabilityFloor)
      correction = std::norm(vec_dot(u, du)) / prob_exact;
    info.exact_weighted_qfi = std::max(0.0, 4.0 * (vec_norm2(du) - correction));

    probs.push_back(prob_exact);
    // dP/dg = 2·Re⟨u|∂u⟩, with the same Richardson refinement baked into du.
    derivs.push_back(2.0 * vec_dot(u, du).real());

    report.per_branch.push_back(std::move(info));
    report.sum_over_branches += report.per_branch.back().weighted_info;
  }

  // Classical information of the exact outcome distribution; an incomplete
  // branch set keeps the remaining weight as an explicit discard outcome.
  double ptotal = 0.0, dtotal = 0.0;
  for (double p : probs) ptotal += p;
  for (double d : derivs) dtotal += d;
  if (ptotal < 1.0 - 1e-12 || static_cast<int>(branches.size()) < ds) {
    probs.push_back(std::max(0.0, 1.0 - ptotal));
    derivs.push_back(-dtotal);
  }
  report.classical = classical_fisher({probs, derivs});
  return report;
}

SumRuleCheck sum_rule_check(const WeakMeasurementSetup& setup,
                            const std::vector<QuantumState>& branches) {
  const int ds = setup.psi_i.total_dim();
  check_orthonormal(branches, ds);
  if (static_cast<int>(branches.size()) != ds)
    throw BasisNotOrthonormal("sum rule needs a complete branch basis");
  SumRuleCheck out;
  for (const QuantumState& branch : branches)
    out.lhs += branch_information_linear(setup, branch);
  const QuantumState a_psi = apply(setup.system_obs, setup.psi_i);
  const double second_a = overlap(a_psi, a_psi).real();
  out.rhs = 4.0 * second_a * pointer_moments(setup).var_f;
  out.deficit = out.rhs - out.lhs;
  return out;
}

}  // namespace weakmeas
