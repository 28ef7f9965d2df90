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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace weakmeas {
namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

QuantumState plus_state() { return QuantumState({kInvSqrt2, kInvSqrt2}, {2}); }

QuantumState random_state(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Complex> amps(dim);
  for (auto& z : amps) z = Complex(g(rng), g(rng));
  return QuantumState(std::move(amps), {dim}).normalized();
}

ComplexMatrix random_hermitian(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexMatrix m(n);
  for (int r = 0; r < n; ++r) {
    m.at(r, r) = u(rng);
    for (int c = r + 1; c < n; ++c) {
      const Complex z(u(rng), u(rng));
      m.at(r, c) = z;
      m.at(c, r) = std::conj(z);
    }
  }
  return m;
}

WeakMeasurementSetup qubit_setup(double g, const QuantumState& pointer) {
  return WeakMeasurementSetup{g, pauli_z(), pauli_x(), plus_state(), std::nullopt, pointer};
}

// ---------- classical Fisher information ----------

TEST(Fisher, ClassicalBernoulli) {
  EXPECT_NEAR(classical_fisher({{0.5, 0.5}, {1.0, -1.0}}), 4.0, 1e-14);
}

TEST(Fisher, ClassicalRotatingQubitIsConstant) {
  for (double theta : {0.2, 0.7, 1.1}) {
    const double c2 = std::cos(theta) * std::cos(theta);
    const double s2 = 1.0 - c2;
    const double d = std::sin(2.0 * theta);
    EXPECT_NEAR(classical_fisher({{c2, s2}, {-d, d}}), 4.0, 1e-12) << theta;
  }
}

TEST(Fisher, ClassicalSkipsVanishingOutcomesAndValidates) {
  // An outcome below the probability floor contributes nothing.
  EXPECT_NEAR(classical_fisher({{1.0, 1e-310}, {1.0, -1.0}}), 1.0, 1e-12);
  EXPECT_THROW(classical_fisher({{0.5, 0.5}, {1.0, 1.0}}), InconsistentDerivative);
  EXPECT_THROW(classical_fisher({{0.7, 0.7}, {1.0, -1.0}}), ProbabilityOutOfRange);
  EXPECT_THROW(classical_fisher({{-0.1, 1.1}, {1.0, -1.0}}), ProbabilityOutOfRange);
}

// ---------- quantum Fisher information ----------

TEST(Fisher, QuantumPureMatchesGeneratorVariance) {
  auto rng = std::mt19937_64(19);
  for (int trial = 0; trial < 25; ++trial) {
    const HermitianObservable h{random_hermitian(4, rng)};
    const QuantumState psi = random_state(4, rng);
    const QuantumState phi = evolve_exp(psi, h, 0.2);
    // ∂Φ = −iĤ·Φ for Φ(g) = e^{−igĤ}ψ.
    const QuantumState dphi(
        apply_matrix(Complex(0.0, -1.0) * h.matrix(), phi).amplitudes(), phi.dims());
    EXPECT_NEAR(quantum_fisher_pure(phi, dphi), 4.0 * variance(psi, h), 1e-10);
  }
}

TEST(Fisher, QuantumPureRequiresNormalizedState) {
  const QuantumState bad({1.0, 1.0}, {2});
  EXPECT_THROW(quantum_fisher_pure(bad, bad), NotNormalized);
}

TEST(Fisher, NoPostselectionCeilingMatchesJointOracle) {
  auto rng = std::mt19937_64(29);
  for (int trial = 0; trial < 10; ++trial) {
    WeakMeasurementSetup setup{0.0,
                               HermitianObservable{random_hermitian(3, rng)},
                               HermitianObservable{random_hermitian(2, rng)},
                               random_state(3, rng),
                               std::nullopt,
                               random_state(2, rng)};
    // Oracle: QFI of e^{−ig·Â⊗F̂}(Ψi⊗D) is 4·Var(Â⊗F̂) in the joint state.
    const QuantumState joint = tensor(setup.psi_i, setup.pointer_init);
    const HermitianObservable gen = tensor(setup.system_obs, setup.pointer_obs);
    const QuantumState djoint(
        apply_matrix(Complex(0.0, -1.0) * gen.matrix(), joint).amplitudes(), joint.dims());
    EXPECT_NEAR(no_postselection_qfi(setup), quantum_fisher_pure(joint, djoint), 1e-10);
  }
  EXPECT_NEAR(no_postselection_qfi(qubit_setup(0.0, basis_state({2}, 0))), 4.0, 1e-13);
}

// ---------- per-branch budget ----------

TEST(Fisher, DominantBranchBenchmark) {
  // Conditioned value 10 from σz in |+⟩, pointer σx in |0⟩, g = 1e-3:
  // the kept branch carries probability 1/101, first-order information
  // 4(100 − 10⁴·g²·100/101·…)/101 = 3.96 exactly for this configuration.
  const WeakMeasurementSetup setup = qubit_setup(1e-3, basis_state({2}, 0));
  const auto basis = default_branch_basis(setup.psi_i, setup.system_obs, Complex(10.0, 0.0));
  const FisherReport report = per_branch_fisher(setup, basis);
  ASSERT_EQ(report.per_branch.size(), 2u);
  const BranchInfo& kept = report.per_branch[0];
  EXPECT_NEAR(kept.probability, 1.0 / 101.0, 1e-12);
  ASSERT_TRUE(kept.weak_value_finite);
  EXPECT_NEAR(std::abs(kept.weak_value - Complex(10.0, 0.0)), 0.0, 1e-9);
  EXPECT_NEAR(kept.weighted_info, 3.96, 1e-9);
  // The exact conditioned-state value agrees with the first-order one here.
  EXPECT_NEAR(kept.exact_weighted_qfi, kept.weighted_info, 0.02 * kept.weighted_info);
  EXPECT_NEAR(report.quantum, 4.0, 1e-12);
  EXPECT_LE(report.classical, report.quantum + 1e-9);
}

TEST(Fisher, OrthogonalBranchKeepsItsFiniteInformation) {
  // Branch |−⟩ is orthogonal to |+⟩ but σz connects them: m = 1, so the
  // branch still carries 4·|m|²·Var(F̂) = 4 at first order.
  const WeakMeasurementSetup setup = qubit_setup(1e-3, basis_state({2}, 0));
  const QuantumState minus({kInvSqrt2, -kInvSqrt2}, {2});
  const FisherReport report = per_branch_fisher(setup, {plus_state(), minus});
  const BranchInfo& dark = report.per_branch[1];
  EXPECT_FALSE(dark.weak_value_finite);
  EXPECT_NEAR(dark.probability, 0.0, 1e-20);
  EXPECT_NEAR(dark.weighted_info, 4.0, 1e-12);
  // The exact conditioned pointer state of this branch is the frozen ray
  // −i·sin(g)·|1⟩: its state information is exactly zero, and everything the
  // branch knows sits in its probability sin²(g).  The classical term over
  // branch probabilities (cos²g, sin²g) recovers the full 4.
  EXPECT_NEAR(dark.exact_weighted_qfi, 0.0, 1e-8);
  EXPECT_NEAR(report.classical, 4.0, 1e-8);
}

TEST(Fisher, PerBranchValidatesBasis) {
  const WeakMeasurementSetup setup = qubit_setup(1e-3, basis_state({2}, 0));
  EXPECT_THROW(per_branch_fisher(setup, {plus_state(), plus_state()}), BasisNotOrthonormal);
  EXPECT_THROW(per_branch_fisher(setup, {}), BasisNotOrthonormal);
  const QuantumState unnorm({1.0, 1.0}, {2});
  EXPECT_THROW(per_branch_fisher(setup, {unnorm}), BasisNotOrthonormal);
}

// ---------- sum rule ----------

TEST(Fisher, SumRuleVanishesAtZeroCoupling) {
  auto rng = std::mt19937_64(59);
  for (int trial = 0; trial < 10; ++trial) {
    WeakMeasurementSetup setup{0.0,
                               HermitianObservable{random_hermitian(4, rng)},
                               HermitianObservable{random_hermitian(2, rng)},
                               random_state(4, rng),
                               std::nullopt,
                               random_state(2, rng)};
    const auto basis = complete_orthonormal_basis(random_state(4, rng));
    const SumRuleCheck check = sum_rule_check(setup, basis);
    EXPECT_NEAR(check.deficit, 0.0, 1e-10 * std::max(1.0, check.rhs));
  }
}

TEST(Fisher, SumRuleDeficitQuadraticForUnbiasedPointer) {
  // ⟨F̂⟩_D = 0 makes every branch quantity even in the coupling, so the
  // deficit is exactly quadratic: halving g divides it by 4.
  const auto basis = default_branch_basis(plus_state(), pauli_z(), Complex(0.0, 10.0));
  auto deficit = [&](double g) {
    return sum_rule_check(qubit_setup(g, basis_state({2}, 0)), basis).deficit;
  };
  EXPECT_NEAR(deficit(1e-3) / deficit(5e-4), 4.0, 1e-6);
  EXPECT_GT(deficit(1e-3), 0.0);
}

TEST(Fisher, SumRuleDeficitLinearForBiasedPointer) {
  // A pointer with ⟨F̂⟩_D ≠ 0 exposes the first-order term: halving g
  // roughly halves the deficit.
  const QuantumState biased({std::cos(M_PI / 8), std::sin(M_PI / 8)}, {2});
  const auto basis = default_branch_basis(plus_state(), pauli_z(), Complex(0.0, 10.0));
  auto deficit = [&](double g) { return sum_rule_check(qubit_setup(g, biased), basis).deficit; };
  const double ratio = deficit(1e-3) / deficit(5e-4);
  EXPECT_GT(ratio, 1.6);
  EXPECT_LT(ratio, 2.4);
}

TEST(Fisher, SumRuleNeedsCompleteBasis) {
  const WeakMeasurementSetup setup = qubit_setup(1e-3, basis_state({2}, 0));
  EXPECT_THROW(sum_rule_check(setup, {plus_state()}), BasisNotOrthonormal);
}

// ---------- POVM validation ----------

TEST(Fisher, ValidatePovmAcceptsProjectiveAndRejectsBroken) {
  const PovmElement p0{ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, 0.0}})};
  const PovmElement p1{ComplexMatrix::from_rows({{0.0, 0.0}, {0.0, 1.0}})};
  EXPECT_NO_THROW(validate_povm({p0, p1}, 2));
  // Halved identity pieces are fine too (non-projective).
  const PovmElement h0{ComplexMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}})};
  const PovmElement h1{ComplexMatrix::from_rows({{0.5, -0.5}, {-0.5, 0.5}})};
  EXPECT_NO_THROW(validate_povm({h0, h1}, 2));
  // Sum misses the identity.
  EXPECT_THROW(validate_povm({p0, p0}, 2), BasisNotPovm);
  // Negative element.
  const PovmElement neg{ComplexMatrix::from_rows({{1.5, 0.0}, {0.0, 1.5}})};
  const PovmElement cmp{ComplexMatrix::from_rows({{-0.5, 0.0}, {0.0, -0.5}})};
  EXPECT_THROW(validate_povm({neg, cmp}, 2), BasisNotPovm);
}

}  // namespace
}  // namespace weakmeas
