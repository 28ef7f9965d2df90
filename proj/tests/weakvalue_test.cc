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

#include "weakmeas/weakvalue.hpp"

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

// Exact conditioned pointer shift: evolve the joint state, condition on the
// postselection, compare readout means. Independent of the linear-response
// formula under test.
double exact_pointer_shift(const WeakMeasurementSetup& setup,
                           const HermitianObservable& readout_obs) {
  const QuantumState joint = tensor(setup.psi_i, setup.pointer_init);
  const HermitianObservable generator = tensor(setup.system_obs, setup.pointer_obs);
  const QuantumState evolved = evolve_exp(joint, generator, setup.coupling);
  std::vector<int> factors(setup.psi_i.dims().size());
  for (size_t i = 0; i < factors.size(); ++i) factors[i] = static_cast<int>(i);
  const PostselectionResult res = postselect(evolved, *setup.psi_f, factors);
  const QuantumState pointer = res.collapsed.normalized();
  return expectation(pointer, readout_obs) - expectation(setup.pointer_init, readout_obs);
}

// ---------- conditioned values ----------

TEST(WeakValue, IdentityWhenPostselectingAnEigenstateDirection) {
  // ⟨0|σz|+⟩ / ⟨0|+⟩ = 1.
  const Complex aw = weak_value(plus_state(), basis_state({2}, 0), pauli_z());
  EXPECT_NEAR(std::abs(aw - Complex(1.0, 0.0)), 0.0, 1e-13);
}

TEST(WeakValue, AmplificationGrowsAsPostselectionApproachesOrthogonality) {
  // Ψf ∝ |0⟩ − (1−δ)|1⟩ against Ψi = |+⟩ gives (2−δ)/δ for σz.
  for (double delta : {0.5, 0.1, 0.01}) {
    const QuantumState psi_f =
        QuantumState({1.0, -(1.0 - delta)}, {2}).normalized();
    const Complex aw = weak_value(plus_state(), psi_f, pauli_z());
    EXPECT_NEAR(aw.real(), (2.0 - delta) / delta, 1e-9 / delta);
    EXPECT_NEAR(aw.imag(), 0.0, 1e-10);
  }
}

TEST(WeakValue, OrthogonalPostselectionThrows) {
  const QuantumState minus = QuantumState({kInvSqrt2, -kInvSqrt2}, {2});
  EXPECT_THROW(weak_value(plus_state(), minus, pauli_z()), OrthogonalPostselection);
}

// ---------- linear-response pointer shift ----------

TEST(WeakValue, PointerShiftClosedFormCases) {
  // F = M = σx, D = |0⟩: shift = 2g·Im(A_w). F = σx, M = σy, D = |0⟩:
  // ⟨[σx,σy]⟩ = 2i⟨σz⟩ = 2i, so shift = −2g·Re(A_w).
  const double g = 1e-3;
  for (const Complex aw : {Complex(0.0, 10.0), Complex(4.0, 0.0), Complex(3.0, -2.0)}) {
    const OptimalPostselection opt =
        optimal_postselection_for_weak_value(plus_state(), pauli_z(), aw);
    WeakMeasurementSetup setup{g, pauli_z(), pauli_x(), plus_state(), opt.psi_f,
                               basis_state({2}, 0)};
    EXPECT_NEAR(pointer_shift_linear_response(setup, pauli_x()), 2.0 * g * aw.imag(), 1e-12);
    EXPECT_NEAR(pointer_shift_linear_response(setup, pauli_y()), -2.0 * g * aw.real(), 1e-12);
  }
}

TEST(WeakValue, PointerShiftMatchesExactEvolutionToSecondOrder) {
  const Complex aw(5.0, 3.0);
  const OptimalPostselection opt =
      optimal_postselection_for_weak_value(plus_state(), pauli_z(), aw);
  for (const auto& readout : {pauli_x(), pauli_y()}) {
    double prev_err = 0.0;
    for (int halvings = 0; halvings < 2; ++halvings) {
      const double g = 1e-3 / (1 << halvings);
      WeakMeasurementSetup setup{g, pauli_z(), pauli_x(), plus_state(), opt.psi_f,
                                 basis_state({2}, 0)};
      const double lin = pointer_shift_linear_response(setup, readout);
      const double exact = exact_pointer_shift(setup, readout);
      const double err = std::abs(lin - exact);
      EXPECT_LE(err, 0.02 * std::abs(exact) + 1e-12);
      if (halvings > 0 && prev_err > 1e-10) {
        // Halving g shrinks the discrepancy at least quadratically (some
        // configurations cancel the g² term and scale cubically, ratio 8).
        EXPECT_GT(prev_err / err, 3.5);
        EXPECT_LT(prev_err / err, 8.5);
      }
      prev_err = err;
    }
  }
}

TEST(WeakValue, LinearResponseValidityHeuristic) {
  EXPECT_TRUE(linear_response_valid(1e-3, Complex(50.0, 0.0)));
  EXPECT_FALSE(linear_response_valid(1e-2, Complex(50.0, 0.0)));
}

// ---------- optimal postselection at fixed conditioned value ----------

TEST(WeakValue, OptimalPostselectionQubitBenchmark) {
  // σz in |+⟩, target 10: maximum probability 1/(1+|A_w|²) = 1/101.
  const OptimalPostselection opt =
      optimal_postselection_for_weak_value(plus_state(), pauli_z(), Complex(10.0, 0.0));
  EXPECT_NEAR(opt.p_max, 1.0 / 101.0, 1e-14);
  const Complex aw = weak_value(plus_state(), opt.psi_f, pauli_z());
  EXPECT_NEAR(std::abs(aw - Complex(10.0, 0.0)), 0.0, 1e-10);
  // The reported maximum is exactly the achieved overlap probability.
  EXPECT_NEAR(std::norm(overlap(opt.psi_f, plus_state())), opt.p_max, 1e-12);
}

TEST(WeakValue, OptimalPostselectionRoundTripsAcrossDimensions) {
  auto rng = std::mt19937_64(101);
  for (int dim : {2, 3, 4, 8}) {
    const HermitianObservable obs{random_hermitian(dim, rng)};
    const QuantumState psi_i = random_state(dim, rng);
    for (const Complex target : {Complex(12.0, 0.0), Complex(-7.0, 4.0), Complex(0.0, 20.0)}) {
      const OptimalPostselection opt =
          optimal_postselection_for_weak_value(psi_i, obs, target);
      const Complex aw = weak_value(psi_i, opt.psi_f, obs);
      EXPECT_NEAR(std::abs(aw - target), 0.0, 1e-9) << "dim=" << dim;
      EXPECT_NEAR(std::norm(overlap(opt.psi_f, psi_i)), opt.p_max, 1e-12);
      EXPECT_NEAR(opt.p_max, postselection_probability_bound(psi_i, obs, target), 1e-12);
    }
  }
}

TEST(WeakValue, NoRandomPostselectionBeatsTheProbabilityBound) {
  auto rng = std::mt19937_64(77);
  const HermitianObservable obs{random_hermitian(3, rng)};
  const QuantumState psi_i = random_state(3, rng);
  for (int trial = 0; trial < 2000; ++trial) {
    const QuantumState psi_f = random_state(3, rng);
    Complex w;
    try {
      w = weak_value(psi_i, psi_f, obs);
    } catch (const OrthogonalPostselection&) {
      continue;
    }
    const double p = std::norm(overlap(psi_f, psi_i));
    EXPECT_LE(p, postselection_probability_bound(psi_i, obs, w) + 1e-9);
  }
}

TEST(WeakValue, OptimalPostselectionLargeTargetProbabilityScalesAsVarOverSquare) {
  // For |target| ≫ ‖Â‖ the maximum probability approaches Var/|target|².
  const OptimalPostselection opt =
      optimal_postselection_for_weak_value(plus_state(), pauli_z(), Complex(0.0, 200.0));
  EXPECT_NEAR(opt.p_max * 200.0 * 200.0, 1.0, 1e-3);
}

TEST(WeakValue, OptimalPostselectionRejectsZeroVariance) {
  EXPECT_THROW(
      optimal_postselection_for_weak_value(basis_state({2}, 0), pauli_z(), Complex(2.0, 0.0)),
      ZeroVariance);
}

// ---------- optimal conditioned value at fixed probability ----------

TEST(WeakValue, BoundedWeakValueClosedForm) {
  // σz in |+⟩ has ⟨Â⟩ = 0, Var = 1: A_w(p) = √((1−p)/p).
  const BoundedWeakValue b = optimal_weak_value_for_probability(plus_state(), pauli_z(), 0.01);
  EXPECT_NEAR(b.weak_value, std::sqrt(99.0), 1e-12);
  EXPECT_NEAR(std::norm(overlap(b.psi_f, plus_state())), 0.01, 1e-12);
  const Complex aw = weak_value(plus_state(), b.psi_f, pauli_z());
  EXPECT_NEAR(std::abs(aw - Complex(b.weak_value, 0.0)), 0.0, 1e-10);
}

TEST(WeakValue, BoundedWeakValueAtFullProbabilityIsTheMean) {
  auto rng = std::mt19937_64(13);
  const HermitianObservable obs{random_hermitian(4, rng)};
  const QuantumState psi_i = random_state(4, rng);
  const BoundedWeakValue b = optimal_weak_value_for_probability(psi_i, obs, 1.0);
  EXPECT_NEAR(b.weak_value, expectation(psi_i, obs), 1e-12);
  EXPECT_LE(phase_free_distance(b.psi_f, psi_i), 1e-12);
}

TEST(WeakValue, BoundedWeakValueValidatesInputs) {
  EXPECT_THROW(optimal_weak_value_for_probability(plus_state(), pauli_z(), 0.0),
               ProbabilityOutOfRange);
  EXPECT_THROW(optimal_weak_value_for_probability(plus_state(), pauli_z(), 1.5),
               ProbabilityOutOfRange);
  EXPECT_THROW(optimal_weak_value_for_probability(basis_state({2}, 1), pauli_z(), 0.5),
               ZeroVariance);
}

}  // namespace
}  // namespace weakmeas
