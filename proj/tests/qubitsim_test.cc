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

#include "weakmeas/qubitsim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "weakmeas/entangle.hpp"
#include "weakmeas/fisher.hpp"

namespace weakmeas {
namespace {

double state_distance(const QuantumState& a, const QuantumState& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.amplitudes().size(); ++i) {
    sum += std::norm(a.amplitudes()[i] - b.amplitudes()[i]);
  }
  return std::sqrt(sum);
}

QuantumState random_qubits(int qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Complex> amps(std::size_t{1} << qubits);
  for (auto& z : amps) z = Complex(g(rng), g(rng));
  return QuantumState(std::move(amps), std::vector<int>(qubits, 2)).normalized();
}

// The two-branch postselection direction and its orthogonal companion as
// explicit register states.
QuantumState postselection_direction(int n, Complex aw) {
  std::vector<Complex> amps(std::size_t{1} << n, Complex(0.0));
  amps.front() = double(n) + std::conj(aw);
  amps.back() = double(n) - std::conj(aw);
  return QuantumState(std::move(amps), std::vector<int>(n, 2)).normalized();
}

QuantumState postselection_companion(int n, Complex aw) {
  std::vector<Complex> amps(std::size_t{1} << n, Complex(0.0));
  amps.front() = -(double(n) - aw);
  amps.back() = double(n) + aw;
  return QuantumState(std::move(amps), std::vector<int>(n, 2)).normalized();
}

// ---------- gates ----------

TEST(QubitSim, RotationGatesMatchExactExponentials) {
  auto rng = std::mt19937_64(7);
  for (double angle : {0.3, -1.2, 2.9}) {
    const QuantumState psi = random_qubits(1, rng);
    EXPECT_LT(state_distance(apply_gate(rx_gate(0, angle), psi),
                             evolve_exp(psi, pauli_x(), 0.5 * angle)),
              1e-14);
    EXPECT_LT(state_distance(apply_gate(rz_gate(0, angle), psi),
                             evolve_exp(psi, pauli_z(), 0.5 * angle)),
              1e-14);
  }
}

TEST(QubitSim, CnotTruthTableAndBigEndianTargeting) {
  // Control on qubit 0 (most significant bit), target qubit 1.
  const Gate cx = cnot_gate(0, 1);
  const std::vector<int> dims{2, 2};
  for (int in = 0; in < 4; ++in) {
    const int expected = (in & 2) ? (in ^ 1) : in;
    const QuantumState out = apply_gate(cx, basis_state(dims, in));
    EXPECT_NEAR(std::abs(out.amplitudes()[expected]), 1.0, 1e-15) << in;
  }
  // A plain X on qubit 0 of |00⟩ must light up index 2 (binary 10).
  const Gate x0 = unitary1q_gate(0, {Complex(0.0), Complex(1.0), Complex(1.0), Complex(0.0)});
  const QuantumState flipped = apply_gate(x0, basis_state(dims, 0));
  EXPECT_NEAR(std::abs(flipped.amplitudes()[2]), 1.0, 1e-15);
}

TEST(QubitSim, ControlledRotationActsOnlyWhenControlIsSet) {
  auto rng = std::mt19937_64(11);
  const QuantumState pointer = random_qubits(1, rng);
  const double angle = 0.47;
  const QuantumState off = tensor(basis_state({2}, 0), pointer);
  const QuantumState on = tensor(basis_state({2}, 1), pointer);
  const Gate gate = crx_gate(0, 1, angle);
  EXPECT_LT(state_distance(apply_gate(gate, off), off), 1e-15);
  const QuantumState rotated = tensor(basis_state({2}, 1), apply_gate(rx_gate(0, angle), pointer));
  EXPECT_LT(state_distance(apply_gate(gate, on), rotated), 1e-15);
}

TEST(QubitSim, GateValidation) {
  EXPECT_THROW(cnot_gate(1, 1), std::invalid_argument);
  EXPECT_THROW(rx_gate(-1, 0.1), std::invalid_argument);
  EXPECT_THROW(unitary1q_gate(0, {Complex(1.0), Complex(1.0), Complex(0.0), Complex(1.0)}),
               std::invalid_argument);
  const QuantumState two_qubits = basis_state({2, 2}, 0);
  EXPECT_THROW(apply_gate(rx_gate(2, 0.1), two_qubits), std::invalid_argument);
  EXPECT_THROW(apply_gate(rx_gate(0, 0.1), basis_state({3}, 0)), DimensionMismatch);
}

// ---------- GHZ preparation ----------

TEST(QubitSim, PreparedGhzMatchesEnsembleReference) {
  for (int n : {1, 2, 5, 8}) {
    const GhzPreparation prep = prepare_ghz_circuit(n);
    EXPECT_EQ(prep.circuit.size(), static_cast<std::size_t>(n + 1));
    const GhzState reference = ghz_initial_state({n, pauli_z(), 0.0});
    EXPECT_LT(phase_free_distance(prep.state, reference.state), 1e-12) << n;
  }
  EXPECT_THROW(prepare_ghz_circuit(0), DimensionTooLarge);
  EXPECT_THROW(prepare_ghz_circuit(16), DimensionTooLarge);
}

// ---------- interaction decomposition ----------

TEST(QubitSim, InteractionCircuitEqualsProductExponential) {
  auto rng = std::mt19937_64(23);
  for (int n : {1, 3}) {
    const HermitianObservable generator =
        tensor(collective_observable({n, pauli_z(), 0.0}), pauli_x());
    for (double phi : {0.0, 1e-3, 0.01}) {
      const Circuit circuit = interaction_circuit(n, phi);
      for (int trial = 0; trial < 5; ++trial) {
        const QuantumState psi = random_qubits(n + 1, rng);
        // Exact equality including global phase: the decomposition is an
        // operator identity, not a weak-coupling approximation.
        EXPECT_LT(state_distance(apply_circuit(circuit, psi),
                                 evolve_exp(psi, generator, phi)),
                  1e-12);
      }
    }
  }
  EXPECT_THROW(interaction_circuit(2, 0.2), std::invalid_argument);
  EXPECT_THROW(interaction_circuit(2, -0.25), std::invalid_argument);
}

// ---------- postselection angles and circuit ----------

TEST(QubitSim, PostselectionAnglesClosedForm) {
  const PostselectionCircuitAngles angles = postselection_angles(2, Complex(20.0, 0.0));
  EXPECT_NEAR(angles.alpha, -2.0 * std::atan(18.0 / 22.0), 1e-12);
  EXPECT_NEAR(angles.beta, -0.5 * M_PI - M_PI, 1e-12);
  // Huge conditioned values push the branch amplitudes to equal weight.
  EXPECT_NEAR(postselection_angles(2, Complex(1e9, 0.0)).alpha, -0.5 * M_PI, 1e-6);
  EXPECT_THROW(postselection_angles(2, Complex(2.0, 0.0)), SingularWeakValue);
  EXPECT_THROW(postselection_angles(3, Complex(-3.0, 0.0)), SingularWeakValue);
}

TEST(QubitSim, PostselectionAnglesSteerTheCompressedQubitToZero) {
  for (int n : {1, 2, 3}) {
    for (Complex aw : {Complex(5.0, 0.0), Complex(20.0, 10.0), Complex(-3.0, 7.0),
                       Complex(0.0, 0.5)}) {
      const PostselectionCircuitAngles angles = postselection_angles(n, aw);
      EXPECT_LE(angles.alpha, 0.0);
      EXPECT_GT(angles.alpha, -M_PI);
      const QuantumState compressed(
          {double(n) + std::conj(aw), double(n) - std::conj(aw)}, {2});
      const QuantumState steered = apply_circuit(
          {rz_gate(0, angles.beta), rx_gate(0, angles.alpha)}, compressed.normalized());
      EXPECT_NEAR(std::abs(steered.amplitudes()[0]), 1.0, 1e-12);
      EXPECT_NEAR(std::abs(steered.amplitudes()[1]), 0.0, 1e-12);
    }
  }
}

TEST(QubitSim, PostselectCircuitMapsBothBranchDirections) {
  for (int n : {1, 2, 4}) {
    for (Complex aw : {Complex(20.0, 0.0), Complex(20.0, 10.0), Complex(0.3, -2.0)}) {
      const Circuit circuit = postselect_circuit(n, aw);
      const std::vector<int> dims(n, 2);
      const QuantumState to_zeros = apply_circuit(circuit, postselection_direction(n, aw));
      const QuantumState to_ones = apply_circuit(circuit, postselection_companion(n, aw));
      EXPECT_LT(phase_free_distance(to_zeros, basis_state(dims, 0)), 1e-10);
      EXPECT_LT(phase_free_distance(to_ones, basis_state(dims, (1 << n) - 1)), 1e-10);
    }
  }
}

// ---------- full protocol ----------

TEST(QubitSim, RunProtocolMatchesAnalyticBranches) {
  const QuantumState unbiased = basis_state({2}, 0);
  const QuantumState biased(
      {std::cos(0.3), std::sin(0.3) * std::exp(Complex(0.0, 0.2))}, {2});
  for (const QuantumState& pointer : {unbiased, biased}) {
    const double mean_x = expectation(pointer, pauli_x());
    for (int n : {1, 2, 3, 5}) {
      for (double phi : {0.0, 1e-3, 1e-2}) {
        for (Complex aw : {Complex(5.0, 0.0), Complex(20.0, 0.0), Complex(100.0, 0.0),
                           Complex(20.0, 10.0)}) {
          // The conditioned value may not coincide with a collective
          // eigenvalue ±n (the direction degenerates there by design).
          if (std::abs(aw - double(n)) < 1e-9 || std::abs(aw + double(n)) < 1e-9) continue;
          const auto [zeros, ones] = run_protocol(n, phi, aw, pointer);
          EXPECT_EQ(zeros.label, std::string(n, '0'));
          EXPECT_EQ(ones.label, std::string(n, '1'));
          EXPECT_NEAR(zeros.probability + ones.probability, 1.0, 1e-12);

          const EtaWeights w = eta_weights(n, phi, aw, mean_x);
          EXPECT_NEAR(w.eta0 + w.eta1, n * n + std::norm(aw), 1e-9 * (n * n + std::norm(aw)));
          EXPECT_NEAR(zeros.probability, w.eta0 / (w.eta0 + w.eta1), 1e-10);
          EXPECT_NEAR(ones.probability, w.eta1 / (w.eta0 + w.eta1), 1e-10);

          // Analytic conditioned pointers.
          const double c = std::cos(n * phi);
          const double s = std::sin(n * phi);
          const std::vector<Complex>& d = pointer.amplitudes();
          const QuantumState expect0(
              {double(n) * c * d[0] - Complex(0.0, 1.0) * aw * s * d[1],
               double(n) * c * d[1] - Complex(0.0, 1.0) * aw * s * d[0]},
              {2});
          const QuantumState expect1(
              {std::conj(aw) * c * d[0] + Complex(0.0, 1.0) * double(n) * s * d[1],
               std::conj(aw) * c * d[1] + Complex(0.0, 1.0) * double(n) * s * d[0]},
              {2});
          EXPECT_LT(phase_free_distance(zeros.pointer_state, expect0.normalized()), 1e-10);
          EXPECT_LT(phase_free_distance(ones.pointer_state, expect1.normalized()), 1e-10);
          if (phi == 0.0) {
            EXPECT_NEAR(zeros.probability, n * n / (n * n + std::norm(aw)), 1e-12);
            EXPECT_LT(phase_free_distance(zeros.pointer_state, pointer), 1e-10);
          }
        }
      }
    }
  }
}

TEST(QubitSim, RunProtocolBenchmarkWeights) {
  // n=2, φ=0.01, conditioned value 20, unbiased pointer.
  const auto [zeros, ones] = run_protocol(2, 0.01, Complex(20.0, 0.0), basis_state({2}, 0));
  EXPECT_NEAR(zeros.eta0, 4.1584, 5e-5);
  EXPECT_NEAR(zeros.eta1, 399.84, 5e-3);
  EXPECT_NEAR(zeros.probability, 0.010293, 5e-7);
}

TEST(QubitSim, RunProtocolAgreesWithProjectorOracle) {
  // Independent path: evolve the GHZ⊗pointer joint with the exact
  // exponential and project onto the explicit postselection direction.
  const int n = 2;
  const double phi = 0.01;
  const Complex aw(20.0, 0.0);
  const QuantumState pointer = basis_state({2}, 0);

  const QuantumState ghz = ghz_initial_state({n, pauli_z(), 0.0}).state;
  const HermitianObservable generator =
      tensor(collective_observable({n, pauli_z(), 0.0}), pauli_x());
  const QuantumState evolved = evolve_exp(tensor(ghz, pointer), generator, phi);
  const PostselectionResult projected =
      postselect(evolved, postselection_direction(n, aw), {0, 1});

  const auto [zeros, ones] = run_protocol(n, phi, aw, pointer);
  EXPECT_NEAR(zeros.probability, projected.probability, 1e-10);
  EXPECT_LT(phase_free_distance(zeros.pointer_state, projected.collapsed.normalized()), 1e-10);
}

TEST(QubitSim, RunProtocolValidatesPointer) {
  const QuantumState unnormalized({1.0, 1.0}, {2});
  EXPECT_THROW(run_protocol(2, 0.01, Complex(20.0, 0.0), unnormalized), NotNormalized);
  EXPECT_THROW(run_protocol(2, 0.01, Complex(20.0, 0.0), basis_state({3}, 0)),
               DimensionMismatch);
  EXPECT_THROW(run_protocol(2, 0.01, Complex(2.0, 0.0), basis_state({2}, 0)),
               SingularWeakValue);
}

// ---------- branch information ----------

TEST(QubitSim, BranchQfiMatchesClosedFormInTheWeakRegime) {
  const QuantumState pointer = basis_state({2}, 0);
  // 4n²|A_w|²(1−|A_w|²φ²)/(n²+|A_w|²) ≈ 35.964 for n=3, A_w=100, φ=1e-4.
  const double closed = 4.0 * 9.0 * 1e4 * (1.0 - 1e4 * 1e-8) / (9.0 + 1e4);
  EXPECT_NEAR(closed, 35.964, 5e-4);
  const double value = branch_qfi(3, 1e-4, Complex(100.0, 0.0), pointer);
  EXPECT_NEAR(value, closed, 0.01 * closed);
  // |A_w| ≫ n saturates the collective ceiling 4n².
  EXPECT_NEAR(branch_qfi(2, 1e-9, Complex(1e4, 0.0), pointer), 16.0, 1e-4);
  // Real A_w equal to n gives exactly 2n² at every coupling (the cross term
  // of the conditioned path vanishes identically).
  EXPECT_NEAR(branch_qfi(2, 1e-3, Complex(2.0, 0.0), pointer), 8.0, 1e-12);
  EXPECT_NEAR(branch_qfi(2, 0.15, Complex(2.0, 0.0), pointer), 8.0, 1e-12);
}

TEST(QubitSim, BranchQfiMatchesFiniteDifferenceOracle) {
  const QuantumState pointer(
      {std::cos(0.4), std::sin(0.4) * std::exp(Complex(0.0, -0.3))}, {2});
  for (int n : {1, 3}) {
    for (Complex aw : {Complex(30.0, 0.0), Complex(10.0, 5.0)}) {
      const double phi = 2e-3;
      const double h = 1e-6;
      // Oracle: weighted information = P·(QFI of the normalized conditioned
      // pointer), with the derivative taken by central finite differences.
      const auto at = [&](double x) { return run_protocol(n, x, aw, pointer).first; };
      const BranchResult mid = at(phi);
      const BranchResult hi = at(phi + h);
      const BranchResult lo = at(phi - h);
      std::vector<Complex> damps(2);
      for (int i = 0; i < 2; ++i) {
        damps[i] = (hi.pointer_state.amplitudes()[i] - lo.pointer_state.amplitudes()[i]) /
                   (2.0 * h);
      }
      const double qfi_state =
          quantum_fisher_pure(mid.pointer_state, QuantumState(std::move(damps), {2}));
      const double oracle = mid.probability * qfi_state;
      const double value = branch_qfi(n, phi, aw, pointer);
      EXPECT_NEAR(value, oracle, 1e-3 * std::max(1.0, oracle)) << n << " " << aw;
    }
  }
}

// ---------- serialization ----------

TEST(QubitSim, SerializationRoundTripsExactly) {
  Circuit circuit;
  circuit.push_back(cnot_gate(0, 3));
  circuit.push_back(rx_gate(1, M_PI / 3.0));
  circuit.push_back(rz_gate(2, -0.1234567890123456789));
  circuit.push_back(crx_gate(2, 4, -4.0 * 0.01));
  circuit.push_back(unitary1q_gate(
      0, {Complex(0.6, 0.0), Complex(0.0, 0.8), Complex(0.0, 0.8), Complex(0.6, 0.0)}));
  const std::string text = serialize_circuit(circuit);
  EXPECT_EQ(text.substr(0, text.find('\n')), "CNOT 3 0");

  const Circuit parsed = parse_circuit(text);
  ASSERT_EQ(parsed.size(), circuit.size());
  for (std::size_t i = 0; i < circuit.size(); ++i) {
    EXPECT_EQ(parsed[i].kind, circuit[i].kind);
    EXPECT_EQ(parsed[i].target, circuit[i].target);
    EXPECT_EQ(parsed[i].control, circuit[i].control);
    EXPECT_EQ(parsed[i].angle, circuit[i].angle);  // %.17g round-trips doubles
    EXPECT_EQ(parsed[i].unitary, circuit[i].unitary);
  }
}

TEST(QubitSim, ParseRejectsMalformedLines) {
  EXPECT_THROW(parse_circuit("FOO 1 2\n"), ConfigError);
  EXPECT_THROW(parse_circuit("RX 0\n"), ConfigError);
  EXPECT_THROW(parse_circuit("CNOT 1 1\n"), ConfigError);
  EXPECT_THROW(parse_circuit("CNOT 1 0 extra\n"), ConfigError);
  EXPECT_NO_THROW(parse_circuit("\n\nRX 0 0.5\n"));
}

}  // namespace
}  // namespace weakmeas
