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

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "weakmeas/qcore.hpp"

namespace weakmeas {

// Gate-level simulation of the collective weak-measurement protocol on
// qubits: GHZ preparation, the exact circuit decomposition of the weak
// system-pointer interaction, and the entangled postselection circuit that
// reduces the joint readout to an all-zeros / all-ones computational
// measurement.
//
// Qubit indexing is big-endian throughout: qubit 0 owns the most significant
// bit of the amplitude index, matching the factor order of QuantumState.
// Protocols use qubits 0..n-1 for the system copies and qubit n for the
// pointer.

// Largest number of system qubits a protocol circuit may address.  One more
// qubit (the pointer) joins the register, so states stay within 2^16
// amplitudes.
inline constexpr int kMaxProtocolQubits = 15;

// ---------- gates and circuits ----------

enum class GateKind {
  kCnot,       // controlled-X
  kRx,         // exp(−i·angle·σx/2)
  kRz,         // exp(−i·angle·σz/2)
  kCrx,        // controlled exp(−i·angle·σx/2)
  kUnitary1q,  // arbitrary single-qubit unitary
};

// One gate acting on a qubit register.  `control` is -1 for uncontrolled
// gates; `unitary` is read only for kUnitary1q (row-major 2x2).
struct Gate {
  GateKind kind;
  int target = 0;
  int control = -1;
  double angle = 0.0;
  std::array<Complex, 4> unitary{};
};

using Circuit = std::vector<Gate>;

// Factory helpers.  They populate only the fields the gate kind reads and
// validate what can be validated without knowing the register size.
Gate cnot_gate(int control, int target);
Gate rx_gate(int target, double angle);
Gate rz_gate(int target, double angle);
Gate crx_gate(int control, int target, double angle);
// Throws std::invalid_argument unless `unitary` is unitary within 1e-12.
Gate unitary1q_gate(int target, const std::array<Complex, 4>& unitary);

// Applies one gate (or a whole circuit) to a register state.  The state must
// be a tensor product of qubits (every factor dimension 2); gate indices must
// address existing qubits.  Throws DimensionMismatch for non-qubit states and
// std::invalid_argument for out-of-range or self-controlling gates.
QuantumState apply_gate(const Gate& gate, const QuantumState& state);
QuantumState apply_circuit(const Circuit& circuit, const QuantumState& state);

// ---------- protocol circuits ----------

// A preparation circuit together with the state it produces from |0...0⟩
// (global phase fixed by canonical_phase).
struct GhzPreparation {
  Circuit circuit;
  QuantumState state;
};

// Circuit preparing (|0⟩^⊗n + |1⟩^⊗n)/√2 on `copies` qubits: a rotation pair
// bringing qubit 0 to |+⟩ followed by a CNOT chain.  Throws
// DimensionTooLarge outside 1 ≤ copies ≤ kMaxProtocolQubits.
GhzPreparation prepare_ghz_circuit(int copies);

// Circuit equal (exactly, not merely to leading order) to the weak coupling
// ⊗_k exp(−i·phi·σz^(k)⊗σx) between each system qubit and the pointer:
// one controlled x-rotation by −4·phi per system qubit, then a single
// x-rotation by 2·copies·phi on the pointer.  Requires |phi| < 0.2, the
// weak-coupling regime the protocol is designed for.
Circuit interaction_circuit(int copies, double phi);

// Rotation angles that postselect the two-branch state through one qubit:
// after the fan-out CNOTs compress (a|0^n⟩ + b|1^n⟩) onto qubit 0, applying
// RZ(beta) then RX(alpha) sends the designed postselection direction to |0⟩.
struct PostselectionCircuitAngles {
  double alpha;  // in (−π, 0]
  double beta;
};

// Closed-form angles for the postselection targeting conditioned value
// `weak_value` with `copies` system qubits.  Throws SingularWeakValue when
// weak_value = ±copies (the target coincides with a collective eigenvalue
// and the direction degenerates).
PostselectionCircuitAngles postselection_angles(int copies, Complex weak_value);

// Circuit mapping the postselection direction
//   (n + conj(A_w))|0^n⟩ + (n − conj(A_w))|1^n⟩   →  |0^n⟩
// and its orthogonal companion within the two-branch subspace to |1^n⟩, so a
// computational readout of the system qubits realizes the postselection.
// Structure: fan-out CNOTs from qubit 0, a single-qubit rotation triple on
// qubit 0, fan-out CNOTs again.  Throws as postselection_angles.
Circuit postselect_circuit(int copies, Complex weak_value);

// ---------- exact protocol outcomes ----------

// Relative weights of the all-zeros / all-ones readout branches.
// eta0 + eta1 = n² + |A_w|² identically; the branch probabilities are
// eta0/(eta0+eta1) and eta1/(eta0+eta1).  `pointer_mean_x` is ⟨σx⟩ in the
// initial pointer state.
struct EtaWeights {
  double eta0;
  double eta1;
};
EtaWeights eta_weights(int copies, double phi, Complex weak_value,
                       double pointer_mean_x);

// Outcome of reading one computational branch of the protocol.
struct BranchResult {
  std::string label;          // "0...0" or "1...1"
  QuantumState pointer_state; // normalized conditioned pointer
  double probability;
  double eta0;
  double eta1;
};

// Runs the full gate-level protocol — GHZ preparation, weak interaction,
// postselection circuit — on `copies` system qubits with the given initial
// pointer qubit, and projects the system register onto all-zeros and
// all-ones.  Returns the two branches in that order; their probabilities sum
// to 1 because the chosen postselection circuit confines the register to
// exactly those two outcomes.  A zero-probability branch reports the initial
// pointer as a placeholder.  Throws NotNormalized / DimensionMismatch for a
// bad pointer and forwards the circuit builders' errors.
std::pair<BranchResult, BranchResult> run_protocol(int copies, double phi,
                                                   Complex weak_value,
                                                   const QuantumState& pointer_init);

// Probability-weighted quantum Fisher information (for estimating phi)
// carried by the all-zeros branch, computed from the exact conditioned
// pointer path.  Near the weak-coupling regime this approaches
// 4n²|A_w|²/(n²+|A_w|²), which tends to the Heisenberg ceiling 4n² when
// |A_w| ≫ n.  Requires |phi| < 0.2 and a normalized pointer.
double branch_qfi(int copies, double phi, Complex weak_value,
                  const QuantumState& pointer_init);

// ---------- circuit serialization ----------

// Line-oriented text form, one gate per line:
//   CNOT target control
//   RX   target angle
//   RZ   target angle
//   CRX  target control angle
//   U1Q  target re00 im00 re01 im01 re10 im10 re11 im11
// Angles print with enough digits to round-trip exactly.
std::string serialize_circuit(const Circuit& circuit);

// Inverse of serialize_circuit.  Blank lines are ignored.  Throws
// ConfigError on any malformed line.
Circuit parse_circuit(const std::string& text);

}  // namespace weakmeas
