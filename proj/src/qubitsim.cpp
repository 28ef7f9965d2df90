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

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace weakmeas {
namespace {

constexpr double kUnitaryTol = 1e-12;

bool is_controlled(GateKind kind) {
  return kind == GateKind::kCnot || kind == GateKind::kCrx;
}

std::array<Complex, 4> rx_matrix(double angle) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  return {Complex(c, 0.0), Complex(0.0, -s), Complex(0.0, -s), Complex(c, 0.0)};
}

std::array<Complex, 4> gate_matrix(const Gate& gate) {
  switch (gate.kind) {
    case GateKind::kCnot:
      return {Complex(0.0), Complex(1.0), Complex(1.0), Complex(0.0)};
    case GateKind::kRx:
    case GateKind::kCrx:
      return rx_matrix(gate.angle);
    case GateKind::kRz:
      return {std::exp(Complex(0.0, -0.5 * gate.angle)), Complex(0.0),
              Complex(0.0), std::exp(Complex(0.0, 0.5 * gate.angle))};
    case GateKind::kUnitary1q:
      return gate.unitary;
  }
  throw std::logic_error("unknown gate kind");
}

void check_unitary(const std::array<Complex, 4>& u) {
  const double col0 = std::abs(std::norm(u[0]) + std::norm(u[2]) - 1.0);
  const double col1 = std::abs(std::norm(u[1]) + std::norm(u[3]) - 1.0);
  const double off = std::abs(std::conj(u[0]) * u[1] + std::conj(u[2]) * u[3]);
  if (col0 > kUnitaryTol || col1 > kUnitaryTol || off > kUnitaryTol) {
    throw std::invalid_argument("single-qubit gate matrix is not unitary");
  }
}

void check_qubit_index(int index, const char* what) {
  if (index < 0) {
    throw std::invalid_argument(std::string("gate ") + what + " index must be non-negative");
  }
}

void check_copy_count(int copies) {
  if (copies < 1 || copies > kMaxProtocolQubits) {
    throw DimensionTooLarge("protocol supports between 1 and " +
                            std::to_string(kMaxProtocolQubits) + " system qubits, got " +
                            std::to_string(copies));
  }
}

void check_coupling(double phi) {
  if (!(std::abs(phi) < 0.2)) {
    throw std::invalid_argument("coupling angle must satisfy |phi| < 0.2");
  }
}

void check_regular_weak_value(int copies, Complex weak_value) {
  const double n = copies;
  const double scale = std::max(1.0, n);
  if (std::abs(weak_value - n) <= 1e-12 * scale ||
      std::abs(weak_value + n) <= 1e-12 * scale) {
    throw SingularWeakValue(
        "postselection direction degenerates when the conditioned value equals "
        "plus or minus the number of copies");
  }
}

void check_pointer(const QuantumState& pointer) {
  if (pointer.dims() != std::vector<int>{2}) {
    throw DimensionMismatch("pointer must be a single qubit");
  }
  if (!pointer.is_normalized(1e-10)) {
    throw NotNormalized("initial pointer state must be normalized");
  }
}

// Angles with RZ(a)·RX(b)·RZ(c) equal to `u` up to a global phase.
struct EulerZxz {
  double a;
  double b;
  double c;
};

EulerZxz euler_zxz(const std::array<Complex, 4>& u) {
  const Complex det = u[0] * u[3] - u[1] * u[2];
  const Complex phase = std::exp(Complex(0.0, -0.5 * std::arg(det)));
  const Complex u00 = phase * u[0];
  const Complex u10 = phase * u[2];
  // With determinant 1 the matrix is fixed by its first column.
  const double b = 2.0 * std::atan2(std::abs(u10), std::abs(u00));
  const double half_sum = std::abs(u00) > 1e-15 ? -std::arg(u00) : 0.0;
  const double half_diff = std::abs(u10) > 1e-15 ? std::arg(u10) + 0.5 * M_PI : 0.0;
  return {half_sum + half_diff, b, half_sum - half_diff};
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace

// ---------- gates and circuits ----------

Gate cnot_gate(int control, int target) {
  check_qubit_index(control, "control");
  check_qubit_index(target, "target");
  if (control == target) {
    throw std::invalid_argument("gate control and target must differ");
  }
  Gate gate;
  gate.kind = GateKind::kCnot;
  gate.target = target;
  gate.control = control;
  return gate;
}

Gate rx_gate(int target, double angle) {
  check_qubit_index(target, "target");
  Gate gate;
  gate.kind = GateKind::kRx;
  gate.target = target;
  gate.angle = angle;
  return gate;
}

Gate rz_gate(int target, double angle) {
  check_qubit_index(target, "target");
  Gate gate;
  gate.kind = GateKind::kRz;
  gate.target = target;
  gate.angle = angle;
  return gate;
}

Gate crx_gate(int control, int target, double angle) {
  check_qubit_index(control, "control");
  check_qubit_index(target, "target");
  if (control == target) {
    throw std::invalid_argument("gate control and target must differ");
  }
  Gate gate;
  gate.kind = GateKind::kCrx;
  gate.target = target;
  gate.control = control;
  gate.angle = angle;
  return gate;
}

Gate unitary1q_gate(int target, const std::array<Complex, 4>& unitary) {
  check_qubit_index(target, "target");
  check_unitary(unitary);
  Gate gate;
  gate.kind = GateKind::kUnitary1q;
  gate.target = target;
  gate.unitary = unitary;
  return gate;
}

QuantumState apply_gate(const Gate& gate, const QuantumState& state) {
  const std::vector<int>& dims = state.dims();
  for (int d : dims) {
    if (d != 2) {
      throw DimensionMismatch("gates act on qubit registers (every factor dimension must be 2)");
    }
  }
  const int total = static_cast<int>(dims.size());
  if (gate.target < 0 || gate.target >= total) {
    throw std::invalid_argument("gate target out of range");
  }
  const bool controlled = is_controlled(gate.kind);
  if (controlled && (gate.control < 0 || gate.control >= total)) {
    throw std::invalid_argument("gate control out of range");
  }
  if (controlled && gate.control == gate.target) {
    throw std::invalid_argument("gate control and target must differ");
  }
  if (gate.kind == GateKind::kUnitary1q) check_unitary(gate.unitary);

  const std::array<Complex, 4> m = gate_matrix(gate);
  std::vector<Complex> amps = state.amplitudes();
  // Qubit q owns bit (total-1-q) of the amplitude index.
  const std::size_t target_bit = std::size_t{1} << (total - 1 - gate.target);
  const std::size_t control_bit =
      controlled ? std::size_t{1} << (total - 1 - gate.control) : 0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((i & target_bit) != 0) continue;
    if (control_bit != 0 && (i & control_bit) == 0) continue;
    const Complex lo = amps[i];
    const Complex hi = amps[i | target_bit];
    amps[i] = m[0] * lo + m[1] * hi;
    amps[i | target_bit] = m[2] * lo + m[3] * hi;
  }
  return QuantumState(std::move(amps), dims);
}

QuantumState apply_circuit(const Circuit& circuit, const QuantumState& state) {
  QuantumState out = state;
  for (const Gate& gate : circuit) out = apply_gate(gate, out);
  return out;
}

// ---------- protocol circuits ----------

GhzPreparation prepare_ghz_circuit(int copies) {
  check_copy_count(copies);
  Circuit circuit;
  // Two rotations bring qubit 0 to |+⟩ (up to a global phase), then a CNOT
  // chain copies its value down the register.
  circuit.push_back(rx_gate(0, -0.5 * M_PI));
  circuit.push_back(rz_gate(0, -0.5 * M_PI));
  for (int k = 1; k < copies; ++k) circuit.push_back(cnot_gate(k - 1, k));
  const QuantumState in = basis_state(std::vector<int>(copies, 2), 0);
  QuantumState out = canonical_phase(apply_circuit(circuit, in));
  return {std::move(circuit), std::move(out)};
}

Circuit interaction_circuit(int copies, double phi) {
  check_copy_count(copies);
  check_coupling(phi);
  Circuit circuit;
  // Per system qubit, exp(−i·phi·σz⊗σx) = RX(2·phi) on the pointer when the
  // control is |0⟩ and RX(−2·phi) when it is |1⟩; a controlled RX(−4·phi)
  // plus an unconditional RX(2·phi) realizes exactly that, and the
  // unconditional parts of all qubits merge into one RX(2n·phi).
  for (int k = 0; k < copies; ++k) {
    circuit.push_back(crx_gate(k, copies, -4.0 * phi));
  }
  circuit.push_back(rx_gate(copies, 2.0 * copies * phi));
  return circuit;
}

PostselectionCircuitAngles postselection_angles(int copies, Complex weak_value) {
  check_copy_count(copies);
  check_regular_weak_value(copies, weak_value);
  const double n = copies;
  const Complex lo = n - std::conj(weak_value);
  const Complex hi = n + std::conj(weak_value);
  const double alpha = -2.0 * std::atan2(std::abs(lo), std::abs(hi));
  const double beta = -0.5 * M_PI - std::arg(lo / hi);
  return {alpha, beta};
}

Circuit postselect_circuit(int copies, Complex weak_value) {
  check_copy_count(copies);
  check_regular_weak_value(copies, weak_value);
  const double n = copies;
  const Complex top = n + std::conj(weak_value);
  const Complex bottom = n - std::conj(weak_value);
  const double inv = 1.0 / std::sqrt(std::norm(top) + std::norm(bottom));
  // W sends |0⟩ to the postselection direction and |1⟩ to its companion in
  // the two-branch subspace; the circuit applies W†.
  const std::array<Complex, 4> w = {inv * top, inv * -(n - weak_value),
                                    inv * bottom, inv * (n + weak_value)};
  const std::array<Complex, 4> w_dag = {std::conj(w[0]), std::conj(w[2]),
                                        std::conj(w[1]), std::conj(w[3])};
  const EulerZxz euler = euler_zxz(w_dag);

  Circuit circuit;
  for (int k = 1; k < copies; ++k) circuit.push_back(cnot_gate(0, k));
  circuit.push_back(rz_gate(0, euler.c));
  circuit.push_back(rx_gate(0, euler.b));
  circuit.push_back(rz_gate(0, euler.a));
  for (int k = 1; k < copies; ++k) circuit.push_back(cnot_gate(0, k));
  return circuit;
}

// ---------- exact protocol outcomes ----------

EtaWeights eta_weights(int copies, double phi, Complex weak_value,
                       double pointer_mean_x) {
  check_copy_count(copies);
  const double n = copies;
  const double c = std::cos(n * phi);
  const double s = std::sin(n * phi);
  const double aw2 = std::norm(weak_value);
  const double cross =
      n * weak_value.imag() * std::sin(2.0 * n * phi) * pointer_mean_x;
  return {n * n * c * c + aw2 * s * s + cross,
          aw2 * c * c + n * n * s * s - cross};
}

std::pair<BranchResult, BranchResult> run_protocol(int copies, double phi,
                                                   Complex weak_value,
                                                   const QuantumState& pointer_init) {
  check_pointer(pointer_init);
  const GhzPreparation prep = prepare_ghz_circuit(copies);
  const Circuit coupling = interaction_circuit(copies, phi);
  const Circuit readout = postselect_circuit(copies, weak_value);

  const std::vector<int> sys_dims(copies, 2);
  QuantumState joint = tensor(basis_state(sys_dims, 0), pointer_init);
  joint = apply_circuit(prep.circuit, joint);
  joint = apply_circuit(coupling, joint);
  joint = apply_circuit(readout, joint);

  std::vector<int> factors(copies);
  std::iota(factors.begin(), factors.end(), 0);
  const PostselectionResult zeros =
      postselect(joint, basis_state(sys_dims, 0), factors);
  const PostselectionResult ones =
      postselect(joint, basis_state(sys_dims, (1 << copies) - 1), factors);

  const double mean_x = expectation(pointer_init, pauli_x());
  const EtaWeights weights = eta_weights(copies, phi, weak_value, mean_x);

  const auto pointer_or_default = [&](const PostselectionResult& r) {
    return r.probability > 1e-30 ? r.collapsed.normalized() : pointer_init;
  };
  BranchResult branch0{std::string(static_cast<std::size_t>(copies), '0'),
                       pointer_or_default(zeros), zeros.probability,
                       weights.eta0, weights.eta1};
  BranchResult branch1{std::string(static_cast<std::size_t>(copies), '1'),
                       pointer_or_default(ones), ones.probability,
                       weights.eta0, weights.eta1};
  return {std::move(branch0), std::move(branch1)};
}

double branch_qfi(int copies, double phi, Complex weak_value,
                  const QuantumState& pointer_init) {
  check_copy_count(copies);
  check_coupling(phi);
  check_pointer(pointer_init);
  const double n = copies;
  const double r2 = n * n + std::norm(weak_value);
  const double c = std::cos(n * phi);
  const double s = std::sin(n * phi);
  const std::vector<Complex>& d = pointer_init.amplitudes();
  const std::array<Complex, 2> xd = {d[1], d[0]};  // σx|D⟩

  // Unnormalized branch residue u = (n·cos nφ − i·A_w·sin nφ·σx)|D⟩/r and
  // its φ-derivative; 4(⟨∂u|∂u⟩ − |⟨u|∂u⟩|²/⟨u|u⟩) is the probability-
  // weighted information of the normalized conditioned state.
  const Complex cu = n * c;
  const Complex cux = Complex(0.0, -1.0) * weak_value * s;
  const Complex cdu = -n * n * s;
  const Complex cdux = Complex(0.0, -1.0) * n * weak_value * c;
  double p = 0.0;
  double dd = 0.0;
  Complex ud(0.0);
  for (int i = 0; i < 2; ++i) {
    const Complex ui = cu * d[i] + cux * xd[i];
    const Complex dui = cdu * d[i] + cdux * xd[i];
    p += std::norm(ui);
    dd += std::norm(dui);
    ud += std::conj(ui) * dui;
  }
  p /= r2;
  dd /= r2;
  ud /= r2;
  if (p < kZeroProbabilityFloor) return 0.0;
  return std::max(0.0, 4.0 * (dd - std::norm(ud) / p));
}

// ---------- circuit serialization ----------

std::string serialize_circuit(const Circuit& circuit) {
  std::string out;
  for (const Gate& gate : circuit) {
    switch (gate.kind) {
      case GateKind::kCnot:
        out += "CNOT " + std::to_string(gate.target) + ' ' +
               std::to_string(gate.control);
        break;
      case GateKind::kRx:
        out += "RX " + std::to_string(gate.target) + ' ' + format_double(gate.angle);
        break;
      case GateKind::kRz:
        out += "RZ " + std::to_string(gate.target) + ' ' + format_double(gate.angle);
        break;
      case GateKind::kCrx:
        out += "CRX " + std::to_string(gate.target) + ' ' +
               std::to_string(gate.control) + ' ' + format_double(gate.angle);
        break;
      case GateKind::kUnitary1q:
        out += "U1Q " + std::to_string(gate.target);
        for (const Complex& entry : gate.unitary) {
          out += ' ' + format_double(entry.real());
          out += ' ' + format_double(entry.imag());
        }
        break;
    }
    out += '\n';
  }
  return out;
}

Circuit parse_circuit(const std::string& text) {
  Circuit circuit;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    std::istringstream in(line);
    std::string op;
    if (!(in >> op)) continue;  // blank line

    const auto malformed = [&]() {
      return ConfigError("circuit line " + std::to_string(lineno) +
                         " is malformed: " + line);
    };
    try {
      if (op == "CNOT") {
        int target = 0, control = 0;
        if (!(in >> target >> control)) throw malformed();
        circuit.push_back(cnot_gate(control, target));
      } else if (op == "RX" || op == "RZ") {
        int target = 0;
        double angle = 0.0;
        if (!(in >> target >> angle)) throw malformed();
        circuit.push_back(op == "RX" ? rx_gate(target, angle) : rz_gate(target, angle));
      } else if (op == "CRX") {
        int target = 0, control = 0;
        double angle = 0.0;
        if (!(in >> target >> control >> angle)) throw malformed();
        circuit.push_back(crx_gate(control, target, angle));
      } else if (op == "U1Q") {
        int target = 0;
        std::array<double, 8> v{};
        if (!(in >> target)) throw malformed();
        for (double& x : v) {
          if (!(in >> x)) throw malformed();
        }
        circuit.push_back(unitary1q_gate(
            target, {Complex(v[0], v[1]), Complex(v[2], v[3]), Complex(v[4], v[5]),
                     Complex(v[6], v[7])}));
      } else {
        throw ConfigError("unrecognized gate '" + op + "' on circuit line " +
                          std::to_string(lineno));
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError("circuit line " + std::to_string(lineno) + ": " + e.what());
    }
    std::string rest;
    if (in >> rest) throw malformed();
  }
  return circuit;
}

}  // namespace weakmeas
