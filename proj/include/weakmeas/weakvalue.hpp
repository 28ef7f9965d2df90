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

#include <optional>

#include "weakmeas/qcore.hpp"

namespace weakmeas {

// Pre/postselected weak measurement of `system_obs`, coupled with strength
// `coupling` through `pointer_obs` to a pointer prepared in `pointer_init`.
struct WeakMeasurementSetup {
  double coupling = 0.0;               // g
  HermitianObservable system_obs;      // Â
  HermitianObservable pointer_obs;     // F̂, the coupling generator on the pointer
  QuantumState psi_i;                  // preselected system state (normalized)
  std::optional<QuantumState> psi_f;   // postselected system state (normalized)
  QuantumState pointer_init;           // pointer state |D⟩ (normalized)
};

// Conditioned value ⟨Ψf|Â|Ψi⟩ / ⟨Ψf|Ψi⟩.
// Throws OrthogonalPostselection when |⟨Ψf|Ψi⟩| <= 1e-12.
Complex weak_value(const QuantumState& psi_i, const QuantumState& psi_f,
                   const HermitianObservable& obs);

// First-order conditioned shift of the pointer readout M̂:
//   g·Im(A_w)·(⟨{F̂,M̂}⟩ − 2⟨F̂⟩⟨M̂⟩) + i·g·Re(A_w)·⟨[F̂,M̂]⟩,
// expectations taken in pointer_init. The commutator term is purely
// imaginary, so the total is real; an imaginary residue > 1e-12 throws
// NonHermitian. Requires setup.psi_f.
double pointer_shift_linear_response(const WeakMeasurementSetup& setup,
                                     const HermitianObservable& readout_obs);

// First-order validity heuristic: the expansion is trusted for g·|A_w| <= 0.1.
bool linear_response_valid(double coupling, Complex weak_value);

// Largest postselection probability compatible with conditioned value `w`
// from state `psi_i`:  Var(Â) / (⟨Â²⟩ − 2⟨Â⟩·Re w + |w|²).
// Valid upper bound over all postselections that realize w.
double postselection_probability_bound(const QuantumState& psi_i,
                                       const HermitianObservable& obs, Complex w);

struct OptimalPostselection {
  QuantumState psi_f;   // canonical-phase, normalized
  double p_max = 0.0;   // postselection probability achieved (the maximum)
};

// The postselection that realizes conditioned value `target` from `psi_i`
// with the largest possible probability:
//   |Ψf⟩ ∝ |Ψi⟩ − |v⟩⟨v|Ψi⟩/⟨v|v⟩  with  |v⟩ = (Â − target)|Ψi⟩.
// Throws ZeroVariance when Var(Â) <= 1e-12 in psi_i, DegenerateTarget when
// the defect vector degenerates.
OptimalPostselection optimal_postselection_for_weak_value(const QuantumState& psi_i,
                                                          const HermitianObservable& obs,
                                                          Complex target);

struct BoundedWeakValue {
  QuantumState psi_f;        // canonical-phase, normalized
  double weak_value = 0.0;   // real by construction
};

// The largest conditioned value reachable at fixed postselection probability:
//   |Ψf⟩ = √p·|Ψi⟩ + √(1−p)·(Â−⟨Â⟩)|Ψi⟩/√Var,  A_w = ⟨Â⟩ + √((1−p)/p·Var).
// p ∈ (0,1]; p = 1 returns |Ψi⟩ itself with A_w = ⟨Â⟩.
// Throws ZeroVariance / ProbabilityOutOfRange.
BoundedWeakValue optimal_weak_value_for_probability(const QuantumState& psi_i,
                                                    const HermitianObservable& obs,
                                                    double probability);

}  // namespace weakmeas
