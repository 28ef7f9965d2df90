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

#include <string>
#include <vector>

#include "weakmeas/weakvalue.hpp"

namespace weakmeas {

// A classical outcome distribution p(g) with its derivative dp/dg.
struct OutcomeDistribution {
  std::vector<double> probabilities;  // >= 0, sum 1 within 1e-8
  std::vector<double> derivatives;    // sum 0 within 1e-8
};

// Σ (dp_j)²/p_j over outcomes with p_j >= 1e-300.
// Throws InconsistentDerivative when the derivatives do not sum to zero
// (probability is conserved) and ProbabilityOutOfRange on malformed p.
double classical_fisher(const OutcomeDistribution& dist);

// Information ceiling of a pure state family: 4(⟨∂Φ|∂Φ⟩ − |⟨Φ|∂Φ⟩|²).
// `state` must be normalized within 1e-10 (NotNormalized); the result is
// clamped at zero against roundoff.
double quantum_fisher_pure(const QuantumState& state, const QuantumState& derivative);

// Ceiling when every outcome is kept (no conditioning):
//   4[⟨Â²⟩·⟨F̂²⟩ − (⟨Â⟩·⟨F̂⟩)²],
// system moments in psi_i, pointer moments in pointer_init.
double no_postselection_qfi(const WeakMeasurementSetup& setup);

// One POVM element. validate_povm checks each element is positive
// semidefinite (eigenvalues >= -1e-10) and that the set resolves the
// identity within 1e-10; throws BasisNotPovm.
struct PovmElement {
  ComplexMatrix matrix;
};
void validate_povm(const std::vector<PovmElement>& elements, int dim);

// First-order information carried by the branch that conditions on `branch`:
//   4[ |m|²·Var(F̂) − ⟨F̂²⟩·( 2g·⟨F̂⟩·|m|²·Im(m/o) + g²·⟨F̂²⟩·|m|⁴/|o|² ) ]
// with m = ⟨branch|Â|Ψi⟩ and o = ⟨branch|Ψi⟩. When |o| <= 1e-12 the two
// correction terms are dropped and the finite 4|m|²Var(F̂) part is kept.
double branch_information_linear(const WeakMeasurementSetup& setup, const QuantumState& branch);

struct BranchInfo {
  std::string label;
  double probability = 0.0;        // |⟨branch|Ψi⟩|², the g → 0 branch weight
  Complex weak_value;              // m/o; meaningless when !weak_value_finite
  bool weak_value_finite = false;
  double weighted_info = 0.0;      // first-order value (see branch_information_linear)
  double exact_weighted_qfi = 0.0; // finite-difference ceiling of the exact branch at g
};

struct FisherReport {
  double classical = 0.0;           // Fisher info of the exact branch-outcome distribution at g
  double quantum = 0.0;             // no-conditioning ceiling
  std::vector<BranchInfo> per_branch;
  double sum_over_branches = 0.0;   // Σ weighted_info
};

// Per-branch information budget for conditioning `setup` (psi_f is ignored;
// the branches play that role). Branches must be pairwise orthonormal within
// 1e-10 (BasisNotOrthonormal); an incomplete set gets an implicit discard
// outcome in the classical distribution. Exact quantities use the full
// joint evolution at coupling g with central differences (step 1e-6,
// Richardson-refined).
FisherReport per_branch_fisher(const WeakMeasurementSetup& setup,
                               const std::vector<QuantumState>& branches);

// The conventional branch set: the most probable postselection realizing
// conditioned value `target`, completed to an orthonormal basis.
std::vector<QuantumState> default_branch_basis(const QuantumState& psi_i,
                                               const HermitianObservable& obs, Complex target);

// First-order branch informations summed over a complete basis, against the
// g → 0 total 4⟨Â²⟩Var(F̂). The deficit (rhs − lhs) vanishes at g = 0 and
// grows with the coupling.
struct SumRuleCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double deficit = 0.0;
};
SumRuleCheck sum_rule_check(const WeakMeasurementSetup& setup,
                            const std::vector<QuantumState>& branches);

}  // namespace weakmeas
