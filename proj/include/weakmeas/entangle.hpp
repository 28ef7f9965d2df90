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

#include "weakmeas/qcore.hpp"

namespace weakmeas {

// An ensemble of `copies` identical systems measured collectively through
// Â⁽ⁿ⁾ = Σ_k Â_k, with a relative phase `phase` between the two branches of
// the entangled preparation.
struct EnsembleConfig {
  int copies = 1;                  // n >= 1
  HermitianObservable single_obs;  // Â on one system
  double phase = 0.0;              // θ
};

// Joint state vectors are capped at 2^16 amplitudes; dense joint operators
// at dimension 4096 (beyond that the matrix alone would not be desk-scale).
inline constexpr long long kMaxJointAmplitudes = 1LL << 16;
inline constexpr int kMaxJointOperatorDim = 4096;

// Σ_k I ⊗ … ⊗ Â_(k) ⊗ … ⊗ I as a dense operator. Its extreme eigenvalues are
// n·a_max and n·a_min. Throws DimensionTooLarge beyond the operator cap.
HermitianObservable collective_observable(const EnsembleConfig& config);

struct GhzState {
  QuantumState state;
  bool degenerate_max = false;  // extreme eigenspace had multiplicity > 1
  bool degenerate_min = false;
};

// Maximal-variance preparation (|a_max⟩^⊗n + e^{iθ}|a_min⟩^⊗n)/√2, reaching
// Var(Â⁽ⁿ⁾) = n²(a_max−a_min)²/4. Degenerate extreme eigenspaces are reduced
// deterministically (lowest-basis-index projection) and flagged. Throws
// DegenerateExtremes when a_max − a_min < 1e-10 and DimensionTooLarge beyond
// the state cap.
GhzState ghz_initial_state(const EnsembleConfig& config);

// The entangled postselection realizing conditioned value `target` of the
// collective observable from the maximal-variance preparation with the
// largest probability:
//   ∝ −(n·a_min − target*)|a_max⟩^⊗n + e^{iθ}(n·a_max − target*)|a_min⟩^⊗n.
QuantumState optimal_entangled_postselection(const EnsembleConfig& config, Complex target);

// The entangled postselection with exact success probability p ∈ (0,1] that
// maximizes the (real) conditioned value:
//   [√(p/2)+√((1−p)/2)]|a_max⟩^⊗n + e^{iθ}[√(p/2)−√((1−p)/2)]|a_min⟩^⊗n.
// Its overlap with the maximal-variance preparation is exactly √p.
QuantumState fixed_probability_entangled_postselection(const EnsembleConfig& config,
                                                       double probability);

struct ProductBaseline {
  double exact = 0.0;       // 1 − (1 − p_one)^n
  double linearized = 0.0;  // n·p_one
};

// Success probability of the unentangled strategy that accepts when any of
// the n independent single-system postselections (each succeeding with
// probability p_one) fires.
ProductBaseline product_baseline_probability(int copies, double p_one);

}  // namespace weakmeas
