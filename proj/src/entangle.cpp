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

#include "weakmeas/entangle.hpp"

#include <cmath>

namespace weakmeas {

namespace {

long long joint_dim(const EnsembleConfig& config) {
  if (config.copies < 1) throw DimensionMismatch("ensemble needs at least one copy");
  long long total = 1;
  for (int k = 0; k < config.copies; ++k) {
    total *= config.single_obs.dim();
    if (total > kMaxJointAmplitudes)
      throw DimensionTooLarge("joint state exceeds 2^16 amplitudes");
  }
  return total;
}

std::vector<int> joint_dims(const EnsembleConfig& config) {
  return std::vector<int>(config.copies, config.single_obs.dim());
}

// |v⟩^⊗n for a single-system vector.
QuantumState power_state(const std::vector<Complex>& v, const EnsembleConfig& config) {
  QuantumState out(v, {config.single_obs.dim()});
  QuantumState single = out;
  for (int k = 1; k < config.copies; ++k) out = tensor(out, single);
  return out;
}

// The two extreme eigen-directions, with degeneracy bookkeeping; throws when
// the spectrum carries no gap at all.
SpectrumSummary checked_spectrum(const EnsembleConfig& config) {
  const SpectrumSummary s = config.single_obs.spectrum();
  const double scale = std::max(config.single_obs.matrix().max_abs(), 1.0);
  if (s.delta < kDegenerateTol * scale)
    throw DegenerateExtremes("extreme eigenvalues coincide; no two-level branch structure");
  return s;
}

// c_max·|a_max⟩^⊗n + e^{iθ}·c_min·|a_min⟩^⊗n, normalized with canonical phase.
QuantumState two_branch_state(const EnsembleConfig& config, const SpectrumSummary& s,
                              Complex c_max, Complex c_min) {
  joint_dim(config);  // enforce the amplitude cap
  const Complex rot = std::exp(Complex(0.0, config.phase));
  const QuantumState top = power_state(s.v_max, config);
  const QuantumState bottom = power_state(s.v_min, config);
  std::vector<Complex> amps(top.total_dim());
  for (int i = 0; i < top.total_dim(); ++i)
    amps[i] = c_max * top.amplitudes()[i] + rot * c_min * bottom.amplitudes()[i];
  return canonical_phase(QuantumState(std::move(amps), joint_dims(config)).normalized());
}

}  // namespace

HermitianObservable collective_observable(const EnsembleConfig& config) {
  const long long total = joint_dim(config);
  if (total > kMaxJointOperatorDim)
    throw DimensionTooLarge("dense collective operator exceeds dimension 4096");
  const int n = static_cast<int>(total);
  const int d = config.single_obs.dim();
  ComplexMatrix sum(n);
  // Entry (r, c) of the k-th term is A[r_k][c_k] when all other digits agree.
  for (int k = 0; k < config.copies; ++k) {
    int inner = 1;  // product of dims right of position k
    for (int j = k + 1; j < config.copies; ++j) inner *= d;
    const int outer = n / (inner * d);
    for (int o = 0; o < outer; ++o)
      for (int rk = 0; rk < d; ++rk)
        for (int ck = 0; ck < d; ++ck) {
          const Complex a = config.single_obs.matrix().at(rk, ck);
          if (a == Complex(0.0, 0.0)) continue;
          for (int i = 0; i < inner; ++i)
            sum.at((o * d + rk) * inner + i, (o * d + ck) * inner + i) += a;
        }
  }
  return HermitianObservable(std::move(sum));
}

GhzState ghz_initial_state(const EnsembleConfig& config) {
  const SpectrumSummary s = checked_spectrum(config);
  const double r = 1.0 / std::sqrt(2.0);
  GhzState out;
  out.state = two_branch_state(config, s, r, r);
  out.degenerate_max = s.degenerate_max;
  out.degenerate_min = s.degenerate_min;
  return out;
}

QuantumState optimal_entangled_postselection(const EnsembleConfig& config, Complex target) {
  const SpectrumSummary s = checked_spectrum(config);
  const double n = static_cast<double>(config.copies);
  const Complex c_max = -(n * s.a_min - std::conj(target));
  const Complex c_min = n * s.a_max - std::conj(target);
  return two_branch_state(config, s, c_max, c_min);
}

QuantumState fixed_probability_entangled_postselection(const EnsembleConfig& config,
                                                       double probability) {
  if (!(probability > 0.0) || probability > 1.0)
    throw ProbabilityOutOfRange("postselection probability must lie in (0, 1]");
  const SpectrumSummary s = checked_spectrum(config);
  const double hi = std::sqrt(probability / 2.0);
  const double lo = std::sqrt((1.0 - probability) / 2.0);
  return two_branch_state(config, s, hi + lo, hi - lo);
}

ProductBaseline product_baseline_probability(int copies, double p_one) {
  if (copies < 1) throw DimensionMismatch("ensemble needs at least one copy");
  if (p_one < 0.0 || p_one > 1.0)
    throw ProbabilityOutOfRange("single-system probability must lie in [0, 1]");
  ProductBaseline out;
  out.exact = 1.0 - std::pow(1.0 - p_one, copies);
  out.linearized = copies * p_one;
  return out;
}

}  // namespace weakmeas
