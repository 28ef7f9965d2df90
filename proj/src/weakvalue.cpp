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

#include <cmath>

namespace weakmeas {

Complex weak_value(const QuantumState& psi_i, const QuantumState& psi_f,
                   const HermitianObservable& obs) {
  if (obs.dim() != psi_i.total_dim() || psi_i.total_dim() != psi_f.total_dim())
    throw DimensionMismatch("weak value: state/observable dimension mismatch");
  const Complex denom = overlap(psi_f, psi_i);
  if (std::abs(denom) <= 1e-12)
    throw OrthogonalPostselection("pre- and postselection are orthogonal");
  return overlap(psi_f, apply(obs, psi_i)) / denom;
}

double pointer_shift_linear_response(const WeakMeasurementSetup& setup,
                                     const HermitianObservable& readout_obs) {
  if (!setup.psi_f.has_value())
    throw std::invalid_argument("pointer shift requires a postselection state");
  const Complex aw = weak_value(setup.psi_i, *setup.psi_f, setup.system_obs);
  const ComplexMatrix& f = setup.pointer_obs.matrix();
  const ComplexMatrix& m = readout_obs.matrix();
  const ComplexMatrix fm = f * m;
  const ComplexMatrix mf = m * f;
  const HermitianObservable anti(fm + mf);
  const double mean_anti = expectation(setup.pointer_init, anti);
  const double mean_f = expectation(setup.pointer_init, setup.pointer_obs);
  const double mean_m = expectation(setup.pointer_init, readout_obs);
  // ⟨[F̂,M̂]⟩ is purely imaginary; keep it complex and check the residue.
  const Complex mean_comm =
      overlap(setup.pointer_init, apply_matrix(fm - mf, setup.pointer_init));

  const double g = setup.coupling;
  const Complex shift = g * aw.imag() * (mean_anti - 2.0 * mean_f * mean_m) +
                        Complex(0.0, 1.0) * g * aw.real() * mean_comm;
  if (std::abs(shift.imag()) > 1e-12 * std::max(1.0, std::abs(shift.real())))
    throw NonHermitian("pointer shift has a non-real residue");
  return shift.real();
}

bool linear_response_valid(double coupling, Complex wv) {
  return std::abs(coupling) * std::abs(wv) <= 0.1;
}

double postselection_probability_bound(const QuantumState& psi_i,
                                       const HermitianObservable& obs, Complex w) {
  const QuantumState a_psi = apply(obs, psi_i);
  const double second_moment = overlap(a_psi, a_psi).real();
  const double mean = overlap(psi_i, a_psi).real();
  const double var = std::max(0.0, second_moment - mean * mean);
  const double denom = second_moment - 2.0 * mean * w.real() + std::norm(w);
  if (denom < kZeroProbabilityFloor)
    throw DegenerateTarget("probability bound degenerates at this conditioned value");
  return var / denom;
}

OptimalPostselection optimal_postselection_for_weak_value(const QuantumState& psi_i,
                                                          const HermitianObservable& obs,
                                                          Complex target) {
  if (obs.dim() != psi_i.total_dim())
    throw DimensionMismatch("state/observable dimension mismatch");
  const QuantumState a_psi = apply(obs, psi_i);
  const double second_moment = overlap(a_psi, a_psi).real();
  const double mean = overlap(psi_i, a_psi).real();
  const double var = std::max(0.0, second_moment - mean * mean);
  if (var <= 1e-12) throw ZeroVariance("observable has zero variance in the preselection");

  // Defect vector |v⟩ = (Â − target)|Ψi⟩ and its overlaps.
  // ⟨v|v⟩ = Var + (⟨Â⟩ − Re target)² + (Im target)² >= Var > 0 here, but keep
  // the guard: a degenerate defect would make the projection undefined.
  const double vv = second_moment - 2.0 * mean * target.real() + std::norm(target);
  if (vv <= 1e-12) throw DegenerateTarget("defect vector degenerates for this target");
  const Complex v_dot_psi = mean - std::conj(target);  // ⟨v|Ψi⟩

  std::vector<Complex> f(psi_i.total_dim());
  for (int i = 0; i < psi_i.total_dim(); ++i) {
    const Complex v = a_psi.amplitudes()[i] - target * psi_i.amplitudes()[i];
    f[i] = psi_i.amplitudes()[i] - v * (v_dot_psi / vv);
  }
  OptimalPostselection out;
  out.psi_f = canonical_phase(QuantumState(std::move(f), psi_i.dims()).normalized());
  out.p_max = var / vv;
  return out;
}

BoundedWeakValue optimal_weak_value_for_probability(const QuantumState& psi_i,
                                                    const HermitianObservable& obs,
                                                    double probability) {
  if (!(probability > 0.0) || probability > 1.0)
    throw ProbabilityOutOfRange("postselection probability must lie in (0, 1]");
  const QuantumState a_psi = apply(obs, psi_i);
  const double second_moment = overlap(a_psi, a_psi).real();
  const double mean = overlap(psi_i, a_psi).real();
  const double var = std::max(0.0, second_moment - mean * mean);
  if (var <= 1e-12) throw ZeroVariance("observable has zero variance in the preselection");

  const double c0 = std::sqrt(probability);
  const double c1 = std::sqrt(1.0 - probability);
  const double root_var = std::sqrt(var);
  std::vector<Complex> f(psi_i.total_dim());
  for (int i = 0; i < psi_i.total_dim(); ++i) {
    const Complex perp = (a_psi.amplitudes()[i] - mean * psi_i.amplitudes()[i]) / root_var;
    f[i] = c0 * psi_i.amplitudes()[i] + c1 * perp;
  }
  BoundedWeakValue out;
  out.psi_f = canonical_phase(QuantumState(std::move(f), psi_i.dims()).normalized());
  out.weak_value = mean + std::sqrt((1.0 - probability) / probability * var);
  return out;
}

}  // namespace weakmeas
