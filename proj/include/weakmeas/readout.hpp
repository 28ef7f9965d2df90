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

#include <cstdint>
#include <optional>
#include <vector>

#include "weakmeas/fisher.hpp"
#include "weakmeas/qcore.hpp"
#include "weakmeas/qubitsim.hpp"

namespace weakmeas {

// Readout-error analytics for the collective qubit protocol: how imperfect
// computational readout corrupts the postselection statistics, how much is
// recoverable by correction factors and majority voting, and a seeded
// Monte-Carlo sampler serving as an independent check on every closed form.
//
// Readout flips are assumed independent across qubits.

// Per-qubit readout flip probabilities.
struct ReadoutErrorModel {
  double q01 = 0.0;  // probability of reading |0⟩ as |1⟩, in [0,1)
  double q10 = 0.0;  // probability of reading |1⟩ as |0⟩, in [0,1)
};

// Accept a record as a branch pattern when at most `allowed_errors` of its
// bits disagree.  Only proper majorities are meaningful, so
// 0 ≤ allowed_errors ≤ copies/2; at the boundary allowed_errors = copies/2
// (even copies) a half-and-half record counts as an all-zeros acceptance,
// because the all-zeros rule "at most k mismatches" is checked first.
struct MajorityVoteRule {
  int copies = 1;
  int allowed_errors = 0;
};

// Summary of readout-error effects.  All rates lie in [0,1], |gamma| ≤ 1 and
// fisher_factor ∈ [0,1] whenever q01 + q10 ≤ 1.
struct CorrectionReport {
  double error_rate = 0.0;    // probability a kept all-zeros record is a misread
  double loss_rate = 0.0;     // fraction of genuine all-zeros records rejected
  double gamma = 1.0;         // multiplicative correction of the mean readout
  double fisher_factor = 1.0; // surviving fraction of the Fisher information
  double plateau = 0.0;       // error-rate limit for unboundedly large |A_w|
};

// Probability that a record accepted as all-zeros actually came from the
// all-ones branch, for exact branch probabilities p0 + p1 = 1:
//   p1·q10ⁿ / (p0·(1−q01)ⁿ + p1·q10ⁿ).
// Throws ProbabilityOutOfRange for inconsistent inputs and DegenerateInput
// when the acceptance probability underflows.
double error_rate(int copies, double p0, double p1, const ReadoutErrorModel& model);

// error_rate evaluated with the weak-regime branch weights p0/p1 = n²/|A_w|²,
// together with its super-exponential approximation
// (|A_w|²/n²)·(q10/(1−q01))ⁿ; the two converge as ((1−q01)/q10)ⁿ grows.
struct ErrorRateScaling {
  double exact;
  double approx;
};
ErrorRateScaling error_rate_scaling(int copies, Complex weak_value,
                                    const ReadoutErrorModel& model);

// Limit of the error rate as |A_w| → ∞ at fixed coupling:
//   (1 + ((1−q01)/q10)ⁿ · tan²(n·phi))⁻¹.
// Requires n·phi ∈ (0, π/2).
double error_rate_plateau(int copies, double phi, const ReadoutErrorModel& model);

// Probability that a genuine all-zeros record is rejected: 1−(1−q01)ⁿ
// without voting, or the binomial tail 1 − Σ_{j≤k} C(n,j)(1−q01)^{n−j}q01^j
// with voting (never larger than the no-vote value).
double loss_rate(int copies, const ReadoutErrorModel& model,
                 const std::optional<MajorityVoteRule>& vote = std::nullopt);

// Multiplicative factor γ by which readout errors shrink the conditioned
// mean of the kept records, from the branch weights eta0, eta1:
//   γ = p0·(a−b) / (p0·a + p1·b)
// where a and b are the probabilities that an all-zeros / all-ones record is
// accepted as all-zeros: a = Σ_{j≤k} C(n,j)q01^j(1−q01)^{n−j} and
// b = Σ_{j≤k} C(n,j)q10^{n−j}(1−q10)^j (k = 0 without voting).  Equal to
// 1 − error_rate/p1 identically.  Throws DegenerateInput when the weights or
// the acceptance probability vanish.
double correction_factor(int copies, double eta0, double eta1,
                         const ReadoutErrorModel& model,
                         const std::optional<MajorityVoteRule>& vote = std::nullopt);

// Readout-corrected average pointer displacement in σx after keeping the
// all-zeros records:  γ · (−n·sin(2nφ)·Im A_w·Var(σx)_D / η₀).  The sign
// convention reports the negative of the raw change of the conditioned mean;
// the magnitude equals the misread-mixture average exactly.  Zero whenever
// Im A_w = 0.
double corrected_pointer_shift(int copies, double phi, Complex weak_value,
                               const QuantumState& pointer_init,
                               const ReadoutErrorModel& model,
                               const std::optional<MajorityVoteRule>& vote = std::nullopt);

// Fraction f ∈ [0,1] of the postselected Fisher information surviving the
// readout errors, evaluated at zero coupling:
//   f = n²(a−b)² / (n²·a + |A_w|²·b)
// with the acceptance weights of correction_factor.  When q10ⁿ is negligible
// f reduces to 1 − loss_rate.
double fisher_factor(int copies, Complex weak_value, const ReadoutErrorModel& model,
                     const std::optional<MajorityVoteRule>& vote = std::nullopt);

// Classical Fisher information about the coupling carried by the records
// accepted as all-zeros when the pointer is read out with `povm`, under the
// given readout-error model.  At phi = 0 (the designed evaluation point)
// this equals fisher_factor · (error-free information); nonzero phi is a
// numeric extension for sensitivity studies.  Throws BasisNotPovm for an
// invalid POVM.
double povm_fisher_with_errors(int copies, Complex weak_value,
                               const QuantumState& pointer_init,
                               const std::vector<PovmElement>& povm,
                               const ReadoutErrorModel& model,
                               const std::optional<MajorityVoteRule>& vote = std::nullopt,
                               double phi = 0.0);

// All analytic quantities in one report, for the branch weights implied by
// (copies, phi, weak_value, pointer_init).  `plateau` is NaN when n·phi lies
// outside (0, π/2), where the plateau formula is undefined.
CorrectionReport analytic_correction_report(int copies, double phi, Complex weak_value,
                                            const QuantumState& pointer_init,
                                            const ReadoutErrorModel& model,
                                            const std::optional<MajorityVoteRule>& vote = std::nullopt);

// Monte-Carlo estimate of the readout-error rates.  Sampling is driven by a
// counter-based generator (SplitMix64 of seed + counter·golden-ratio), so a
// given (seed, trials) pair reproduces bit-identical results on any platform
// and the stream does not depend on how trials are batched.
struct MonteCarloReport {
  // error_rate, loss_rate and gamma are empirical (NaN when the relevant
  // denominator counted no samples); fisher_factor and plateau carry the
  // analytic values, since no sampling estimator is defined for them.
  CorrectionReport estimates;
  long long trials = 0;
  std::uint64_t seed = 0;
  long long true_zero = 0;           // records genuinely from the all-zeros branch
  long long true_one = 0;
  long long accepted_zero = 0;       // records kept as all-zeros
  long long accepted_one = 0;
  long long accepted_zero_from_zero = 0; // kept all-zeros that really were
  long long accepted_zero_from_one = 0;  // misreads hiding in the kept set
  double error_rate_se = 0.0;  // binomial standard errors of the estimates
  double loss_rate_se = 0.0;
  double gamma_se = 0.0;
};

MonteCarloReport monte_carlo_readout(int copies, double phi, Complex weak_value,
                                     const QuantumState& pointer_init,
                                     const ReadoutErrorModel& model,
                                     const std::optional<MajorityVoteRule>& vote,
                                     long long trials, std::uint64_t seed);

}  // namespace weakmeas
