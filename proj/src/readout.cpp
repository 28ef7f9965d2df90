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

#include "weakmeas/readout.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace weakmeas {
namespace {

// ---------- validation ----------

void check_copies(int copies) {
  if (copies < 1 || copies > kMaxProtocolQubits) {
    throw DimensionTooLarge("copy count " + std::to_string(copies) +
                            " outside [1, " + std::to_string(kMaxProtocolQubits) + "]");
  }
}

void check_model(const ReadoutErrorModel& model) {
  if (!(model.q01 >= 0.0 && model.q01 < 1.0) ||
      !(model.q10 >= 0.0 && model.q10 < 1.0)) {
    throw ProbabilityOutOfRange("readout flip probabilities must lie in [0,1)");
  }
}

void check_vote(int copies, const std::optional<MajorityVoteRule>& vote) {
  if (!vote.has_value()) return;
  if (vote->copies != copies) {
    throw std::invalid_argument("vote rule is for " + std::to_string(vote->copies) +
                                " copies, protocol has " + std::to_string(copies));
  }
  if (vote->allowed_errors < 0 || 2 * vote->allowed_errors > copies) {
    throw std::invalid_argument("allowed readout errors must lie in [0, copies/2]");
  }
}

void check_pointer(const QuantumState& pointer) {
  if (pointer.total_dim() != 2) {
    throw DimensionMismatch("pointer must be a single qubit");
  }
  if (!pointer.is_normalized(kNormTol)) {
    throw NotNormalized("pointer state must be normalized");
  }
}

void check_coupling(double phi) {
  if (!(std::abs(phi) < 0.2)) {
    throw std::invalid_argument("coupling must satisfy |phi| < 0.2");
  }
}

// ---------- acceptance weights ----------

// C(n, j) as a double; exact for every n within the protocol size cap.
double binomial(int n, int j) {
  double value = 1.0;
  for (int i = 1; i <= j; ++i) {
    value *= static_cast<double>(n - j + i) / static_cast<double>(i);
  }
  return value;
}

// Probabilities of accepting a record as all-zeros when at most
// `allowed_errors` of its bits may read 1.  A record from the all-zeros
// branch shows j ones when j of its bits flip 0→1; a record from the
// all-ones branch shows j ones when all but j of its bits flip 1→0:
//   keep_zero = Σ_{j=0}^{k} C(n,j)·q01^j·(1−q01)^{n−j},
//   keep_one  = Σ_{j=0}^{k} C(n,j)·q10^{n−j}·(1−q10)^j.
// Without voting (k = 0) these collapse to (1−q01)ⁿ and q10ⁿ.
struct AcceptWeights {
  double keep_zero = 0.0;
  double keep_one = 0.0;
};

AcceptWeights accept_weights(int copies, const ReadoutErrorModel& model,
                             const std::optional<MajorityVoteRule>& vote) {
  const int k = vote.has_value() ? vote->allowed_errors : 0;
  AcceptWeights weights;
  for (int j = 0; j <= k; ++j) {
    const double c = binomial(copies, j);
    weights.keep_zero += c * std::pow(model.q01, j) * std::pow(1.0 - model.q01, copies - j);
    weights.keep_one += c * std::pow(model.q10, copies - j) * std::pow(1.0 - model.q10, j);
  }
  return weights;
}

// ---------- branch geometry ----------

// Branch weights and probabilities implied by the protocol parameters.
struct BranchWeights {
  double eta0 = 0.0;
  double eta1 = 0.0;
  double p0 = 0.0;  // eta0 / (eta0 + eta1)
  double p1 = 0.0;
};

BranchWeights branch_weights(int copies, double phi, Complex weak_value,
                             const QuantumState& pointer_init) {
  const double mean_x = expectation(pointer_init, pauli_x());
  const EtaWeights eta = eta_weights(copies, phi, weak_value, mean_x);
  BranchWeights weights;
  weights.eta0 = eta.eta0;
  weights.eta1 = eta.eta1;
  const double total = eta.eta0 + eta.eta1;  // = n² + |A_w|², never zero
  weights.p0 = eta.eta0 / total;
  weights.p1 = eta.eta1 / total;
  return weights;
}

double plateau_or_nan(int copies, double phi, const ReadoutErrorModel& model) {
  const double angle = copies * phi;
  if (!(angle > 0.0) || !(angle < 0.5 * M_PI)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return error_rate_plateau(copies, phi, model);
}

// ---------- counter-based sampling ----------

// SplitMix64 output function: a fixed, platform-independent 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform double in [0,1) for stream position `counter` of stream `seed`.
// Counter-based, so the draw at a given position never depends on how many
// other draws were made — results are identical across batchings.
double uniform_at(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t word = mix64(seed + counter * 0x9E3779B97F4A7C15ULL);
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

double binomial_se(double rate, long long samples) {
  if (samples <= 0 || !(rate >= 0.0) || !(rate <= 1.0)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(samples));
}

}  // namespace

// ---------- error and loss rates ----------

double error_rate(int copies, double p0, double p1, const ReadoutErrorModel& model) {
  check_copies(copies);
  check_model(model);
  if (!(p0 >= 0.0) || !(p1 >= 0.0) || std::abs(p0 + p1 - 1.0) > 1e-10) {
    throw ProbabilityOutOfRange("branch probabilities must be nonnegative and sum to 1");
  }
  const double keep_true = p0 * std::pow(1.0 - model.q01, copies);
  const double keep_false = p1 * std::pow(model.q10, copies);
  const double total = keep_true + keep_false;
  if (total < 1e-300) {
    throw DegenerateInput("acceptance probability underflows");
  }
  return keep_false / total;
}

ErrorRateScaling error_rate_scaling(int copies, Complex weak_value,
                                    const ReadoutErrorModel& model) {
  check_copies(copies);
  check_model(model);
  const double n2 = static_cast<double>(copies) * copies;
  const double aw2 = std::norm(weak_value);
  const double keep_true = n2 * std::pow(1.0 - model.q01, copies);
  const double keep_false = aw2 * std::pow(model.q10, copies);
  const double total = keep_true + keep_false;
  if (total < 1e-300) {
    throw DegenerateInput("acceptance probability underflows");
  }
  ErrorRateScaling scaling;
  scaling.exact = keep_false / total;
  scaling.approx = (aw2 / n2) * std::pow(model.q10 / (1.0 - model.q01), copies);
  return scaling;
}

double error_rate_plateau(int copies, double phi, const ReadoutErrorModel& model) {
  check_copies(copies);
  check_model(model);
  const double angle = copies * phi;
  if (!(angle > 0.0) || !(angle < 0.5 * M_PI)) {
    throw std::invalid_argument("copies*phi must lie in (0, pi/2)");
  }
  const double tan2 = std::tan(angle) * std::tan(angle);
  // q10 = 0 sends the ratio to +inf and the plateau cleanly to 0.
  const double ratio = std::pow((1.0 - model.q01) / model.q10, copies);
  return 1.0 / (1.0 + ratio * tan2);
}

double loss_rate(int copies, const ReadoutErrorModel& model,
                 const std::optional<MajorityVoteRule>& vote) {
  check_copies(copies);
  check_model(model);
  check_vote(copies, vote);
  const int k = vote.has_value() ? vote->allowed_errors : 0;
  double keep = 0.0;
  for (int j = 0; j <= k; ++j) {
    keep += binomial(copies, j) * std::pow(1.0 - model.q01, copies - j) *
            std::pow(model.q01, j);
  }
  return std::max(0.0, 1.0 - keep);
}

// ---------- correction factors ----------

double correction_factor(int copies, double eta0, double eta1,
                         const ReadoutErrorModel& model,
                         const std::optional<MajorityVoteRule>& vote) {
  check_copies(copies);
  check_model(model);
  check_vote(copies, vote);
  if (!(eta0 >= 0.0) || !(eta1 >= 0.0) || eta0 + eta1 <= 0.0) {
    throw DegenerateInput("branch weights must be nonnegative and not both zero");
  }
  const double p0 = eta0 / (eta0 + eta1);
  const double p1 = 1.0 - p0;
  const AcceptWeights w = accept_weights(copies, model, vote);
  const double denom = p0 * w.keep_zero + p1 * w.keep_one;
  if (denom < 1e-300) {
    throw DegenerateInput("acceptance probability underflows");
  }
  return p0 * (w.keep_zero - w.keep_one) / denom;
}

double corrected_pointer_shift(int copies, double phi, Complex weak_value,
                               const QuantumState& pointer_init,
                               const ReadoutErrorModel& model,
                               const std::optional<MajorityVoteRule>& vote) {
  check_copies(copies);
  check_coupling(phi);
  check_model(model);
  check_vote(copies, vote);
  check_pointer(pointer_init);
  if (weak_value.imag() == 0.0) return 0.0;
  const double var_x = variance(pointer_init, pauli_x());
  const BranchWeights branches = branch_weights(copies, phi, weak_value, pointer_init);
  if (branches.eta0 < 1e-300) {
    throw DegenerateInput("all-zeros branch weight underflows");
  }
  const double gamma = correction_factor(copies, branches.eta0, branches.eta1, model, vote);
  const double raw =
      -copies * std::sin(2.0 * copies * phi) * weak_value.imag() * var_x / branches.eta0;
  return gamma * raw;
}

double fisher_factor(int copies, Complex weak_value, const ReadoutErrorModel& model,
                     const std::optional<MajorityVoteRule>& vote) {
  check_copies(copies);
  check_model(model);
  check_vote(copies, vote);
  const AcceptWeights w = accept_weights(copies, model, vote);
  const double n2 = static_cast<double>(copies) * copies;
  const double aw2 = std::norm(weak_value);
  const double denom = n2 * w.keep_zero + aw2 * w.keep_one;
  if (denom < 1e-300) {
    throw DegenerateInput("acceptance probability underflows");
  }
  const double diff = w.keep_zero - w.keep_one;
  return n2 * diff * diff / denom;
}

// ---------- record-conditioned pointer information ----------

double povm_fisher_with_errors(int copies, Complex weak_value,
                               const QuantumState& pointer_init,
                               const std::vector<PovmElement>& povm,
                               const ReadoutErrorModel& model,
                               const std::optional<MajorityVoteRule>& vote,
                               double phi) {
  check_copies(copies);
  check_model(model);
  check_vote(copies, vote);
  check_pointer(pointer_init);
  check_coupling(phi);
  validate_povm(povm, 2);

  const AcceptWeights w = accept_weights(copies, model, vote);
  const double n = static_cast<double>(copies);
  const double c = std::cos(n * phi);
  const double s = std::sin(n * phi);
  const double r2 = n * n + std::norm(weak_value);
  const Complex i_unit(0.0, 1.0);

  // Unnormalized branch pointer residues and their coupling derivatives:
  //   v₀ = (n·cos nφ − i·A_w·sin nφ·σx)|D⟩, v₁ = (Ā·cos nφ + i·n·sin nφ·σx)|D⟩,
  // so ⟨v₀|v₀⟩+⟨v₁|v₁⟩ = n²+|A_w|² and outcome weights divide by that total.
  const std::vector<Complex>& d = pointer_init.amplitudes();
  const std::vector<Complex> xd = {d[1], d[0]};  // σx|D⟩
  std::vector<Complex> v0(2), v1(2), dv0(2), dv1(2);
  const Complex aw = weak_value;
  const Complex aw_conj = std::conj(weak_value);
  for (int r = 0; r < 2; ++r) {
    v0[r] = n * c * d[r] - i_unit * aw * s * xd[r];
    v1[r] = aw_conj * c * d[r] + i_unit * n * s * xd[r];
    dv0[r] = -n * n * s * d[r] - i_unit * n * aw * c * xd[r];
    dv1[r] = -n * aw_conj * s * d[r] + i_unit * n * n * c * xd[r];
  }

  const auto quad = [](const std::vector<Complex>& x, const ComplexMatrix& e,
                       const std::vector<Complex>& y) {
    Complex value(0.0, 0.0);
    for (int r = 0; r < 2; ++r) {
      for (int col = 0; col < 2; ++col) {
        value += std::conj(x[r]) * e.at(r, col) * y[col];
      }
    }
    return value;
  };

  double info = 0.0;
  for (const PovmElement& element : povm) {
    const ComplexMatrix& e = element.matrix;
    const double prob =
        (w.keep_zero * quad(v0, e, v0).real() + w.keep_one * quad(v1, e, v1).real()) / r2;
    const double dprob = (w.keep_zero * 2.0 * quad(v0, e, dv0).real() +
                          w.keep_one * 2.0 * quad(v1, e, dv1).real()) /
                         r2;
    if (prob <= 1e-300) continue;
    info += dprob * dprob / prob;
  }
  return info;
}

// ---------- reports ----------

CorrectionReport analytic_correction_report(int copies, double phi, Complex weak_value,
                                            const QuantumState& pointer_init,
                                            const ReadoutErrorModel& model,
                                            const std::optional<MajorityVoteRule>& vote) {
  check_copies(copies);
  check_coupling(phi);
  check_model(model);
  check_vote(copies, vote);
  check_pointer(pointer_init);
  const BranchWeights branches = branch_weights(copies, phi, weak_value, pointer_init);
  const AcceptWeights w = accept_weights(copies, model, vote);
  const double denom = branches.p0 * w.keep_zero + branches.p1 * w.keep_one;
  if (denom < 1e-300) {
    throw DegenerateInput("acceptance probability underflows");
  }
  CorrectionReport report;
  report.error_rate = branches.p1 * w.keep_one / denom;
  report.loss_rate = loss_rate(copies, model, vote);
  report.gamma = branches.p0 * (w.keep_zero - w.keep_one) / denom;
  report.fisher_factor = fisher_factor(copies, weak_value, model, vote);
  report.plateau = plateau_or_nan(copies, phi, model);
  return report;
}

MonteCarloReport monte_carlo_readout(int copies, double phi, Complex weak_value,
                                     const QuantumState& pointer_init,
                                     const ReadoutErrorModel& model,
                                     const std::optional<MajorityVoteRule>& vote,
                                     long long trials, std::uint64_t seed) {
  check_copies(copies);
  check_coupling(phi);
  check_model(model);
  check_vote(copies, vote);
  check_pointer(pointer_init);
  if (trials < 1) {
    throw std::invalid_argument("trials must be at least 1");
  }

  const BranchWeights branches = branch_weights(copies, phi, weak_value, pointer_init);
  const int k = vote.has_value() ? vote->allowed_errors : 0;

  MonteCarloReport report;
  report.trials = trials;
  report.seed = seed;

  // One stream position per decision: position 0 of each trial picks the
  // branch, positions 1..copies flip the individual readout bits.
  const std::uint64_t stride = static_cast<std::uint64_t>(copies) + 1;
  for (long long t = 0; t < trials; ++t) {
    const std::uint64_t base = static_cast<std::uint64_t>(t) * stride;
    const bool from_zero = uniform_at(seed, base) < branches.p0;
    int ones = 0;
    for (int q = 1; q <= copies; ++q) {
      const double u = uniform_at(seed, base + q);
      if (from_zero) {
        if (u < model.q01) ++ones;  // a genuine 0 read as 1
      } else {
        if (!(u < model.q10)) ++ones;  // a genuine 1 not read as 0
      }
    }
    const int zeros = copies - ones;
    const bool as_zero = ones <= k;  // ties at k = copies/2 land here
    const bool as_one = !as_zero && zeros <= k;
    if (from_zero) {
      ++report.true_zero;
      if (as_zero) {
        ++report.accepted_zero;
        ++report.accepted_zero_from_zero;
      } else if (as_one) {
        ++report.accepted_one;
      }
    } else {
      ++report.true_one;
      if (as_zero) {
        ++report.accepted_zero;
        ++report.accepted_zero_from_one;
      } else if (as_one) {
        ++report.accepted_one;
      }
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double p1_hat =
      static_cast<double>(report.true_one) / static_cast<double>(trials);
  const double error_hat =
      report.accepted_zero > 0
          ? static_cast<double>(report.accepted_zero_from_one) /
                static_cast<double>(report.accepted_zero)
          : nan;
  const double loss_hat =
      report.true_zero > 0
          ? 1.0 - static_cast<double>(report.accepted_zero_from_zero) /
                      static_cast<double>(report.true_zero)
          : nan;

  report.estimates.error_rate = error_hat;
  report.estimates.loss_rate = loss_hat;
  report.estimates.gamma =
      (report.accepted_zero > 0 && p1_hat > 0.0) ? 1.0 - error_hat / p1_hat : nan;
  // No sampling estimator exists for the information factor or the plateau;
  // carry the analytic values so the report is self-contained.
  report.estimates.fisher_factor = fisher_factor(copies, weak_value, model, vote);
  report.estimates.plateau = plateau_or_nan(copies, phi, model);

  report.error_rate_se = binomial_se(error_hat, report.accepted_zero);
  report.loss_rate_se = binomial_se(loss_hat, report.true_zero);
  const double p1_se = binomial_se(p1_hat, trials);
  report.gamma_se = (report.accepted_zero > 0 && p1_hat > 0.0)
                        ? report.error_rate_se / p1_hat +
                              error_hat * p1_se / (p1_hat * p1_hat)
                        : nan;
  return report;
}

}  // namespace weakmeas
