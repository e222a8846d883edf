// Copyright (c) the mintmc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MINTMC_MINT_HPP
#define MINTMC_MINT_HPP

#include <cstdint>

#include "mintmc/chain.hpp"
#include "mintmc/sample_run.hpp"

namespace mintmc {

/// tau = ln m / ln n, the batch-size exponent (m = n^tau).
/// Requires 1 < m <= n and n > 1.
double tau_from_batch(std::size_t m, std::size_t n);

/// T = n^{1 - lambda}, the temperature implied by the exponent lambda.
/// Requires 0 < lambda < 1.
double temperature(std::size_t n, double lambda);

/// Mini-batch tempered MCMC configuration. The chain accepts a proposal with
/// probability min{1, exp(n^lambda (mu_hat' - mu_hat) + dlog prior / T + log
/// q-ratio)} and therefore targets the tempered posterior pi_T with
/// T = n^{1-lambda}.
struct MintConfig {
  std::size_t batch_size = 0;  // m
  double lambda = 0.0;         // 0 < lambda < tau = ln m / ln n
  std::size_t burn_in = 0;     // B
  std::size_t samples = 0;     // N post-burn-in samples
  ProposalKind proposal = ProposalKind::kRandomWalk;
  double step = 1.0;
  bool naive_scaling = false;  // scale by n instead of n^lambda (control)
  // Evaluate both endpoints on each step's fresh batch instead of keeping
  // the cached estimate (2m touches per step; see StepSpec). Off by default:
  // the cached reading is the augmented-state semantics.
  bool paired_estimates = false;
};

/// Quantities derived from (config, n); construction validates the
/// hyper-parameter relations (lambda < tau strictly, T > 1).
struct MintParams {
  double tau = 0.0;
  double alpha = 0.0;  // lambda / tau
  double temperature = 1.0;
};

MintParams derive_mint_params(const MintConfig& config, std::size_t n);

/// One MINT transition (Algorithm-style step): fresh batch, proposal,
/// mini-batch MH ratio against the cached estimate. Counter +m.
StepOutcome mint_step(ChainState& state, const Model& model,
                      const Dataset& data, const MintConfig& config,
                      ChainStreams& streams, EvalCounters& evals);

/// Runs B + N MINT iterations from `init` and returns the N post-burn-in
/// samples with acceptance and step-size traces.
SampleRun run_mint(const Model& model, const Dataset& data,
                   const MintConfig& config, const ParameterVector& init,
                   std::uint64_t seed);

/// Inputs to the augmentation identity: the full augmented-space MH ratio
/// with explicit Gaussian densities phi_theta(t) must equal the reduced
/// mini-batch ratio no matter what variances are assumed.
struct AugmentationScratch {
  double scale = 1.0;    // n^lambda, multiplier of mu_hat differences
  double epsilon = 0.0;  // n^{lambda - tau/2} = scale / sqrt(m), tilt coeff.
  double sigma_sq_theta = 1.0;
  double sigma_sq_theta_prime = 1.0;
  double t = 0.0;
  double t_prime = 0.0;
};

struct RatioPair {
  double full = 0.0;     // log ratio with the phi terms written out
  double reduced = 0.0;  // scale * (mu_hat' - mu_hat) + log q-ratio
};

RatioPair cancellation_identity_check(const AugmentationScratch& scratch,
                                      double mu_hat_value,
                                      double mu_hat_prime,
                                      double log_q_ratio);

}  // namespace mintmc

#endif  // MINTMC_MINT_HPP
