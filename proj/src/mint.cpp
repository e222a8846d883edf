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

#include "mintmc/mint.hpp"

#include <cmath>
#include <string>

namespace mintmc {

double tau_from_batch(std::size_t m, std::size_t n) {
  if (n <= 1) throw_config("tau is undefined for n <= 1");
  if (m <= 1)
    throw_config("tau is degenerate for batch size m <= 1");
  if (m > n)
    throw_config("batch size m = " + std::to_string(m) + " exceeds n = " +
                 std::to_string(n));
  return std::log(static_cast<double>(m)) / std::log(static_cast<double>(n));
}

double temperature(std::size_t n, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw_config("temperature exponent lambda must lie in (0, 1), got " +
                 std::to_string(lambda));
  return std::pow(static_cast<double>(n), 1.0 - lambda);
}

MintParams derive_mint_params(const MintConfig& config, std::size_t n) {
  MintParams p;
  p.tau = tau_from_batch(config.batch_size, n);
  if (!(config.lambda > 0.0 && config.lambda < p.tau))
    throw_config("lambda must satisfy 0 < lambda < tau = " +
                 std::to_string(p.tau) + ", got " +
                 std::to_string(config.lambda));
  p.alpha = config.lambda / p.tau;
  p.temperature = temperature(n, config.lambda);
  return p;
}

namespace {

StepSpec mint_step_spec(const MintConfig& config, std::size_t n) {
  const MintParams params = derive_mint_params(config, n);
  StepSpec spec;
  spec.batch_size = config.batch_size;
  spec.temperature = params.temperature;
  spec.truncation = kNoTruncation;
  spec.kind = config.proposal;
  spec.step = config.step;
  spec.naive_scaling = config.naive_scaling;
  spec.paired_estimates = config.paired_estimates;
  return spec;
}

}  // namespace

StepOutcome mint_step(ChainState& state, const Model& model,
                      const Dataset& data, const MintConfig& config,
                      ChainStreams& streams, EvalCounters& evals) {
  const StepSpec spec = mint_step_spec(config, data.size());
  return chain_step(state, model, data, spec, streams, evals);
}

SampleRun run_mint(const Model& model, const Dataset& data,
                   const MintConfig& config, const ParameterVector& init,
                   std::uint64_t seed) {
  const StepSpec spec = mint_step_spec(config, data.size());
  ChainStreams streams(seed, 0);
  EvalCounters evals;
  ChainState state = init_chain_state(model, data, init, spec, streams, evals);

  SampleRun run;
  run.dim = model.dim();
  run.burn_in = config.burn_in;
  run.seed = seed;
  run.reserve(config.samples);
  const std::size_t total = config.burn_in + config.samples;
  for (std::size_t it = 1; it <= total; ++it) {
    const StepOutcome out = chain_step(state, model, data, spec, streams,
                                       evals);
    if (it > config.burn_in)
      run.push(state.theta, out.accepted, out.proposed_distance,
               out.accepted ? out.proposed_distance : 0.0);
  }
  run.evals = evals;
  return run;
}

RatioPair cancellation_identity_check(const AugmentationScratch& scratch,
                                      double mu_hat_value, double mu_hat_prime,
                                      double log_q_ratio) {
  if (!(scratch.scale > 0.0))
    throw_config("cancellation check needs a positive scale n^lambda");
  if (!(scratch.sigma_sq_theta > 0.0 && scratch.sigma_sq_theta_prime > 0.0))
    throw_config("cancellation check needs positive variances");

  const auto log_phi = [](double t, double sigma_sq) {
    return -0.5 * std::log(6.283185307179586476925286766559 * sigma_sq) -
           t * t / (2.0 * sigma_sq);
  };

  // Full augmented-space log ratio
  //   f(theta, t) = g(theta) e^{eps t} phi_theta(t),
  //   q((a,ta)->(b,tb)) = q(a->b) phi_b(tb),
  // written out term by term, with g recovered from mu_hat via
  // scale * mu = scale * mu_hat - eps * t.
  const double log_g = scratch.scale * mu_hat_value - scratch.epsilon *
                                                          scratch.t;
  const double log_g_prime =
      scratch.scale * mu_hat_prime - scratch.epsilon * scratch.t_prime;
  const double phi_t = log_phi(scratch.t, scratch.sigma_sq_theta);
  const double phi_t_prime =
      log_phi(scratch.t_prime, scratch.sigma_sq_theta_prime);

  RatioPair pair;
  pair.full = (log_g_prime + scratch.epsilon * scratch.t_prime + phi_t_prime) +
              (log_q_ratio + phi_t) -
              (log_g + scratch.epsilon * scratch.t + phi_t) - phi_t_prime;
  pair.reduced = scratch.scale * (mu_hat_prime - mu_hat_value) + log_q_ratio;
  return pair;
}

}  // namespace mintmc
