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

#include "mintmc/chain.hpp"

#include <algorithm>
#include <cmath>

#include "mintmc/core.hpp"

namespace mintmc {

namespace {

double euclidean_distance(const ParameterVector& a, const ParameterVector& b) {
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    ss += d * d;
  }
  return std::sqrt(ss);
}

}  // namespace

std::vector<double> target_drift(const Model& model, std::size_t n,
                                 const ParameterVector& theta,
                                 const std::vector<double>& grad_sum,
                                 std::size_t batch_m, double h,
                                 double truncation, double temperature) {
  std::vector<double> drift(model.dim(), 0.0);
  if (h <= truncation) return drift;  // flat region of the truncated target
  const double lik_scale = static_cast<double>(n) /
                           static_cast<double>(batch_m) / temperature;
  std::vector<double> prior_grad(model.dim());
  model.log_prior_grad(theta, prior_grad);
  for (std::size_t i = 0; i < drift.size(); ++i)
    drift[i] = lik_scale * grad_sum[i] + prior_grad[i] / temperature;
  return drift;
}

ChainState init_chain_state(const Model& model, const Dataset& data,
                            const ParameterVector& theta0,
                            const StepSpec& spec, ChainStreams& streams,
                            EvalCounters& evals) {
  model.check_theta(theta0);
  const std::size_t n = data.size();
  const bool full = spec.batch_size == n;
  const bool langevin = spec.kind == ProposalKind::kLangevin;
  if (langevin && !model.has_gradient())
    throw_config("Langevin proposals need a model with gradients");

  ChainState state;
  state.theta = theta0;
  if (full) {
    state.batch_seed = 0;
    state.mu_value = langevin ? full_mean_loglik_with_grad(
                                    model, data, theta0, state.grad_sum, evals)
                              : full_mean_loglik(model, data, theta0, evals);
  } else {
    const MiniBatch batch =
        sample_batch(n, spec.batch_size, streams.batch_seed);
    state.batch_seed = batch.seed;
    state.mu_value =
        langevin ? mu_hat_with_grad(model, data, batch, theta0,
                                    state.grad_sum, evals)
                 : mu_hat(model, data, batch, theta0, evals);
  }
  state.log_prior = model.log_prior(theta0);
  return state;
}

StepOutcome chain_step(ChainState& state, const Model& model,
                       const Dataset& data, const StepSpec& spec,
                       ChainStreams& streams, EvalCounters& evals) {
  const std::size_t n = data.size();
  if (spec.batch_size == 0 || spec.batch_size > n)
    throw_config("step batch size must lie in [1, n]");
  const bool full = spec.batch_size == n;
  const bool langevin = spec.kind == ProposalKind::kLangevin;
  // A full batch is deterministic, so the cached value already equals the
  // paired re-evaluation; skip the redundant pass.
  const bool paired = spec.paired_estimates && !full;

  // One fresh batch per iteration; it feeds mu_hat(theta') (and mu_hat(theta)
  // for paired chains) plus the Langevin gradients.
  MiniBatch batch;
  std::uint64_t fresh_seed = 0;
  if (!full) {
    fresh_seed = streams.batch_seed.next_u64();
    batch = MiniBatch::regenerate(fresh_seed, n, spec.batch_size);
  }

  double mu_current = state.mu_value;
  std::vector<double> grad_sum_current;
  const std::vector<double>* drift_basis = &state.grad_sum;
  if (paired) {
    mu_current = langevin ? mu_hat_with_grad(model, data, batch, state.theta,
                                             grad_sum_current, evals)
                          : mu_hat(model, data, batch, state.theta, evals);
    if (langevin) drift_basis = &grad_sum_current;
  }
  const double h_current = energy_value(n, mu_current, state.log_prior);

  ParameterVector theta_prime;
  std::vector<double> drift;
  if (langevin) {
    drift = target_drift(model, n, state.theta, *drift_basis,
                         spec.batch_size, h_current, spec.truncation,
                         spec.temperature);
    theta_prime = langevin_move(state.theta, spec.step, drift,
                                streams.proposal);
  } else {
    theta_prime = propose_random_walk(state.theta, spec.step,
                                      streams.proposal);
  }

  double mu_prime = 0.0;
  std::vector<double> grad_sum_prime;
  if (langevin) {
    mu_prime = full ? full_mean_loglik_with_grad(model, data, theta_prime,
                                                 grad_sum_prime, evals)
                    : mu_hat_with_grad(model, data, batch, theta_prime,
                                       grad_sum_prime, evals);
  } else {
    mu_prime = full ? full_mean_loglik(model, data, theta_prime, evals)
                    : mu_hat(model, data, batch, theta_prime, evals);
  }
  const double lp_prime = model.log_prior(theta_prime);
  const double h_prime = energy_value(n, mu_prime, lp_prime);

  double log_q_ratio = 0.0;
  if (langevin) {
    const std::vector<double> drift_prime =
        target_drift(model, n, theta_prime, grad_sum_prime, spec.batch_size,
                     h_prime, spec.truncation, spec.temperature);
    log_q_ratio = langevin_log_q_ratio(state.theta, theta_prime, spec.step,
                                       drift, drift_prime);
  }

  double log_ratio;
  if (spec.naive_scaling) {
    // The estimator the naive subsampling approach uses: the mean log
    // likelihood difference scaled by n rather than n^lambda.
    log_ratio = static_cast<double>(n) * (mu_prime - mu_current) +
                (lp_prime - state.log_prior) / spec.temperature + log_q_ratio;
  } else {
    log_ratio = (std::max(h_current, spec.truncation) -
                 std::max(h_prime, spec.truncation)) /
                    spec.temperature +
                log_q_ratio;
  }

  StepOutcome outcome;
  outcome.proposed_distance = euclidean_distance(theta_prime, state.theta);

  const double u = streams.accept.next_double();
  outcome.accepted = u < std::exp(log_ratio);
  if (outcome.accepted) {
    state.theta = std::move(theta_prime);
    state.mu_value = mu_prime;
    state.log_prior = lp_prime;
    state.batch_seed = fresh_seed;
    if (langevin) state.grad_sum = std::move(grad_sum_prime);
  }
  state.accepted = outcome.accepted;
  ++state.iteration;
  return outcome;
}

}  // namespace mintmc
