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

#include "mintmc/baselines.hpp"

#include <cmath>
#include <string>

#include "mintmc/core.hpp"

namespace mintmc {

namespace {

StepSpec mh_step_spec(const MhConfig& config, std::size_t n) {
  if (!(config.temperature >= 1.0))
    throw_config("MH temperature must be >= 1, got " +
                 std::to_string(config.temperature));
  StepSpec spec;
  spec.batch_size = n;  // full batch
  spec.temperature = config.temperature;
  spec.truncation = kNoTruncation;
  spec.kind = config.proposal;
  spec.step = config.step;
  return spec;
}

}  // namespace

StepOutcome mh_step(ChainState& state, const Model& model, const Dataset& data,
                    const MhConfig& config, ChainStreams& streams,
                    EvalCounters& evals) {
  const StepSpec spec = mh_step_spec(config, data.size());
  return chain_step(state, model, data, spec, streams, evals);
}

SampleRun run_mh(const Model& model, const Dataset& data,
                 const MhConfig& config, const ParameterVector& init,
                 std::uint64_t seed) {
  const StepSpec spec = mh_step_spec(config, data.size());
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

double sgld_step_size(const SgldConfig& config, std::size_t t) {
  if (config.schedule == SgldSchedule::kConstant) return config.eps;
  return config.a *
         std::pow(config.b + static_cast<double>(t), -config.gamma_s);
}

void sgld_step(ParameterVector& theta, const Model& model, const Dataset& data,
               const SgldConfig& config, std::size_t t, ChainStreams& streams,
               EvalCounters& evals) {
  if (!model.has_gradient())
    throw_config("SGLD needs a model with gradients");
  const std::size_t n = data.size();
  const std::size_t m = config.batch_size;
  if (m == 0 || m > n) throw_config("SGLD batch size must lie in [1, n]");

  std::vector<double> grad_sum;
  if (m == n) {
    full_mean_loglik_with_grad(model, data, theta, grad_sum, evals);
  } else {
    const MiniBatch batch = sample_batch(n, m, streams.batch_seed);
    mu_hat_with_grad(model, data, batch, theta, grad_sum, evals);
  }
  std::vector<double> prior_grad(model.dim());
  model.log_prior_grad(theta, prior_grad);

  const double eps = sgld_step_size(config, t);
  const double half_sq = 0.5 * eps * eps;
  const double lik_scale = static_cast<double>(n) / static_cast<double>(m);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    theta[i] += half_sq * (lik_scale * grad_sum[i] + prior_grad[i]) +
                eps * streams.proposal.next_normal();
  }
}

SampleRun run_sgld(const Model& model, const Dataset& data,
                   const SgldConfig& config, const ParameterVector& init,
                   std::uint64_t seed) {
  model.check_theta(init);
  ChainStreams streams(seed, 0);
  EvalCounters evals;
  ParameterVector theta = init;

  SampleRun run;
  run.dim = model.dim();
  run.burn_in = config.burn_in;
  run.seed = seed;
  run.reserve(config.steps);
  const std::size_t total = config.burn_in + config.steps;
  ParameterVector prev = theta;
  for (std::size_t t = 0; t < total; ++t) {
    prev = theta;
    sgld_step(theta, model, data, config, t, streams, evals);
    if (t + 1 > config.burn_in) {
      double ss = 0.0;
      for (std::size_t i = 0; i < theta.size(); ++i) {
        const double d = theta[i] - prev[i];
        ss += d * d;
      }
      const double dist = std::sqrt(ss);
      // Every SGLD move is taken; there is no accept/reject.
      run.push(theta, true, dist, dist);
    }
  }
  run.evals = evals;
  return run;
}

}  // namespace mintmc
