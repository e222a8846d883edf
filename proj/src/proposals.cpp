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

#include "mintmc/proposals.hpp"

#include <cmath>
#include <string>

namespace mintmc {

namespace {

void check_step(double step) {
  if (!(step > 0.0))
    throw_config("proposal step size must be positive, got " +
                 std::to_string(step));
}

void check_finite_grad(const std::vector<double>& g) {
  for (const double v : g)
    if (!std::isfinite(v))
      throw_numeric("non-finite gradient in Langevin proposal");
}

// log N(x | mean, step^2 I), dropping the dimension constant (it cancels in
// every ratio this is used for).
double log_gaussian_transition(const ParameterVector& x,
                               const ParameterVector& mean, double step) {
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - mean[i];
    ss += d * d;
  }
  return -0.5 * ss / (step * step);
}

}  // namespace

ParameterVector propose_random_walk(const ParameterVector& theta, double step,
                                    RngStream& rng) {
  check_step(step);
  ParameterVector out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    out[i] = theta[i] + step * rng.next_normal();
  return out;
}

ParameterVector langevin_move(const ParameterVector& theta, double step,
                              const std::vector<double>& grad_at_theta,
                              RngStream& rng) {
  check_step(step);
  check_finite_grad(grad_at_theta);
  const double half_sq = 0.5 * step * step;
  ParameterVector out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    out[i] = theta[i] + half_sq * grad_at_theta[i] + step * rng.next_normal();
  return out;
}

double langevin_log_q_ratio(const ParameterVector& theta,
                            const ParameterVector& theta_prime, double step,
                            const std::vector<double>& grad_at_theta,
                            const std::vector<double>& grad_at_prime) {
  check_finite_grad(grad_at_theta);
  check_finite_grad(grad_at_prime);
  const double half_sq = 0.5 * step * step;
  ParameterVector fwd_mean(theta.size());
  ParameterVector rev_mean(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    fwd_mean[i] = theta[i] + half_sq * grad_at_theta[i];
    rev_mean[i] = theta_prime[i] + half_sq * grad_at_prime[i];
  }
  return log_gaussian_transition(theta, rev_mean, step) -
         log_gaussian_transition(theta_prime, fwd_mean, step);
}

LangevinProposal propose_langevin(const ParameterVector& theta, double step,
                                  const GradEvaluator& grad_log_target,
                                  RngStream& rng) {
  const std::vector<double> g = grad_log_target(theta);
  LangevinProposal p;
  p.theta_prime = langevin_move(theta, step, g, rng);
  const std::vector<double> g_prime = grad_log_target(p.theta_prime);
  p.log_q_ratio =
      langevin_log_q_ratio(theta, p.theta_prime, step, g, g_prime);
  return p;
}

StepController::StepController(double initial_step, double low, double high,
                               double factor, std::size_t window)
    : step_(initial_step), low_(low), high_(high), factor_(factor),
      window_(window) {
  check_step(initial_step);
  if (!(factor > 1.0))
    throw_config("step adaptation factor must exceed 1");
  if (!(0.0 <= low && low < high && high <= 1.0))
    throw_config("acceptance window must satisfy 0 <= low < high <= 1");
  if (window == 0) throw_config("adaptation window must be positive");
}

double StepController::adapt(double windowed_acceptance) {
  if (frozen_) {
    ++suppressed_;
    return step_;
  }
  if (windowed_acceptance > high_) {
    step_ *= factor_;
    adaptation_log_.push_back(step_);
  } else if (windowed_acceptance < low_) {
    step_ /= factor_;
    adaptation_log_.push_back(step_);
  }
  return step_;
}

void StepController::record(bool accepted) {
  ++count_;
  if (accepted) ++accepted_;
  if (count_ == window_) {
    adapt(static_cast<double>(accepted_) / static_cast<double>(window_));
    count_ = 0;
    accepted_ = 0;
  }
}

}  // namespace mintmc
