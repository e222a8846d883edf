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

#ifndef MINTMC_PROPOSALS_HPP
#define MINTMC_PROPOSALS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "mintmc/rng.hpp"
#include "mintmc/types.hpp"

namespace mintmc {

enum class ProposalKind { kRandomWalk, kLangevin };

/// theta' = theta + step * z with z standard normal per coordinate.
/// Symmetric, so the log q-ratio is identically zero.
ParameterVector propose_random_walk(const ParameterVector& theta, double step,
                                    RngStream& rng);

struct LangevinProposal {
  ParameterVector theta_prime;
  double log_q_ratio = 0.0;  // log q(theta' -> theta) - log q(theta -> theta')
};

using GradEvaluator =
    std::function<std::vector<double>(const ParameterVector&)>;

/// Drift-plus-noise proposal theta' = theta + (step^2/2) g + step z with the
/// full MALA correction computed from the Gaussian transition densities,
/// evaluating `grad_log_target` at both endpoints. Throws kNumeric on
/// non-finite gradients.
LangevinProposal propose_langevin(const ParameterVector& theta, double step,
                                  const GradEvaluator& grad_log_target,
                                  RngStream& rng);

/// Split form used by the samplers, where the gradient at theta is carried in
/// the chain state and the gradient at theta' comes out of the same batch
/// pass that evaluates mu_hat(theta'): draw the forward move first, then
/// finish the q-ratio once the reverse drift is known.
ParameterVector langevin_move(const ParameterVector& theta, double step,
                              const std::vector<double>& grad_at_theta,
                              RngStream& rng);

double langevin_log_q_ratio(const ParameterVector& theta,
                            const ParameterVector& theta_prime, double step,
                            const std::vector<double>& grad_at_theta,
                            const std::vector<double>& grad_at_prime);

/// Multiplicative step-size controller targeting a windowed acceptance rate
/// inside [low, high]. Above the window the step is multiplied by `factor`,
/// below it divided; adaptation stops once frozen.
class StepController {
 public:
  explicit StepController(double initial_step, double low = 0.2,
                          double high = 0.5, double factor = 1.1,
                          std::size_t window = 100);

  double step() const { return step_; }
  bool frozen() const { return frozen_; }
  std::size_t window() const { return window_; }
  const std::vector<double>& adaptation_log() const { return adaptation_log_; }

  /// Applies the rule for one completed window. No-op when frozen (the call
  /// is recorded as a suppressed event). Returns the current step.
  double adapt(double windowed_acceptance);

  /// Per-step bookkeeping; triggers adapt() each time `window` outcomes
  /// accumulate.
  void record(bool accepted);

  void freeze() { frozen_ = true; }
  std::size_t suppressed_adaptations() const { return suppressed_; }

 private:
  double step_;
  double low_, high_, factor_;
  std::size_t window_;
  std::size_t count_ = 0;
  std::size_t accepted_ = 0;
  bool frozen_ = false;
  std::size_t suppressed_ = 0;
  std::vector<double> adaptation_log_;  // step value after each adaptation
};

}  // namespace mintmc

#endif  // MINTMC_PROPOSALS_HPP
