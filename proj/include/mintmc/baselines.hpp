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

#ifndef MINTMC_BASELINES_HPP
#define MINTMC_BASELINES_HPP

#include <cstdint>

#include "mintmc/chain.hpp"
#include "mintmc/sample_run.hpp"

namespace mintmc {

/// Full-batch Metropolis-Hastings on the tempered posterior pi_T (T = 1 is
/// plain MH on the true posterior).
struct MhConfig {
  double temperature = 1.0;  // T >= 1
  std::size_t burn_in = 0;
  std::size_t samples = 0;
  ProposalKind proposal = ProposalKind::kRandomWalk;
  double step = 1.0;
};

/// One full-batch MH step; counter +n per proposal. With T = n^{1-lambda}
/// this is bit-identical to mint_step at m = n under the same streams.
StepOutcome mh_step(ChainState& state, const Model& model, const Dataset& data,
                    const MhConfig& config, ChainStreams& streams,
                    EvalCounters& evals);

SampleRun run_mh(const Model& model, const Dataset& data,
                 const MhConfig& config, const ParameterVector& init,
                 std::uint64_t seed);

enum class SgldSchedule { kConstant, kPolynomial };

/// Stochastic Gradient Langevin Dynamics: theta moves along the stochastic
/// gradient of the log posterior plus injected noise, with no MH correction.
struct SgldConfig {
  std::size_t batch_size = 0;
  SgldSchedule schedule = SgldSchedule::kConstant;
  double eps = 0.01;        // constant schedule step
  double a = 0.01;          // polynomial: eps_t = a * (b + t)^{-gamma_s}
  double b = 1.0;
  double gamma_s = 1.0 / 3.0;
  std::size_t burn_in = 0;
  std::size_t steps = 0;    // recorded post-burn-in steps
};

/// Step size at 0-based iteration t.
double sgld_step_size(const SgldConfig& config, std::size_t t);

/// One SGLD update; requires gradients; counter +m.
void sgld_step(ParameterVector& theta, const Model& model, const Dataset& data,
               const SgldConfig& config, std::size_t t, ChainStreams& streams,
               EvalCounters& evals);

SampleRun run_sgld(const Model& model, const Dataset& data,
                   const SgldConfig& config, const ParameterVector& init,
                   std::uint64_t seed);

}  // namespace mintmc

#endif  // MINTMC_BASELINES_HPP
