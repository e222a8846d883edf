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

#ifndef MINTMC_CHAIN_HPP
#define MINTMC_CHAIN_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "mintmc/estimator.hpp"
#include "mintmc/model.hpp"
#include "mintmc/proposals.hpp"
#include "mintmc/rng.hpp"
#include "mintmc/types.hpp"

namespace mintmc {

/// Augmented-space state of one chain. `mu_value` (and for Langevin chains
/// the batch gradient sum) is cached from the iteration at which `theta` was
/// accepted and stays untouched across rejections: the mini-batch estimate is
/// part of the state, not recomputed per step.
struct ChainState {
  ParameterVector theta;
  double mu_value = 0.0;   // mini-batch mean log likelihood at theta
  double log_prior = 0.0;  // log prior at theta
  std::vector<double> grad_sum;  // batch sum of grad l at theta (Langevin
                                 // chains only, else empty)
  std::uint64_t batch_seed = 0;  // batch behind mu_value; 0 for a full batch
  std::size_t iteration = 0;
  bool accepted = false;  // outcome of the last step
};

/// The fixed RNG stream layout of one chain. Chain k of a ladder uses the
/// same layout shifted by k * kStreamStride, so chain 0 of any multi-chain
/// run consumes exactly the streams a single-chain sampler would.
struct ChainStreams {
  RngStream proposal;
  RngStream accept;
  RngStream batch_seed;
  RngStream move_select;
  RngStream jump_select;

  ChainStreams(std::uint64_t seed, std::size_t chain)
      : proposal(seed, base(chain) + streams::kProposal),
        accept(seed, base(chain) + streams::kAccept),
        batch_seed(seed, base(chain) + streams::kBatchSeed),
        move_select(seed, base(chain) + streams::kMoveSelect),
        jump_select(seed, base(chain) + streams::kJumpSelect) {}

  static std::uint64_t base(std::size_t chain) {
    return streams::kStreamStride * static_cast<std::uint64_t>(chain);
  }
};

inline constexpr double kNoTruncation =
    -std::numeric_limits<double>::infinity();

/// Target and mechanics of one Metropolis step. MINT, full-batch MH, tempered
/// MH and the MINTEE chains all step through the same code with different
/// settings, which is what makes the full-batch reductions exact.
struct StepSpec {
  std::size_t batch_size = 0;  // m; equal to n means full batch
  double temperature = 1.0;    // T dividing the (truncated) energy difference
  double truncation = kNoTruncation;  // H_k floor applied as max(h, H_k)
  ProposalKind kind = ProposalKind::kRandomWalk;
  double step = 1.0;           // proposal step size
  bool naive_scaling = false;  // scale the likelihood difference by n instead
                               // of n^lambda (negative control)
  // Evaluate both endpoints on the step's fresh batch instead of comparing
  // against the cached estimate. The common batch cancels most estimator
  // noise for local moves, which keeps a ladder chain near its nominal
  // temperature; the cost is 2m touches per step. Used by the MINTEE chains;
  // plain MINT keeps the cached (augmented-state) semantics.
  bool paired_estimates = false;
};

/// h(theta) = -(n * mu + log prior): the energy whose tempered, truncated
/// Boltzmann form is every chain's target.
inline double energy_value(std::size_t n, double mu_value, double log_prior) {
  return -(static_cast<double>(n) * mu_value + log_prior);
}

/// Drift of the truncated tempered log target at a point with estimated
/// energy h: zero in the flat region h <= H, else
/// ((n/m) grad_sum + prior grad) / T.
std::vector<double> target_drift(const Model& model, std::size_t n,
                                 const ParameterVector& theta,
                                 const std::vector<double>& grad_sum,
                                 std::size_t batch_m, double h,
                                 double truncation, double temperature);

/// Evaluates theta0 on a fresh batch (or the full data) and assembles the
/// initial cached state.
ChainState init_chain_state(const Model& model, const Dataset& data,
                            const ParameterVector& theta0,
                            const StepSpec& spec, ChainStreams& streams,
                            EvalCounters& evals);

struct StepOutcome {
  bool accepted = false;
  double proposed_distance = 0.0;  // Euclidean ||theta' - theta||
};

/// One Metropolis step: fresh batch, proposal, acceptance against the
/// truncated tempered target. Mutates `state` in place; cached values change
/// only on acceptance. Touches exactly spec.batch_size data points.
StepOutcome chain_step(ChainState& state, const Model& model,
                       const Dataset& data, const StepSpec& spec,
                       ChainStreams& streams, EvalCounters& evals);

}  // namespace mintmc

#endif  // MINTMC_CHAIN_HPP
