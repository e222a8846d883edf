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

#ifndef MINTMC_MINTEE_HPP
#define MINTMC_MINTEE_HPP

#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "mintmc/chain.hpp"
#include "mintmc/sample_run.hpp"

namespace mintmc {

/// Joint schedule of temperatures, batch sizes and energy levels across the
/// K chains. Chain 0 is the exact posterior chain (m_0 = n, T_0 = 1); batch
/// sizes grow geometrically down the ladder from m_{K-1} = m_min, and the
/// temperatures follow from T_k = n^{1 - alpha * tau_k}.
struct LadderConfig {
  std::size_t chains = 1;          // K
  double gamma = 1.4;              // batch growth factor
  double alpha = 0.995;            // lambda_k = alpha * tau_k
  double c = 10.0;                 // energy spacing: H_{k+1} - H_k = c * T_k
  std::vector<std::size_t> m;      // size K, m[0] = n, strictly decreasing
  std::vector<double> lambda;      // size K (lambda[0] = 1 by convention)
  std::vector<double> T;           // size K, T[0] = 1, strictly increasing
  std::vector<double> H;           // size K; H_K = +infinity is implied
  double p_ee = 0.1;               // EE jump probability
  std::size_t burn_in = 10000;     // B per chain
  std::size_t samples = 30000;     // N per chain
  ProposalKind proposal = ProposalKind::kLangevin;
  double initial_step_scale = 5e-4;  // eps_k starts at scale * sqrt(T_k)
  double accept_low = 0.2;
  double accept_high = 0.5;
  double adapt_factor = 1.1;
  std::size_t adapt_window = 100;
  // Local moves of the mini-batch chains evaluate both endpoints on the
  // step's fresh batch (see StepSpec::paired_estimates). Without this the
  // cached-estimate luck tilts each chain far above its nominal temperature
  // and the exact chain 0 ends up rejecting essentially every EE jump.
  bool paired_estimates = true;
};

/// Fills the m / lambda / T / H arrays. Requires the cost condition
/// m_min * gamma^{K-1} <= n, alpha in (0, 1), and a finite energy lower
/// bound H0 (use pilot_minimum_energy when no analytic value is at hand).
LadderConfig build_ladder(std::size_t n, std::size_t chains, std::size_t m_min,
                          double gamma, double alpha, double c, double h0);

/// Estimated energy of theta from a mini-batch:
/// h_hat = -(n * mu_hat + log prior), so exp(-h_hat / T) matches the MINT
/// kernel below truncation. Counter +batch.m.
double energy_estimate(const Model& model, const Dataset& data,
                       const ParameterVector& theta, const MiniBatch& batch,
                       EvalCounters& evals);

/// The unique level j with H_j <= h_hat < H_{j+1}; values below H_0 map to
/// level 0 and H_K = +infinity makes this a total function.
std::size_t ring_index(double h_hat, const std::vector<double>& H);

/// log pi_k up to a constant: -max(h_hat, H_k) / T_k.
double truncated_log_density(double h_hat, double h_k, double t_k);

/// Deterministic full-batch descent on the energy; returns the lowest energy
/// seen and optionally its argmin. Used to place the ladder's H_0 when no
/// override is given, and as a cheap "representative point" finder.
double pilot_minimum_energy(const Model& model, const Dataset& data,
                            const ParameterVector& init, std::size_t max_iters,
                            EvalCounters& evals,
                            ParameterVector* argmin = nullptr);

/// Append-only per-level store of (theta, h_hat, batch_seed) entries for one
/// chain; Langevin ladders also carry each entry's batch gradient sum so a
/// jump can extend it without revisiting the prefix. Appends validate that
/// the entry's h_hat lies in its level. Reads and writes are mutex-guarded so
/// the parallel mode's readers see a consistent prefix.
class EnergyRings {
 public:
  EnergyRings(std::size_t levels, std::size_t dim, bool store_gradients);
  EnergyRings(EnergyRings&&) noexcept = default;

  std::size_t levels() const { return levels_count_; }

  void append(std::size_t level, const ParameterVector& theta, double h_hat,
              std::uint64_t batch_seed, const std::vector<double>& grad_sum,
              const std::vector<double>& H);

  std::size_t size(std::size_t level) const;

  struct Entry {
    ParameterVector theta;
    double h_hat = 0.0;
    std::uint64_t batch_seed = 0;
    std::vector<double> grad_sum;
  };

  Entry get(std::size_t level, std::size_t index) const;

  std::vector<std::uint64_t> level_counts() const;

 private:
  struct Level {
    std::vector<double> thetas;  // flattened, dim-strided
    std::vector<double> h_hat;
    std::vector<std::uint64_t> seeds;
    std::vector<double> grads;   // flattened, dim-strided (may stay empty)
  };
  std::size_t levels_count_;
  std::size_t dim_;
  bool store_gradients_;
  std::vector<Level> levels_;
  mutable std::unique_ptr<std::mutex> mutex_;
};

struct EeJumpResult {
  bool ring_empty = false;  // caller falls back to an MH step
  bool accepted = false;
  double proposed_distance = 0.0;
};

/// Equi-energy jump for chain k: picks a state of matching energy level
/// uniformly from the adjacent hotter chain's rings, refines its energy
/// estimate (and cached gradient) from m_{k+1} to m_k points, and accepts
/// with the standard EE ratio on the truncated densities. Counter
/// +(m_k - m_{k+1}).
EeJumpResult ee_jump(ChainState& state, const EnergyRings& upper_rings,
                     std::size_t k, const LadderConfig& ladder,
                     const Model& model, const Dataset& data,
                     ChainStreams& streams, EvalCounters& evals);

struct MinteeChainResult {
  SampleRun run;                          // post-burn-in samples of the chain
  std::vector<std::uint64_t> ring_counts; // appended entries per level
  double temperature = 1.0;
  std::size_t batch_size = 0;
  EvalCounters evals;
  EvalCounters evals_at_burn_in;  // snapshot after the chain's first B steps
  EvalCounters evals_at_quota;  // snapshot after the chain's first B+N steps
  std::uint64_t mh_steps = 0;
  std::uint64_t mh_accepts = 0;
  std::uint64_t jumps_attempted = 0;
  std::uint64_t jumps_accepted = 0;
  std::uint64_t jump_fallbacks = 0;  // empty matching ring, MH step taken
  double final_step = 0.0;
};

struct MinteeRun {
  LadderConfig ladder;  // echo with resolved arrays
  std::vector<MinteeChainResult> chains;
  EvalCounters evals_total;
  std::unique_ptr<std::vector<EnergyRings>> rings;  // kept for inspection
};

/// Appendix-schedule MINTEE: the hottest chain starts first, chain k starts
/// once the global iteration passes (K-1-k)(B+N), and each active chain per
/// iteration either EE-jumps (probability p_ee, matching upper ring
/// nonempty) or takes a MINT MH step against its truncated target. Ring
/// appends and samples begin after the chain's own burn-in. `parallel` runs
/// one thread per chain (same invariants, no bit-level determinism).
MinteeRun run_mintee(const Model& model, const Dataset& data,
                     const LadderConfig& ladder,
                     const std::vector<ParameterVector>& init_thetas,
                     std::uint64_t seed, bool parallel = false);

}  // namespace mintmc

#endif  // MINTMC_MINTEE_HPP
