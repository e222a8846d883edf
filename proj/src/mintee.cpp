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

#include "mintmc/mintee.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <thread>

#include "mintmc/core.hpp"

namespace mintmc {

LadderConfig build_ladder(std::size_t n, std::size_t chains, std::size_t m_min,
                          double gamma, double alpha, double c, double h0) {
  if (chains == 0) throw_config("ladder needs at least one chain");
  if (!(gamma > 1.0)) throw_config("batch growth factor gamma must exceed 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw_config("alpha must lie in (0, 1), got " + std::to_string(alpha));
  if (!(c > 0.0)) throw_config("energy spacing constant c must be positive");
  if (!std::isfinite(h0)) throw_config("energy lower bound H0 must be finite");

  LadderConfig ladder;
  ladder.chains = chains;
  ladder.gamma = gamma;
  ladder.alpha = alpha;
  ladder.c = c;
  const std::size_t K = chains;

  ladder.m.assign(K, n);
  if (K > 1) {
    if (m_min < 2) throw_config("m_min must be at least 2");
    // Cost condition: the geometric ladder must fit under n.
    const double reach =
        static_cast<double>(m_min) *
        std::pow(gamma, static_cast<double>(K - 1));
    if (reach > static_cast<double>(n))
      throw_config("ladder cost condition violated: m_min * gamma^(K-1) = " +
                   std::to_string(reach) + " exceeds n = " +
                   std::to_string(n));
    ladder.m[K - 1] = m_min;
    for (std::size_t k = K - 2; k >= 1; --k)
      ladder.m[k] = static_cast<std::size_t>(
          std::llround(gamma * static_cast<double>(ladder.m[k + 1])));
    for (std::size_t k = 0; k + 1 < K; ++k)
      if (ladder.m[k] <= ladder.m[k + 1])
        throw_config("batch ladder is not strictly decreasing; shorten the "
                     "ladder or lower m_min");
  }

  // Chain 0 is the exact posterior chain: full batch, T = 1, no tempering
  // exponent. The others follow lambda_k = alpha * tau_k.
  ladder.lambda.assign(K, 1.0);
  ladder.T.assign(K, 1.0);
  const double log_n = std::log(static_cast<double>(n));
  for (std::size_t k = 1; k < K; ++k) {
    ladder.lambda[k] =
        alpha * std::log(static_cast<double>(ladder.m[k])) / log_n;
    ladder.T[k] = std::exp((1.0 - ladder.lambda[k]) * log_n);
    if (ladder.T[k] <= ladder.T[k - 1])
      throw_config("temperature ladder is not strictly increasing");
  }

  ladder.H.assign(K, h0);
  for (std::size_t k = 0; k + 1 < K; ++k)
    ladder.H[k + 1] = ladder.H[k] + c * ladder.T[k];
  return ladder;
}

double energy_estimate(const Model& model, const Dataset& data,
                       const ParameterVector& theta, const MiniBatch& batch,
                       EvalCounters& evals) {
  const double mu = mu_hat(model, data, batch, theta, evals);
  return energy_value(data.size(), mu, model.log_prior(theta));
}

std::size_t ring_index(double h_hat, const std::vector<double>& H) {
  if (H.empty()) throw_config("ring_index needs a non-empty energy ladder");
  const auto it = std::upper_bound(H.begin(), H.end(), h_hat);
  if (it == H.begin()) return 0;  // below H_0 maps to the lowest ring
  return static_cast<std::size_t>(it - H.begin()) - 1;
}

double truncated_log_density(double h_hat, double h_k, double t_k) {
  if (!(t_k >= 1.0)) throw_config("truncated density needs T >= 1");
  return -std::max(h_hat, h_k) / t_k;
}

double pilot_minimum_energy(const Model& model, const Dataset& data,
                            const ParameterVector& init, std::size_t max_iters,
                            EvalCounters& evals, ParameterVector* argmin) {
  if (!model.has_gradient())
    throw_config("the pilot energy search needs gradients; pass an explicit "
                 "H0 for gradient-free models");
  const std::size_t n = data.size();
  ParameterVector theta = init;
  // Symmetric models have saddle points with symmetric gradients (the origin
  // of the symmetric mixture is one), and plain descent cannot leave the
  // symmetric subspace. A small deterministic asymmetric kick breaks ties.
  for (std::size_t j = 0; j < theta.size(); ++j)
    theta[j] += 1e-3 * static_cast<double>(j + 1) /
                static_cast<double>(theta.size());
  std::vector<double> grad_sum;
  std::vector<double> prior_grad(model.dim());
  std::vector<double> h_grad(model.dim());
  double h = energy_value(
      n, full_mean_loglik_with_grad(model, data, theta, grad_sum, evals),
      model.log_prior(theta));
  // Normalized descent with a multiplicative trust step: grow on progress,
  // shrink on overshoot.
  double step = 0.1;
  for (std::size_t it = 0; it < max_iters && step > 1e-12; ++it) {
    model.log_prior_grad(theta, prior_grad);
    double norm = 0.0;
    for (std::size_t i = 0; i < h_grad.size(); ++i) {
      h_grad[i] = -(grad_sum[i] + prior_grad[i]);  // h = -(n mu + log prior)
      norm += h_grad[i] * h_grad[i];
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) break;
    ParameterVector trial(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i)
      trial[i] = theta[i] - step * h_grad[i] / norm;
    std::vector<double> trial_grad;
    const double trial_h = energy_value(
        n, full_mean_loglik_with_grad(model, data, trial, trial_grad, evals),
        model.log_prior(trial));
    if (trial_h < h) {
      theta = std::move(trial);
      grad_sum = std::move(trial_grad);
      h = trial_h;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  if (argmin != nullptr) *argmin = theta;
  return h;
}

// ---------------------------------------------------------------------------
// EnergyRings

EnergyRings::EnergyRings(std::size_t levels, std::size_t dim,
                         bool store_gradients)
    : levels_count_(levels), dim_(dim), store_gradients_(store_gradients),
      levels_(levels), mutex_(std::make_unique<std::mutex>()) {
  if (levels == 0) throw_config("energy rings need at least one level");
}

void EnergyRings::append(std::size_t level, const ParameterVector& theta,
                         double h_hat, std::uint64_t batch_seed,
                         const std::vector<double>& grad_sum,
                         const std::vector<double>& H) {
  if (ring_index(h_hat, H) != level)
    throw_config("ring append: h_hat does not belong to level " +
                 std::to_string(level));
  if (store_gradients_ && grad_sum.size() != dim_)
    throw_config("ring append: missing gradient sum");
  std::lock_guard<std::mutex> lock(*mutex_);
  Level& l = levels_[level];
  l.thetas.insert(l.thetas.end(), theta.begin(), theta.end());
  l.h_hat.push_back(h_hat);
  l.seeds.push_back(batch_seed);
  if (store_gradients_)
    l.grads.insert(l.grads.end(), grad_sum.begin(), grad_sum.end());
}

std::size_t EnergyRings::size(std::size_t level) const {
  std::lock_guard<std::mutex> lock(*mutex_);
  return levels_[level].h_hat.size();
}

EnergyRings::Entry EnergyRings::get(std::size_t level,
                                    std::size_t index) const {
  std::lock_guard<std::mutex> lock(*mutex_);
  const Level& l = levels_[level];
  Entry e;
  e.theta.assign(l.thetas.begin() + index * dim_,
                 l.thetas.begin() + (index + 1) * dim_);
  e.h_hat = l.h_hat[index];
  e.batch_seed = l.seeds[index];
  if (store_gradients_)
    e.grad_sum.assign(l.grads.begin() + index * dim_,
                      l.grads.begin() + (index + 1) * dim_);
  return e;
}

std::vector<std::uint64_t> EnergyRings::level_counts() const {
  std::lock_guard<std::mutex> lock(*mutex_);
  std::vector<std::uint64_t> counts(levels_count_);
  for (std::size_t j = 0; j < levels_count_; ++j)
    counts[j] = levels_[j].h_hat.size();
  return counts;
}

// ---------------------------------------------------------------------------
// EE jump

EeJumpResult ee_jump(ChainState& state, const EnergyRings& upper_rings,
                     std::size_t k, const LadderConfig& ladder,
                     const Model& model, const Dataset& data,
                     ChainStreams& streams, EvalCounters& evals) {
  EeJumpResult result;
  const std::size_t n = data.size();
  const double h_current = energy_value(n, state.mu_value, state.log_prior);
  const std::size_t level = ring_index(h_current, ladder.H);

  const std::size_t ring_size = upper_rings.size(level);
  if (ring_size == 0) {
    result.ring_empty = true;
    return result;
  }

  const std::size_t pick =
      static_cast<std::size_t>(streams.jump_select.next_below(ring_size));
  EnergyRings::Entry entry = upper_rings.get(level, pick);

  // Bring the stored estimate up to this chain's batch size. The stored
  // h_hat is based on m_{k+1} points; the refinement touches only the
  // m_k - m_{k+1} new ones.
  const std::size_t m_upper = ladder.m[k + 1];
  const std::size_t m_here = ladder.m[k];
  const double lp_prime = model.log_prior(entry.theta);
  double mu_prime = (-entry.h_hat - lp_prime) / static_cast<double>(n);
  std::uint64_t seed_prime = entry.batch_seed;
  std::vector<double> grad_prime = std::move(entry.grad_sum);
  if (m_here > m_upper) {
    const bool full = m_here == n;
    const MiniBatch batch = MiniBatch::regenerate(seed_prime, n, m_upper);
    const MiniBatch extended = extend_batch(batch, m_here);
    if (ladder.proposal == ProposalKind::kLangevin) {
      mu_prime = refine_mu_hat_with_grad(model, data, mu_prime, batch,
                                         extended, entry.theta, grad_prime,
                                         evals);
    } else {
      mu_prime = refine_mu_hat(model, data, mu_prime, batch, extended,
                               entry.theta, evals);
    }
    if (full) seed_prime = 0;
  }
  const double h_prime = energy_value(n, mu_prime, lp_prime);

  // Standard Equi-Energy criterion on the truncated tempered densities:
  //   pi_k(theta') pi_{k+1}(theta) / (pi_k(theta) pi_{k+1}(theta')),
  // with both endpoint energies at this chain's batch accuracy.
  const double log_ratio =
      (truncated_log_density(h_prime, ladder.H[k], ladder.T[k]) +
       truncated_log_density(h_current, ladder.H[k + 1], ladder.T[k + 1])) -
      (truncated_log_density(h_current, ladder.H[k], ladder.T[k]) +
       truncated_log_density(h_prime, ladder.H[k + 1], ladder.T[k + 1]));

  double ss = 0.0;
  for (std::size_t i = 0; i < state.theta.size(); ++i) {
    const double d = entry.theta[i] - state.theta[i];
    ss += d * d;
  }
  result.proposed_distance = std::sqrt(ss);

  const double u = streams.accept.next_double();
  result.accepted = u < std::exp(log_ratio);
  if (result.accepted) {
    state.theta = std::move(entry.theta);
    state.mu_value = mu_prime;
    state.log_prior = lp_prime;
    state.batch_seed = seed_prime;
    if (ladder.proposal == ProposalKind::kLangevin)
      state.grad_sum = std::move(grad_prime);
  }
  state.accepted = result.accepted;
  ++state.iteration;
  return result;
}

// ---------------------------------------------------------------------------
// The staged round-robin run

namespace {

struct ChainContext {
  StepSpec spec;
  ChainStreams streams;
  StepController controller;
  ChainState state;
  MinteeChainResult result;
  EvalCounters evals;
  std::size_t local_steps = 0;

  ChainContext(const Model& model, const Dataset& data,
               const LadderConfig& ladder, std::size_t k,
               const ParameterVector& init, std::uint64_t seed)
      : streams(seed, k),
        controller(ladder.initial_step_scale * std::sqrt(ladder.T[k]),
                   ladder.accept_low, ladder.accept_high, ladder.adapt_factor,
                   ladder.adapt_window) {
    spec.batch_size = ladder.m[k];
    spec.temperature = ladder.T[k];
    spec.truncation = ladder.H[k];
    spec.kind = ladder.proposal;
    spec.step = controller.step();
    spec.paired_estimates = ladder.paired_estimates;
    state = init_chain_state(model, data, init, spec, streams, evals);
    result.temperature = ladder.T[k];
    result.batch_size = ladder.m[k];
    result.run.dim = model.dim();
    result.run.burn_in = ladder.burn_in;
    result.run.seed = seed;
  }
};

// One scheduled step of chain k (MH move or EE jump), plus ring/sample
// bookkeeping. `upper` is null for the hottest chain.
void chain_tick(ChainContext& ctx, std::size_t k, const EnergyRings* upper,
                EnergyRings& own, const Model& model, const Dataset& data,
                const LadderConfig& ladder) {
  ++ctx.local_steps;

  // The move-type draw happens every step, jump or not, as in the pseudo
  // code; this keeps chain trajectories aligned across ladder variants.
  const double u_move = ctx.streams.move_select.next_double();
  bool did_jump = false;
  bool accepted = false;
  double proposed = 0.0;

  if (upper != nullptr && u_move >= 1.0 - ladder.p_ee) {
    const EeJumpResult jump =
        ee_jump(ctx.state, *upper, k, ladder, model, data, ctx.streams,
                ctx.evals);
    if (jump.ring_empty) {
      ++ctx.result.jump_fallbacks;
    } else {
      did_jump = true;
      accepted = jump.accepted;
      proposed = jump.proposed_distance;
      ++ctx.result.jumps_attempted;
      if (jump.accepted) ++ctx.result.jumps_accepted;
    }
  }
  if (!did_jump) {
    ctx.spec.step = ctx.controller.step();
    const StepOutcome out =
        chain_step(ctx.state, model, data, ctx.spec, ctx.streams, ctx.evals);
    accepted = out.accepted;
    proposed = out.proposed_distance;
    ++ctx.result.mh_steps;
    if (out.accepted) ++ctx.result.mh_accepts;
    ctx.controller.record(out.accepted);
  }

  // Step-size adaptation stops once the chain's own burn-in completes, so
  // the recorded stretch of the chain is time-homogeneous.
  if (ctx.local_steps == ladder.burn_in) {
    ctx.controller.freeze();
    ctx.result.evals_at_burn_in = ctx.evals;
  }

  if (ctx.local_steps > ladder.burn_in) {
    const double h =
        energy_value(data.size(), ctx.state.mu_value, ctx.state.log_prior);
    own.append(ring_index(h, ladder.H), ctx.state.theta, h,
               ctx.state.batch_seed, ctx.state.grad_sum, ladder.H);
    ctx.result.run.push(ctx.state.theta, accepted, proposed,
                        accepted ? proposed : 0.0);
  }
  if (ctx.local_steps == ladder.burn_in + ladder.samples)
    ctx.result.evals_at_quota = ctx.evals;
}

void validate_mintee_inputs(const Model& model, const Dataset& data,
                            const LadderConfig& ladder,
                            const std::vector<ParameterVector>& init_thetas) {
  const std::size_t K = ladder.chains;
  if (K == 0 || ladder.m.size() != K || ladder.T.size() != K ||
      ladder.H.size() != K)
    throw_config("ladder arrays are not sized to the chain count");
  if (ladder.m[0] != data.size())
    throw_config("chain 0 must run the full batch (m_0 = n)");
  if (!(ladder.p_ee > 0.0 && ladder.p_ee < 1.0))
    throw_config("p_ee must lie in (0, 1)");
  if (init_thetas.size() != K)
    throw_config("need one initial point per chain");
  for (const auto& t : init_thetas) model.check_theta(t);
}

}  // namespace

MinteeRun run_mintee(const Model& model, const Dataset& data,
                     const LadderConfig& ladder,
                     const std::vector<ParameterVector>& init_thetas,
                     std::uint64_t seed, bool parallel) {
  validate_mintee_inputs(model, data, ladder, init_thetas);
  const std::size_t K = ladder.chains;
  const std::size_t block = ladder.burn_in + ladder.samples;
  const bool langevin = ladder.proposal == ProposalKind::kLangevin;

  auto rings = std::make_unique<std::vector<EnergyRings>>();
  rings->reserve(K);
  for (std::size_t k = 0; k < K; ++k)
    rings->emplace_back(K, model.dim(), langevin);

  std::vector<std::unique_ptr<ChainContext>> chains;
  chains.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    chains.push_back(std::make_unique<ChainContext>(model, data, ladder, k,
                                                    init_thetas[k], seed));
    chains[k]->result.run.reserve((k + 1) * block - ladder.burn_in);
  }

  if (!parallel) {
    // Algorithm-faithful sequential schedule: per global iteration, hottest
    // chain first; chain k sits out until iteration (K-1-k)(B+N).
    const std::size_t total = K * block;
    for (std::size_t iter = 1; iter <= total; ++iter) {
      for (std::size_t kk = K; kk-- > 0;) {
        const std::size_t start = (K - 1 - kk) * block;
        if (iter <= start) continue;
        const EnergyRings* upper = kk + 1 < K ? &(*rings)[kk + 1] : nullptr;
        chain_tick(*chains[kk], kk, upper, (*rings)[kk], model, data, ladder);
      }
    }
  } else {
    // One thread per chain. Chain k may take its local step s only once
    // chain k+1 has finished s + (B+N) local steps, which guarantees its
    // rings hold at least the sequential schedule's prefix.
    std::vector<std::atomic<std::size_t>> done(K);
    for (auto& d : done) d.store(0);
    std::mutex wake_mutex;
    std::condition_variable wake;
    std::vector<std::thread> threads;
    threads.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
      threads.emplace_back([&, k]() {
        ChainContext& ctx = *chains[k];
        const std::size_t my_steps = (k + 1) * block;
        const EnergyRings* upper = k + 1 < K ? &(*rings)[k + 1] : nullptr;
        for (std::size_t s = 1; s <= my_steps; ++s) {
          if (k + 1 < K) {
            std::unique_lock<std::mutex> lock(wake_mutex);
            wake.wait(lock,
                      [&]() { return done[k + 1].load() >= s + block; });
          }
          chain_tick(ctx, k, upper, (*rings)[k], model, data, ladder);
          done[k].store(s);
          wake.notify_all();
        }
        // Unblock colder chains still waiting on this one's counter.
        done[k].store(my_steps + K * block);
        wake.notify_all();
      });
    }
    for (auto& t : threads) t.join();
  }

  MinteeRun out;
  out.ladder = ladder;
  for (std::size_t k = 0; k < K; ++k) {
    ChainContext& ctx = *chains[k];
    ctx.result.ring_counts = (*rings)[k].level_counts();
    ctx.result.evals = ctx.evals;
    ctx.result.run.evals = ctx.evals;
    ctx.result.final_step = ctx.controller.step();
    out.evals_total += ctx.evals;
    out.chains.push_back(std::move(ctx.result));
  }
  out.rings = std::move(rings);
  return out;
}

}  // namespace mintmc
