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

#include "mintmc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "mintmc/core.hpp"

namespace mintmc {

namespace {

// Partial Fisher-Yates over a virtual identity array, with the displaced
// entries kept in a hash map. O(m) time and memory for any m <= n, uniform
// over ordered m-subsets, and prefix-stable: the first k draws depend only on
// (seed, n), so regenerating with a larger m extends the batch in place.
void draw_indices(std::uint64_t seed, std::size_t n, std::size_t m,
                  std::vector<std::uint32_t>& out) {
  RngStream rng(seed, streams::kBatchRegen);
  std::unordered_map<std::uint32_t, std::uint32_t> displaced;
  displaced.reserve(m * 2);
  out.clear();
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t r =
        j + static_cast<std::size_t>(rng.next_below(
                static_cast<std::uint64_t>(n - j)));
    const auto it_r = displaced.find(static_cast<std::uint32_t>(r));
    const std::uint32_t value_r =
        (it_r == displaced.end()) ? static_cast<std::uint32_t>(r) : it_r->second;
    if (r != j) {
      const auto it_j = displaced.find(static_cast<std::uint32_t>(j));
      const std::uint32_t value_j =
          (it_j == displaced.end()) ? static_cast<std::uint32_t>(j)
                                    : it_j->second;
      displaced[static_cast<std::uint32_t>(r)] = value_j;
    }
    out.push_back(value_r);
  }
}

void check_batch_sizes(std::size_t n, std::size_t m) {
  if (m == 0) throw_config("batch size m must be at least 1");
  if (m > n)
    throw_config("batch size m = " + std::to_string(m) +
                 " exceeds dataset size n = " + std::to_string(n));
  if (n > 0xffffffffULL)
    throw_config("dataset size exceeds the 32-bit index range");
}

// Sum of l over a batch, visiting the indices in sorted order so that a
// full batch reduces bit-exactly to the sequential full-data sum.
template <typename PerIndex>
void for_sorted_indices(const MiniBatch& batch, PerIndex&& fn) {
  std::vector<std::uint32_t> sorted(batch.indices);
  std::sort(sorted.begin(), sorted.end());
  for (const std::uint32_t i : sorted) fn(i);
}

}  // namespace

MiniBatch MiniBatch::regenerate(std::uint64_t seed, std::size_t n,
                                std::size_t m) {
  check_batch_sizes(n, m);
  MiniBatch b;
  b.seed = seed;
  b.n = n;
  b.m = m;
  draw_indices(seed, n, m, b.indices);
  return b;
}

MiniBatch sample_batch(std::size_t n, std::size_t m, RngStream& rng) {
  check_batch_sizes(n, m);
  return MiniBatch::regenerate(rng.next_u64(), n, m);
}

MiniBatch extend_batch(const MiniBatch& batch, std::size_t target_m) {
  if (target_m < batch.m)
    throw_config("extend_batch: target size " + std::to_string(target_m) +
                 " is smaller than the batch (" + std::to_string(batch.m) +
                 ")");
  if (target_m > batch.n)
    throw_config("extend_batch: target size " + std::to_string(target_m) +
                 " exceeds dataset size " + std::to_string(batch.n));
  if (target_m == batch.m) return batch;
  return MiniBatch::regenerate(batch.seed, batch.n, target_m);
}

double mu_hat(const Model& model, const Dataset& data, const MiniBatch& batch,
              const ParameterVector& theta, EvalCounters& evals) {
  model.check_theta(theta);
  model.check_dataset(data);
  if (batch.n != data.size())
    throw_config("batch was drawn for a dataset of size " +
                 std::to_string(batch.n) + ", not " +
                 std::to_string(data.size()));
  double sum = 0.0;
  for_sorted_indices(batch, [&](std::uint32_t i) {
    const double l = model.log_lik(data.row(i), theta);
    if (!std::isfinite(l))
      throw_numeric("non-finite log likelihood at data index " +
                    std::to_string(i));
    sum += l;
  });
  evals.loglik += batch.m;
  return sum / static_cast<double>(batch.m);
}

double mu_hat_with_grad(const Model& model, const Dataset& data,
                        const MiniBatch& batch, const ParameterVector& theta,
                        std::vector<double>& grad_sum, EvalCounters& evals) {
  model.check_theta(theta);
  model.check_dataset(data);
  grad_sum.assign(model.dim(), 0.0);
  std::vector<double> g(model.dim());
  double sum = 0.0;
  for_sorted_indices(batch, [&](std::uint32_t i) {
    const double l = model.log_lik_grad(data.row(i), theta, g);
    if (!std::isfinite(l))
      throw_numeric("non-finite log likelihood at data index " +
                    std::to_string(i));
    sum += l;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!std::isfinite(g[k]))
        throw_numeric("non-finite gradient at data index " +
                      std::to_string(i));
      grad_sum[k] += g[k];
    }
  });
  evals.loglik += batch.m;
  evals.gradient += batch.m;
  return sum / static_cast<double>(batch.m);
}

double refine_mu_hat(const Model& model, const Dataset& data,
                     double old_estimate, const MiniBatch& batch,
                     const MiniBatch& extended, const ParameterVector& theta,
                     EvalCounters& evals) {
  if (extended.seed != batch.seed || extended.n != batch.n ||
      extended.m < batch.m)
    throw_config("refine_mu_hat: extended batch does not extend the input");
  if (extended.m == batch.m) return old_estimate;
  // Only the new tail is evaluated; sorted for locality.
  std::vector<std::uint32_t> tail(extended.indices.begin() + batch.m,
                                  extended.indices.end());
  std::sort(tail.begin(), tail.end());
  double sum_new = 0.0;
  for (const std::uint32_t i : tail) {
    const double l = model.log_lik(data.row(i), theta);
    if (!std::isfinite(l))
      throw_numeric("non-finite log likelihood at data index " +
                    std::to_string(i));
    sum_new += l;
  }
  evals.loglik += extended.m - batch.m;
  return (static_cast<double>(batch.m) * old_estimate + sum_new) /
         static_cast<double>(extended.m);
}

double refine_mu_hat_with_grad(const Model& model, const Dataset& data,
                               double old_estimate, const MiniBatch& batch,
                               const MiniBatch& extended,
                               const ParameterVector& theta,
                               std::vector<double>& grad_sum,
                               EvalCounters& evals) {
  if (extended.seed != batch.seed || extended.n != batch.n ||
      extended.m < batch.m)
    throw_config("refine_mu_hat: extended batch does not extend the input");
  if (grad_sum.size() != model.dim())
    throw_config("refine_mu_hat: gradient sum has the wrong dimension");
  if (extended.m == batch.m) return old_estimate;
  std::vector<std::uint32_t> tail(extended.indices.begin() + batch.m,
                                  extended.indices.end());
  std::sort(tail.begin(), tail.end());
  std::vector<double> g(model.dim());
  double sum_new = 0.0;
  for (const std::uint32_t i : tail) {
    const double l = model.log_lik_grad(data.row(i), theta, g);
    if (!std::isfinite(l))
      throw_numeric("non-finite log likelihood at data index " +
                    std::to_string(i));
    sum_new += l;
    for (std::size_t k = 0; k < g.size(); ++k) grad_sum[k] += g[k];
  }
  evals.loglik += extended.m - batch.m;
  evals.gradient += extended.m - batch.m;
  return (static_cast<double>(batch.m) * old_estimate + sum_new) /
         static_cast<double>(extended.m);
}

TStatSample t_statistic(const Model& model, const Dataset& data, std::size_t m,
                        const ParameterVector& theta, RngStream& rng,
                        EvalCounters& evals) {
  const MiniBatch batch = sample_batch(data.size(), m, rng);
  TStatSample s;
  s.m = m;
  s.mu_hat = mu_hat(model, data, batch, theta, evals);
  s.mu = full_mean_loglik(model, data, theta, evals);
  s.t = std::sqrt(static_cast<double>(m)) * (s.mu_hat - s.mu);
  return s;
}

double finite_population_factor(std::size_t n, std::size_t m) {
  if (n < 2) return 0.0;
  return static_cast<double>(n - m) / static_cast<double>(n - 1);
}

}  // namespace mintmc
