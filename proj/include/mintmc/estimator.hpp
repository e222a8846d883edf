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

#ifndef MINTMC_ESTIMATOR_HPP
#define MINTMC_ESTIMATOR_HPP

#include <cstdint>
#include <vector>

#include "mintmc/model.hpp"
#include "mintmc/rng.hpp"
#include "mintmc/types.hpp"

namespace mintmc {

/// m distinct indices drawn uniformly without replacement from [0, n).
///
/// A batch is fully determined by (seed, n, m): regenerate() replays the
/// draw, and regenerating with a larger m yields the same indices as a
/// prefix. Energy rings therefore only need to store the seed.
struct MiniBatch {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<std::uint32_t> indices;  // in draw order, pairwise distinct

  /// Recomputes `indices` as the pure function of (seed, n, m).
  static MiniBatch regenerate(std::uint64_t seed, std::size_t n,
                              std::size_t m);
};

/// Draws a fresh batch seed from `rng` and materializes the batch.
/// Requires 1 <= m <= n. m = n yields a uniform random permutation.
MiniBatch sample_batch(std::size_t n, std::size_t m, RngStream& rng);

/// Batch extended to `target_m` indices: the first batch.m indices equal the
/// input's, the rest are drawn without replacement from the complement.
/// Deterministic given batch.seed; requires batch.m <= target_m <= n.
MiniBatch extend_batch(const MiniBatch& batch, std::size_t target_m);

/// Mini-batch estimate mu_hat(theta) = (1/m) * sum over the batch of l.
/// Increments the evaluation counter by m.
double mu_hat(const Model& model, const Dataset& data, const MiniBatch& batch,
              const ParameterVector& theta, EvalCounters& evals);

/// As mu_hat, but also accumulates the batch-sum gradient of l into
/// `grad_sum` (overwriting it). One fused pass; counter +m.
double mu_hat_with_grad(const Model& model, const Dataset& data,
                        const MiniBatch& batch, const ParameterVector& theta,
                        std::vector<double>& grad_sum, EvalCounters& evals);

/// Updates a mini-batch mean to the extended batch, evaluating l only on the
/// new indices: (batch.m * old_estimate + sum_new) / extended.m.
/// `extended` must extend `batch` (same seed and n).
double refine_mu_hat(const Model& model, const Dataset& data,
                     double old_estimate, const MiniBatch& batch,
                     const MiniBatch& extended, const ParameterVector& theta,
                     EvalCounters& evals);

/// As refine_mu_hat, but also extends a cached batch gradient sum in place
/// (grad_sum covers `batch` on entry, `extended` on exit). One fused pass
/// over the new indices only.
double refine_mu_hat_with_grad(const Model& model, const Dataset& data,
                               double old_estimate, const MiniBatch& batch,
                               const MiniBatch& extended,
                               const ParameterVector& theta,
                               std::vector<double>& grad_sum,
                               EvalCounters& evals);

/// One draw of the CLT statistic t = sqrt(m) * (mu_hat - mu).
struct TStatSample {
  double t = 0.0;
  double mu_hat = 0.0;
  double mu = 0.0;
  std::size_t m = 0;
};

TStatSample t_statistic(const Model& model, const Dataset& data, std::size_t m,
                        const ParameterVector& theta, RngStream& rng,
                        EvalCounters& evals);

/// (n - m) / (n - 1): the without-replacement variance shrinkage the CLT
/// argument ignores. Reported by diagnostics, never used in acceptance rules.
double finite_population_factor(std::size_t n, std::size_t m);

}  // namespace mintmc

#endif  // MINTMC_ESTIMATOR_HPP
