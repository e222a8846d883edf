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

#ifndef MINTMC_CORE_HPP
#define MINTMC_CORE_HPP

#include "mintmc/model.hpp"
#include "mintmc/types.hpp"

namespace mintmc {

/// mu(theta) = (1/n) * sum_i l(x_i; theta) over the whole dataset.
/// Increments the evaluation counter by n. Throws kNumeric naming the
/// offending index if any per-point log likelihood is non-finite.
double full_mean_loglik(const Model& model, const Dataset& data,
                        const ParameterVector& theta, EvalCounters& evals);

/// As full_mean_loglik, but also accumulates the full-data gradient sum of l
/// into `grad_sum` (overwriting it). One fused pass; counter +n.
double full_mean_loglik_with_grad(const Model& model, const Dataset& data,
                                  const ParameterVector& theta,
                                  std::vector<double>& grad_sum,
                                  EvalCounters& evals);

/// Unnormalized log of the tempered posterior pi_T:
/// (n * mu(theta) + log prior(theta)) / T, with T >= 1. T = 1 gives the
/// true unnormalized log posterior. The prior is tempered together with the
/// likelihood.
double log_posterior_tempered(const Model& model, const Dataset& data,
                              const ParameterVector& theta, double temperature,
                              EvalCounters& evals);

}  // namespace mintmc

#endif  // MINTMC_CORE_HPP
