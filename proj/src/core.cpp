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

#include "mintmc/core.hpp"

#include <cmath>
#include <string>

namespace mintmc {

double full_mean_loglik(const Model& model, const Dataset& data,
                        const ParameterVector& theta, EvalCounters& evals) {
  model.check_theta(theta);
  model.check_dataset(data);
  const std::size_t n = data.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = model.log_lik(data.row(i), theta);
    if (!std::isfinite(l))
      throw_numeric("non-finite log likelihood at data index " +
                    std::to_string(i));
    sum += l;
  }
  evals.loglik += n;
  return sum / static_cast<double>(n);
}

double full_mean_loglik_with_grad(const Model& model, const Dataset& data,
                                  const ParameterVector& theta,
                                  std::vector<double>& grad_sum,
                                  EvalCounters& evals) {
  model.check_theta(theta);
  model.check_dataset(data);
  const std::size_t n = data.size();
  grad_sum.assign(model.dim(), 0.0);
  std::vector<double> g(model.dim());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = model.log_lik_grad(data.row(i), theta, g);
    if (!std::isfinite(l))
      throw_numeric("non-finite log likelihood at data index " +
                    std::to_string(i));
    sum += l;
    for (std::size_t k = 0; k < g.size(); ++k) grad_sum[k] += g[k];
  }
  evals.loglik += n;
  evals.gradient += n;
  return sum / static_cast<double>(n);
}

double log_posterior_tempered(const Model& model, const Dataset& data,
                              const ParameterVector& theta, double temperature,
                              EvalCounters& evals) {
  if (!(temperature >= 1.0))
    throw_config("temperature must be >= 1, got " +
                 std::to_string(temperature));
  const double mu = full_mean_loglik(model, data, theta, evals);
  const double n = static_cast<double>(data.size());
  return (n * mu + model.log_prior(theta)) / temperature;
}

}  // namespace mintmc
