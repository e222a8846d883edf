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

#ifndef MINTMC_MODEL_HPP
#define MINTMC_MODEL_HPP

#include <span>
#include <string>

#include "mintmc/types.hpp"

namespace mintmc {

/// Contract every sampler works against: a per-point log likelihood
/// l(x; theta) over fixed-width observation records, an optional per-point
/// gradient, and a log prior (zero, i.e. uniform, by default).
///
/// Models are immutable after construction and safely shareable across
/// threads.
class Model {
 public:
  virtual ~Model() = default;

  /// Parameter dimension d.
  virtual std::size_t dim() const = 0;

  /// Number of doubles in one observation record.
  virtual std::size_t observation_width() const = 0;

  virtual std::string name() const = 0;

  /// log p(x | theta) for one observation.
  virtual double log_lik(std::span<const double> x,
                         const ParameterVector& theta) const = 0;

  virtual bool has_gradient() const { return false; }

  /// Writes d l / d theta into `grad` (overwriting it) and returns l.
  /// Fused so a sampler touching a point for both value and gradient pays
  /// one pass over the record.
  virtual double log_lik_grad(std::span<const double> x,
                              const ParameterVector& theta,
                              std::span<double> grad) const {
    (void)x;
    (void)theta;
    (void)grad;
    throw_config("model '" + name() + "' does not provide gradients");
  }

  /// log prior, up to an additive constant. Defaults to the uniform prior.
  virtual double log_prior(const ParameterVector& theta) const {
    (void)theta;
    return 0.0;
  }

  /// Writes d log_prior / d theta into `grad` (overwriting it).
  virtual void log_prior_grad(const ParameterVector& theta,
                              std::span<double> grad) const {
    (void)theta;
    for (auto& g : grad) g = 0.0;
  }

  /// Throws if an observation record violates the model domain.
  virtual void validate_observation(std::span<const double> x) const {
    (void)x;
  }

  void check_theta(const ParameterVector& theta) const {
    if (theta.size() != dim())
      throw_config("parameter vector has length " +
                   std::to_string(theta.size()) + ", model '" + name() +
                   "' expects " + std::to_string(dim()));
  }

  void check_dataset(const Dataset& data) const {
    if (data.row_width() != observation_width())
      throw_config("dataset row width " + std::to_string(data.row_width()) +
                   " does not match model '" + name() + "' (expects " +
                   std::to_string(observation_width()) + ")");
  }
};

}  // namespace mintmc

#endif  // MINTMC_MODEL_HPP
