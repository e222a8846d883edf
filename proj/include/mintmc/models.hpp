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

#ifndef MINTMC_MODELS_HPP
#define MINTMC_MODELS_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mintmc/model.hpp"
#include "mintmc/rng.hpp"
#include "mintmc/types.hpp"

namespace mintmc {

/// Mixture of two Gaussians with tied means:
///   x ~ 0.5 N(theta1, sigma_x^2) + 0.5 N(theta1 + theta2, sigma_x^2),
/// with priors theta1 ~ N(0, sigma1^2), theta2 ~ N(0, sigma2^2).
/// Swapping the component means maps (a, b) to (a + b, -b), so the posterior
/// is bimodal. The non-uniform prior exercises the general-prior path of the
/// samplers.
class TiedMeansMixture : public Model {
 public:
  TiedMeansMixture(double sigma1_sq = 10.0, double sigma2_sq = 1.0,
                   double sigmax_sq = 2.0);

  std::size_t dim() const override { return 2; }
  std::size_t observation_width() const override { return 1; }
  std::string name() const override { return "tied_means"; }
  double log_lik(std::span<const double> x,
                 const ParameterVector& theta) const override;
  bool has_gradient() const override { return true; }
  double log_lik_grad(std::span<const double> x, const ParameterVector& theta,
                      std::span<double> grad) const override;
  double log_prior(const ParameterVector& theta) const override;
  void log_prior_grad(const ParameterVector& theta,
                      std::span<double> grad) const override;

  double sigma1_sq() const { return sigma1_sq_; }
  double sigma2_sq() const { return sigma2_sq_; }
  double sigmax_sq() const { return sigmax_sq_; }

 private:
  double sigma1_sq_, sigma2_sq_, sigmax_sq_;
};

/// Equal-weight mixture of d unit-variance Gaussians at locations
/// theta_1..theta_d, for scalar observations:
///   x ~ (1/d) sum_j N(theta_j, 1).
/// Uniform prior. Permutation symmetry puts a posterior mode at every
/// coordinate permutation of the generating parameter. d = 1 is the plain
/// Gaussian location model used by the grid oracles.
class SymmetricMixture : public Model {
 public:
  explicit SymmetricMixture(std::size_t d);

  std::size_t dim() const override { return d_; }
  std::size_t observation_width() const override { return 1; }
  std::string name() const override { return "symmetric_mixture"; }
  double log_lik(std::span<const double> x,
                 const ParameterVector& theta) const override;
  bool has_gradient() const override { return true; }
  double log_lik_grad(std::span<const double> x, const ParameterVector& theta,
                      std::span<double> grad) const override;

 private:
  std::size_t d_;
};

/// Binary logistic regression. Observation records hold p raw features
/// followed by a 0/1 label; the model appends a bias feature of 1, so the
/// parameter dimension is p + 1 (weights then bias).
/// Prior is uniform by default; a Gaussian N(0, prior_variance) prior is
/// enabled by passing a positive finite variance.
class LogisticRegressionModel : public Model {
 public:
  explicit LogisticRegressionModel(std::size_t features,
                                   double prior_variance = 0.0);

  std::size_t dim() const override { return p_ + 1; }
  std::size_t observation_width() const override { return p_ + 1; }
  std::string name() const override { return "logistic"; }
  double log_lik(std::span<const double> x,
                 const ParameterVector& theta) const override;
  bool has_gradient() const override { return true; }
  double log_lik_grad(std::span<const double> x, const ParameterVector& theta,
                      std::span<double> grad) const override;
  double log_prior(const ParameterVector& theta) const override;
  void log_prior_grad(const ParameterVector& theta,
                      std::span<double> grad) const override;
  void validate_observation(std::span<const double> x) const override;

  std::size_t features() const { return p_; }

  /// P(y = 1 | x, theta) for one record (label entry ignored).
  double predict_probability(std::span<const double> x,
                             const ParameterVector& theta) const;

 private:
  std::size_t p_;
  double prior_variance_;  // <= 0 or infinite means uniform
};

enum class ModelKind { kTiedMeans, kSymmetricMixture, kLogistic };

ModelKind model_kind_from_string(const std::string& kind);
std::string to_string(ModelKind kind);

/// n i.i.d. draws from the model at theta_star; deterministic given seed.
Dataset generate_data(const Model& model, const ParameterVector& theta_star,
                      std::size_t n, std::uint64_t seed);

/// The catalogued posterior modes implied by the model's symmetry at
/// theta_star. Logistic regression is log-concave and returns an empty list.
std::vector<ParameterVector> true_modes(const Model& model,
                                        const ParameterVector& theta_star);

/// CSV column names for the model's observation records.
std::vector<std::string> csv_columns(const Model& model);

}  // namespace mintmc

#endif  // MINTMC_MODELS_HPP
