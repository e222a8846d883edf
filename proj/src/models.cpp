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

#include "mintmc/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mintmc {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

double log_normal_density(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * (kLogTwoPi + std::log(variance)) - d * d / (2.0 * variance);
}

// log(1 + e^z) without overflow.
double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

// ---------------------------------------------------------------------------
// TiedMeansMixture

TiedMeansMixture::TiedMeansMixture(double sigma1_sq, double sigma2_sq,
                                   double sigmax_sq)
    : sigma1_sq_(sigma1_sq), sigma2_sq_(sigma2_sq), sigmax_sq_(sigmax_sq) {
  if (!(sigma1_sq > 0 && sigma2_sq > 0 && sigmax_sq > 0))
    throw_config("tied-means variances must be positive");
}

double TiedMeansMixture::log_lik(std::span<const double> x,
                                 const ParameterVector& theta) const {
  const double a = log_normal_density(x[0], theta[0], sigmax_sq_);
  const double b = log_normal_density(x[0], theta[0] + theta[1], sigmax_sq_);
  const double hi = std::max(a, b);
  // log(0.5 e^a + 0.5 e^b)
  return hi + std::log(0.5 * std::exp(a - hi) + 0.5 * std::exp(b - hi));
}

double TiedMeansMixture::log_lik_grad(std::span<const double> x,
                                      const ParameterVector& theta,
                                      std::span<double> grad) const {
  const double a = log_normal_density(x[0], theta[0], sigmax_sq_);
  const double b = log_normal_density(x[0], theta[0] + theta[1], sigmax_sq_);
  const double hi = std::max(a, b);
  const double wa = std::exp(a - hi);
  const double wb = std::exp(b - hi);
  const double l = hi + std::log(0.5 * (wa + wb));
  const double pa = wa / (wa + wb);
  const double pb = 1.0 - pa;
  const double ra = (x[0] - theta[0]) / sigmax_sq_;
  const double rb = (x[0] - theta[0] - theta[1]) / sigmax_sq_;
  grad[0] = pa * ra + pb * rb;
  grad[1] = pb * rb;
  return l;
}

double TiedMeansMixture::log_prior(const ParameterVector& theta) const {
  return log_normal_density(theta[0], 0.0, sigma1_sq_) +
         log_normal_density(theta[1], 0.0, sigma2_sq_);
}

void TiedMeansMixture::log_prior_grad(const ParameterVector& theta,
                                      std::span<double> grad) const {
  grad[0] = -theta[0] / sigma1_sq_;
  grad[1] = -theta[1] / sigma2_sq_;
}

// ---------------------------------------------------------------------------
// SymmetricMixture

SymmetricMixture::SymmetricMixture(std::size_t d) : d_(d) {
  if (d == 0) throw_config("symmetric mixture needs at least one component");
}

double SymmetricMixture::log_lik(std::span<const double> x,
                                 const ParameterVector& theta) const {
  // The exponents -0.5 (x - theta_j)^2 are never positive, so the direct sum
  // cannot overflow; it can only underflow when every component is 38+ sigma
  // away, and only then is the max-shifted form needed.
  const double xv = x[0];
  double sum = 0.0;
  for (std::size_t j = 0; j < d_; ++j) {
    const double dj = xv - theta[j];
    sum += std::exp(-0.5 * dj * dj);
  }
  if (sum > 0.0)
    return std::log(sum) - std::log(static_cast<double>(d_)) -
           0.5 * kLogTwoPi;
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < d_; ++j) {
    const double dj = xv - theta[j];
    hi = std::max(hi, -0.5 * dj * dj);
  }
  for (std::size_t j = 0; j < d_; ++j) {
    const double dj = xv - theta[j];
    sum += std::exp(-0.5 * dj * dj - hi);
  }
  return hi + std::log(sum) - std::log(static_cast<double>(d_)) -
         0.5 * kLogTwoPi;
}

double SymmetricMixture::log_lik_grad(std::span<const double> x,
                                      const ParameterVector& theta,
                                      std::span<double> grad) const {
  const double xv = x[0];
  double sum = 0.0;
  for (std::size_t j = 0; j < d_; ++j) {
    const double dj = xv - theta[j];
    const double w = std::exp(-0.5 * dj * dj);
    grad[j] = w;  // reused below once the normalizer is known
    sum += w;
  }
  if (sum <= 0.0) {
    // Extreme tail: recompute shifted. Weights below are exact either way.
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < d_; ++j) {
      const double dj = xv - theta[j];
      hi = std::max(hi, -0.5 * dj * dj);
    }
    for (std::size_t j = 0; j < d_; ++j) {
      const double dj = xv - theta[j];
      grad[j] = std::exp(-0.5 * dj * dj - hi);
      sum += grad[j];
    }
    for (std::size_t j = 0; j < d_; ++j)
      grad[j] = (grad[j] / sum) * (xv - theta[j]);
    return hi + std::log(sum) - std::log(static_cast<double>(d_)) -
           0.5 * kLogTwoPi;
  }
  for (std::size_t j = 0; j < d_; ++j)
    grad[j] = (grad[j] / sum) * (xv - theta[j]);
  return std::log(sum) - std::log(static_cast<double>(d_)) - 0.5 * kLogTwoPi;
}

// ---------------------------------------------------------------------------
// LogisticRegressionModel

LogisticRegressionModel::LogisticRegressionModel(std::size_t features,
                                                 double prior_variance)
    : p_(features), prior_variance_(prior_variance) {
  if (features == 0) throw_config("logistic model needs at least one feature");
}

double LogisticRegressionModel::log_lik(std::span<const double> x,
                                        const ParameterVector& theta) const {
  double z = theta[p_];  // bias
  for (std::size_t j = 0; j < p_; ++j) z += theta[j] * x[j];
  const double y = x[p_];
  // y z - log(1 + e^z) for y in {0, 1}
  return y * z - softplus(z);
}

double LogisticRegressionModel::log_lik_grad(std::span<const double> x,
                                             const ParameterVector& theta,
                                             std::span<double> grad) const {
  double z = theta[p_];
  for (std::size_t j = 0; j < p_; ++j) z += theta[j] * x[j];
  const double y = x[p_];
  const double resid = y - sigmoid(z);
  for (std::size_t j = 0; j < p_; ++j) grad[j] = resid * x[j];
  grad[p_] = resid;
  return y * z - softplus(z);
}

double LogisticRegressionModel::log_prior(const ParameterVector& theta) const {
  if (!(prior_variance_ > 0.0) || !std::isfinite(prior_variance_)) return 0.0;
  double lp = 0.0;
  for (const double v : theta)
    lp += log_normal_density(v, 0.0, prior_variance_);
  return lp;
}

void LogisticRegressionModel::log_prior_grad(const ParameterVector& theta,
                                             std::span<double> grad) const {
  if (!(prior_variance_ > 0.0) || !std::isfinite(prior_variance_)) {
    for (auto& g : grad) g = 0.0;
    return;
  }
  for (std::size_t j = 0; j < theta.size(); ++j)
    grad[j] = -theta[j] / prior_variance_;
}

void LogisticRegressionModel::validate_observation(
    std::span<const double> x) const {
  const double y = x[p_];
  if (y != 0.0 && y != 1.0)
    throw_data("logistic label must be 0 or 1, got " + std::to_string(y));
  for (std::size_t j = 0; j < p_; ++j)
    if (!std::isfinite(x[j])) throw_data("non-finite logistic feature");
}

double LogisticRegressionModel::predict_probability(
    std::span<const double> x, const ParameterVector& theta) const {
  double z = theta[p_];
  for (std::size_t j = 0; j < p_; ++j) z += theta[j] * x[j];
  return sigmoid(z);
}

// ---------------------------------------------------------------------------
// Generators and catalogues

ModelKind model_kind_from_string(const std::string& kind) {
  if (kind == "tied_means") return ModelKind::kTiedMeans;
  if (kind == "symmetric_mixture") return ModelKind::kSymmetricMixture;
  if (kind == "logistic") return ModelKind::kLogistic;
  throw_config("unknown model kind '" + kind + "'");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kTiedMeans: return "tied_means";
    case ModelKind::kSymmetricMixture: return "symmetric_mixture";
    case ModelKind::kLogistic: return "logistic";
  }
  throw_config("unreachable model kind");
}

Dataset generate_data(const Model& model, const ParameterVector& theta_star,
                      std::size_t n, std::uint64_t seed) {
  model.check_theta(theta_star);
  if (n == 0) throw_config("cannot generate an empty dataset");
  RngStream rng(seed, streams::kDataGen);
  std::vector<double> values;
  values.reserve(n * model.observation_width());

  if (const auto* tied = dynamic_cast<const TiedMeansMixture*>(&model)) {
    const double sd = std::sqrt(tied->sigmax_sq());
    for (std::size_t i = 0; i < n; ++i) {
      const double mean = rng.next_double() < 0.5
                              ? theta_star[0]
                              : theta_star[0] + theta_star[1];
      values.push_back(mean + sd * rng.next_normal());
    }
    return Dataset(std::move(values), 1);
  }
  if (dynamic_cast<const SymmetricMixture*>(&model) != nullptr) {
    const std::size_t d = model.dim();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = static_cast<std::size_t>(rng.next_below(d));
      values.push_back(theta_star[j] + rng.next_normal());
    }
    return Dataset(std::move(values), 1);
  }
  if (const auto* logit =
          dynamic_cast<const LogisticRegressionModel*>(&model)) {
    const std::size_t p = logit->features();
    std::vector<double> row(p + 1);
    ParameterVector dummy;
    for (std::size_t i = 0; i < n; ++i) {
      double z = theta_star[p];
      for (std::size_t j = 0; j < p; ++j) {
        row[j] = rng.next_normal();
        z += theta_star[j] * row[j];
      }
      row[p] = rng.next_double() < sigmoid(z) ? 1.0 : 0.0;
      values.insert(values.end(), row.begin(), row.end());
    }
    return Dataset(std::move(values), p + 1);
  }
  throw_config("no generator for model '" + model.name() + "'");
}

std::vector<ParameterVector> true_modes(const Model& model,
                                        const ParameterVector& theta_star) {
  model.check_theta(theta_star);
  if (dynamic_cast<const TiedMeansMixture*>(&model) != nullptr) {
    // Swapping the two component means keeps the likelihood: (a, b) and
    // (a + b, -b).
    return {theta_star,
            {theta_star[0] + theta_star[1], -theta_star[1]}};
  }
  if (dynamic_cast<const SymmetricMixture*>(&model) != nullptr) {
    const std::size_t d = model.dim();
    // Catalogue the distinct coordinate permutations for the
    // one-component-off pattern (c, v, v, ..., v); the general case has d!
    // permutations and no catalogue.
    if (d == 1) return {theta_star};
    std::vector<double> sorted(theta_star);
    std::sort(sorted.begin(), sorted.end());
    const double v = sorted[0] == sorted[1] ? sorted[0] : sorted[d - 1];
    std::size_t odd_count = 0;
    double c = v;
    for (const double t : theta_star)
      if (t != v) {
        c = t;
        ++odd_count;
      }
    if (odd_count == 0) return {theta_star};
    if (odd_count != 1)
      throw_config(
          "mode catalogue needs a theta_star with at most one distinct "
          "component");
    std::vector<ParameterVector> modes;
    modes.reserve(d);
    for (std::size_t j = 0; j < d; ++j) {
      ParameterVector mode(d, v);
      mode[j] = c;
      modes.push_back(std::move(mode));
    }
    return modes;
  }
  // Log-concave likelihood: unimodal, nothing to catalogue.
  return {};
}

std::vector<std::string> csv_columns(const Model& model) {
  if (const auto* logit =
          dynamic_cast<const LogisticRegressionModel*>(&model)) {
    std::vector<std::string> cols;
    for (std::size_t j = 0; j < logit->features(); ++j)
      cols.push_back("x_" + std::to_string(j));
    cols.push_back("label");
    return cols;
  }
  return {"x"};
}

}  // namespace mintmc
