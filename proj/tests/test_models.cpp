#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "mintmc/core.hpp"
#include "mintmc/models.hpp"

using namespace mintmc;

namespace {

// Central finite differences of the per-point log likelihood.
void check_gradient(const Model& model, std::span<const double> x,
                    const ParameterVector& theta) {
  const double h = 1e-5;
  std::vector<double> grad(model.dim());
  model.log_lik_grad(x, theta, grad);
  for (std::size_t j = 0; j < model.dim(); ++j) {
    ParameterVector lo = theta, hi = theta;
    lo[j] -= h;
    hi[j] += h;
    const double fd = (model.log_lik(x, hi) - model.log_lik(x, lo)) / (2 * h);
    const double tol = 1e-4 * std::max(1.0, std::abs(fd));
    CHECK(std::abs(grad[j] - fd) < tol);
  }
}

}  // namespace

TEST_CASE("gradients match central finite differences (all models)") {
  RngStream rng(123, 0);
  TiedMeansMixture tied;
  SymmetricMixture mixture(5);
  LogisticRegressionModel logistic(3, 4.0);  // exercise the Gaussian prior

  for (int trial = 0; trial < 100; ++trial) {
    {
      const std::vector<double> x = {3.0 * rng.next_normal()};
      const ParameterVector theta = {2.0 * rng.next_normal(),
                                     2.0 * rng.next_normal()};
      check_gradient(tied, x, theta);
    }
    {
      const std::vector<double> x = {3.0 * rng.next_normal()};
      ParameterVector theta(5);
      for (auto& t : theta) t = 2.0 * rng.next_normal();
      check_gradient(mixture, x, theta);
    }
    {
      std::vector<double> x(4);
      for (int j = 0; j < 3; ++j) x[j] = rng.next_normal();
      x[3] = rng.next_double() < 0.5 ? 0.0 : 1.0;
      ParameterVector theta(4);
      for (auto& t : theta) t = rng.next_normal();
      check_gradient(logistic, x, theta);
    }
  }
}

TEST_CASE("prior gradients match finite differences of the log prior") {
  TiedMeansMixture tied;
  LogisticRegressionModel logistic(2, 9.0);
  RngStream rng(5, 1);
  for (int trial = 0; trial < 20; ++trial) {
    for (const Model* model :
         std::initializer_list<const Model*>{&tied, &logistic}) {
      ParameterVector theta(model->dim());
      for (auto& t : theta) t = 2.0 * rng.next_normal();
      std::vector<double> grad(model->dim());
      model->log_prior_grad(theta, grad);
      for (std::size_t j = 0; j < model->dim(); ++j) {
        ParameterVector lo = theta, hi = theta;
        lo[j] -= 1e-5;
        hi[j] += 1e-5;
        const double fd =
            (model->log_prior(hi) - model->log_prior(lo)) / 2e-5;
        CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("tied-means generator hits the mixture mean") {
  TiedMeansMixture model;
  const std::size_t n = 1000000;
  const Dataset data = generate_data(model, {0.0, 1.0}, n, 42);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += data.row(i)[0];
  const double mean = sum / static_cast<double>(n);
  // Mixture mean 0.5; per-point variance sigma_x^2 + 1/4 = 2.25.
  const double se = std::sqrt(2.25 / static_cast<double>(n));
  CHECK(std::abs(mean - 0.5) < 3 * se);
}

TEST_CASE("symmetric-mixture draws have Gaussian tails") {
  SymmetricMixture model(10);
  ParameterVector theta_star(10, 0.0);
  theta_star[0] = 2.0;
  const Dataset data = generate_data(model, theta_star, 100000, 7);
  std::size_t beyond = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(std::abs(data.row(i)[0]) < 8.0);
    if (std::abs(data.row(i)[0]) > 5.0) ++beyond;
  }
  CHECK(beyond < 100);  // ~0.1% of the mass sits past 5 under any component
}

TEST_CASE("logistic labels follow Bernoulli(sigmoid(theta* x))") {
  const std::size_t p = 3;
  LogisticRegressionModel model(p);
  const ParameterVector theta_star = {1.0, -0.5, 0.25, 0.3};
  const std::size_t n = 100000;
  const Dataset data = generate_data(model, theta_star, n, 11);

  double positive = 0.0;
  for (std::size_t i = 0; i < n; ++i) positive += data.row(i)[p];
  positive /= static_cast<double>(n);

  // Quadrature oracle: z ~ N(bias, |w|^2), positive rate = E sigmoid(z),
  // integrated by Simpson's rule over +-10 sd.
  const double w_norm_sq = 1.0 + 0.25 + 0.0625;
  const double sd = std::sqrt(w_norm_sq);
  const double mean = 0.3;
  const int segments = 4000;
  const double lo = mean - 10 * sd, hi = mean + 10 * sd;
  const double step = (hi - lo) / segments;
  double integral = 0.0;
  for (int i = 0; i <= segments; ++i) {
    const double z = lo + i * step;
    const double weight =
        (i == 0 || i == segments) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const double gauss = std::exp(-(z - mean) * (z - mean) / (2 * sd * sd)) /
                         (sd * std::sqrt(2 * std::acos(-1.0)));
    integral += weight * gauss / (1.0 + std::exp(-z));
  }
  integral *= step / 3.0;

  const double se = std::sqrt(integral * (1 - integral) /
                              static_cast<double>(n));
  CHECK(std::abs(positive - integral) < 3 * se);
}

TEST_CASE("mode catalogues") {
  SUBCASE("tied means lists the generating point and its reflection") {
    TiedMeansMixture model;
    const auto modes = true_modes(model, {0.0, 1.0});
    REQUIRE(modes.size() == 2);
    CHECK(modes[0] == ParameterVector{0.0, 1.0});
    CHECK(modes[1] == ParameterVector{1.0, -1.0});
  }
  SUBCASE("symmetric mixture d=3 lists the coordinate placements") {
    SymmetricMixture model(3);
    const auto modes = true_modes(model, {2.0, 0.0, 0.0});
    REQUIRE(modes.size() == 3);
    CHECK(modes[0] == ParameterVector{2.0, 0.0, 0.0});
    CHECK(modes[1] == ParameterVector{0.0, 2.0, 0.0});
    CHECK(modes[2] == ParameterVector{0.0, 0.0, 2.0});
  }
  SUBCASE("logistic regression is unimodal") {
    LogisticRegressionModel model(4);
    CHECK(true_modes(model, ParameterVector(5, 0.1)).empty());
  }
}

TEST_CASE("catalogued modes are near-stationary points of the posterior") {
  SUBCASE("tied means") {
    TiedMeansMixture model;
    const std::size_t n = 4000000;
    const Dataset data = generate_data(model, {0.0, 1.0}, n, 2027);
    for (const auto& mode : true_modes(model, {0.0, 1.0})) {
      std::vector<double> grad_sum, prior_grad(2);
      EvalCounters evals;
      full_mean_loglik_with_grad(model, data, mode, grad_sum, evals);
      model.log_prior_grad(mode, prior_grad);
      double norm_sq = 0.0;
      for (std::size_t j = 0; j < 2; ++j) {
        const double g = grad_sum[j] + prior_grad[j];
        norm_sq += g * g;
      }
      CHECK(std::sqrt(norm_sq) < 1e-3 * static_cast<double>(n));
    }
  }
  SUBCASE("symmetric mixture d=10") {
    SymmetricMixture model(10);
    ParameterVector theta_star(10, 0.0);
    theta_star[0] = 2.0;
    const std::size_t n = 1000000;
    const Dataset data = generate_data(model, theta_star, n, 515);
    for (const auto& mode : true_modes(model, theta_star)) {
      std::vector<double> grad_sum;
      EvalCounters evals;
      full_mean_loglik_with_grad(model, data, mode, grad_sum, evals);
      double norm_sq = 0.0;
      for (const double g : grad_sum) norm_sq += g * g;
      CHECK(std::sqrt(norm_sq) < 1e-3 * static_cast<double>(n));
    }
  }
}

TEST_CASE("permuting symmetric-mixture coordinates leaves mu invariant") {
  SymmetricMixture model(6);
  const Dataset data =
      generate_data(model, {2.0, 0.0, 0.0, 0.0, 0.0, 0.0}, 500, 23);
  RngStream rng(8, 0);
  EvalCounters evals;
  for (int trial = 0; trial < 100; ++trial) {
    ParameterVector theta(6);
    for (auto& t : theta) t = rng.next_normal();
    const double mu = full_mean_loglik(model, data, theta, evals);
    ParameterVector perm = theta;
    for (std::size_t j = 5; j > 0; --j)
      std::swap(perm[j],
                perm[static_cast<std::size_t>(rng.next_below(j + 1))]);
    const double mu_perm = full_mean_loglik(model, data, perm, evals);
    CHECK(mu_perm == doctest::Approx(mu).epsilon(1e-13));
  }
}

TEST_CASE("tied-means posterior ratio between the mode pair is the prior "
          "ratio") {
  // The two modes carry identical likelihood per point (the mixture is the
  // swap of its own components), so the posterior ratio reduces to the
  // prior ratio exp(-(0)/20 - 1/2) / exp(-(1)/20 - 1/2) = exp(1/20 - 1/20...)
  TiedMeansMixture model;
  const Dataset data = generate_data(model, {0.0, 1.0}, 10000, 77);
  EvalCounters evals;
  const double lp_a = log_posterior_tempered(model, data, {0.0, 1.0}, 1.0,
                                             evals);
  const double lp_b = log_posterior_tempered(model, data, {1.0, -1.0}, 1.0,
                                             evals);
  const double prior_diff = model.log_prior({0.0, 1.0}) -
                            model.log_prior({1.0, -1.0});
  CHECK(lp_a - lp_b == doctest::Approx(prior_diff).epsilon(1e-9));
  CHECK(prior_diff == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("generator rejects mismatched inputs") {
  SymmetricMixture model(3);
  CHECK_THROWS_AS(generate_data(model, {2.0, 0.0}, 10, 1), Error);
  CHECK_THROWS_AS(generate_data(model, {2.0, 0.0, 0.0}, 0, 1), Error);
  CHECK_THROWS_AS(model_kind_from_string("unknown"), Error);
}
