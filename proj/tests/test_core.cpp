#include <cmath>
#include <vector>

#include "doctest.h"
#include "mintmc/core.hpp"
#include "mintmc/models.hpp"

using namespace mintmc;

namespace {

// Minimal model whose log likelihood is the observation itself; lets tests
// inject non-finite values and check counters without distributional noise.
class PassthroughModel : public Model {
 public:
  std::size_t dim() const override { return 1; }
  std::size_t observation_width() const override { return 1; }
  std::string name() const override { return "passthrough"; }
  double log_lik(std::span<const double> x,
                 const ParameterVector&) const override {
    return x[0];
  }
};

}  // namespace

TEST_CASE("single-point mean is the point's log likelihood") {
  PassthroughModel model;
  Dataset data({-1.25}, 1);
  EvalCounters evals;
  CHECK(full_mean_loglik(model, data, {0.0}, evals) == -1.25);
  CHECK(evals.loglik == 1);
}

TEST_CASE("tied-means mean log likelihood matches a scalar hand evaluation") {
  TiedMeansMixture model;
  Dataset data({0.0, 1.0}, 1);
  EvalCounters evals;
  const double mu = full_mean_loglik(model, data, {0.0, 1.0}, evals);

  // Hand oracle: l(x) = log(0.5 N(x; 0, 2) + 0.5 N(x; 1, 2)), averaged over
  // x in {0, 1}, written out with no shared code.
  auto density = [](double x, double mean) {
    return std::exp(-(x - mean) * (x - mean) / 4.0) /
           std::sqrt(4.0 * std::acos(-1.0));
  };
  const double l0 = std::log(0.5 * density(0.0, 0.0) + 0.5 * density(0.0, 1.0));
  const double l1 = std::log(0.5 * density(1.0, 0.0) + 0.5 * density(1.0, 1.0));
  CHECK(mu == doctest::Approx(0.5 * (l0 + l1)).epsilon(1e-12));
  CHECK(evals.loglik == 2);
}

TEST_CASE("duplicating every point leaves the mean unchanged") {
  TiedMeansMixture model;
  std::vector<double> xs = {0.3, -1.0, 2.5, 0.0, 1.7};
  std::vector<double> doubled(xs);
  doubled.insert(doubled.end(), xs.begin(), xs.end());
  EvalCounters evals;
  const double mu1 =
      full_mean_loglik(model, Dataset(xs, 1), {0.2, 0.8}, evals);
  const double mu2 =
      full_mean_loglik(model, Dataset(doubled, 1), {0.2, 0.8}, evals);
  CHECK(mu2 == doctest::Approx(mu1).epsilon(1e-13));
}

TEST_CASE("non-finite log likelihood names the offending index") {
  PassthroughModel model;
  Dataset data({1.0, 2.0, -std::numeric_limits<double>::infinity()}, 1);
  EvalCounters evals;
  CHECK_THROWS_WITH_AS(full_mean_loglik(model, data, {0.0}, evals),
                       doctest::Contains("index 2"), Error);
}

TEST_CASE("evaluation counter counts one event per datum") {
  TiedMeansMixture model;
  Dataset data(std::vector<double>(37, 0.5), 1);
  EvalCounters evals;
  full_mean_loglik(model, data, {0.0, 1.0}, evals);
  CHECK(evals.loglik == 37);
  full_mean_loglik(model, data, {0.0, 1.0}, evals);
  CHECK(evals.loglik == 74);
}

TEST_CASE("tempered log posterior: identity and exact halving") {
  SymmetricMixture model(1);  // uniform prior
  Dataset data({0.1, -0.4, 0.9}, 1);
  EvalCounters evals;
  const ParameterVector theta = {0.2};
  const double lp1 = log_posterior_tempered(model, data, theta, 1.0, evals);
  const double mu = full_mean_loglik(model, data, theta, evals);
  CHECK(lp1 == 3.0 * mu);  // T = 1, uniform prior: exactly n * mu
  const double lp2 = log_posterior_tempered(model, data, theta, 2.0, evals);
  CHECK(lp2 == lp1 / 2.0);
  CHECK_THROWS_AS(log_posterior_tempered(model, data, theta, 0.5, evals),
                  Error);
}

TEST_CASE("grid posterior at temperature T matches the T=1 grid rescaled") {
  // Dense-grid normalization oracle: normalizing exp(log pi_T) on a grid
  // must equal normalizing (exp(log pi))^{1/T}.
  TiedMeansMixture model;
  const Dataset data = generate_data(model, {0.0, 1.0}, 50, 99);
  EvalCounters evals;
  const double T = 7.5;

  const int g = 41;
  std::vector<double> lp1(g), lpT(g);
  for (int i = 0; i < g; ++i) {
    const double t1 = -2.0 + 4.0 * i / (g - 1);
    const ParameterVector theta = {t1, 1.0};
    lp1[i] = log_posterior_tempered(model, data, theta, 1.0, evals);
    lpT[i] = log_posterior_tempered(model, data, theta, T, evals);
  }
  auto normalize = [](std::vector<double> logs) {
    double hi = logs[0];
    for (const double v : logs) hi = std::max(hi, v);
    double sum = 0.0;
    for (auto& v : logs) {
      v = std::exp(v - hi);
      sum += v;
    }
    for (auto& v : logs) v /= sum;
    return logs;
  };
  std::vector<double> scaled(g);
  for (int i = 0; i < g; ++i) scaled[i] = lp1[i] / T;
  const auto a = normalize(lpT);
  const auto b = normalize(scaled);
  for (int i = 0; i < g; ++i)
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-11));
}
