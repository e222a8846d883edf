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

#include "mintmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mintmc/core.hpp"
#include "mintmc/models.hpp"

namespace mintmc {

namespace {

double sq_distance(std::span<const double> a, const ParameterVector& b) {
  double ss = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double d = a[i] - b[i];
    ss += d * d;
  }
  return ss;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Normalized CDF of a grid density at the grid points, trapezoid rule.
std::vector<double> grid_cdf(const GridDensity& grid) {
  const std::size_t g = grid.theta.size();
  if (g < 2 || grid.log_density.size() != g)
    throw_config("grid density needs matching theta/log_density arrays with "
                 "at least two points");
  double hi = -std::numeric_limits<double>::infinity();
  for (const double ld : grid.log_density) {
    if (!std::isfinite(ld) && ld > 0)
      throw_numeric("non-finite grid log density");
    hi = std::max(hi, ld);
  }
  if (!std::isfinite(hi)) throw_numeric("grid density is identically zero");
  std::vector<double> dens(g);
  for (std::size_t i = 0; i < g; ++i) {
    if (std::isnan(grid.log_density[i]))
      throw_numeric("NaN grid log density");
    dens[i] = std::exp(grid.log_density[i] - hi);
  }
  std::vector<double> cdf(g, 0.0);
  for (std::size_t i = 1; i < g; ++i) {
    const double dx = grid.theta[i] - grid.theta[i - 1];
    if (!(dx > 0)) throw_config("grid theta values must strictly increase");
    cdf[i] = cdf[i - 1] + 0.5 * (dens[i] + dens[i - 1]) * dx;
  }
  const double total = cdf.back();
  if (!(total > 0)) throw_numeric("grid density has zero mass");
  for (auto& c : cdf) c /= total;
  return cdf;
}

double eval_grid_cdf(const GridDensity& grid, const std::vector<double>& cdf,
                     double x) {
  if (x <= grid.theta.front()) return 0.0;
  if (x >= grid.theta.back()) return 1.0;
  const auto it =
      std::upper_bound(grid.theta.begin(), grid.theta.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - grid.theta.begin());
  const double t0 = grid.theta[i - 1], t1 = grid.theta[i];
  const double w = (x - t0) / (t1 - t0);
  return cdf[i - 1] + w * (cdf[i] - cdf[i - 1]);
}

}  // namespace

double mode_ratio(const SampleRun& run, const ParameterVector& mode_a,
                  const ParameterVector& mode_b, double radius) {
  if (!(radius > 0)) throw_config("mode_ratio needs a positive radius");
  const double r_sq = radius * radius;
  std::size_t count_a = 0, count_b = 0;
  for (std::size_t i = 0; i < run.count(); ++i) {
    const auto s = run.sample(i);
    if (sq_distance(s, mode_a) <= r_sq) ++count_a;
    if (sq_distance(s, mode_b) <= r_sq) ++count_b;
  }
  if (count_b == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(count_a) / static_cast<double>(count_b);
}

ModeOccupancy mode_occupancy(const SampleRun& run,
                             const std::vector<ParameterVector>& modes,
                             std::optional<double> radius) {
  if (modes.empty()) throw_config("mode_occupancy needs at least one mode");
  ModeOccupancy occ;
  occ.fractions.assign(modes.size(), 0.0);
  std::size_t unassigned = 0;
  const double r_sq = radius ? *radius * *radius
                             : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < run.count(); ++i) {
    const auto s = run.sample(i);
    std::size_t best = 0;
    double best_sq = sq_distance(s, modes[0]);
    for (std::size_t j = 1; j < modes.size(); ++j) {
      const double d = sq_distance(s, modes[j]);
      if (d < best_sq) {
        best_sq = d;
        best = j;
      }
    }
    if (best_sq <= r_sq)
      occ.fractions[best] += 1.0;
    else
      ++unassigned;
  }
  const double total = static_cast<double>(run.count());
  if (total > 0) {
    for (auto& f : occ.fractions) f /= total;
    occ.unassigned = static_cast<double>(unassigned) / total;
  }
  return occ;
}

std::optional<std::size_t> hitting_time(const SampleRun& run,
                                        const ParameterVector& mode,
                                        double radius) {
  if (!(radius > 0)) throw_config("hitting_time needs a positive radius");
  const double r_sq = radius * radius;
  for (std::size_t i = 0; i < run.count(); ++i)
    if (sq_distance(run.sample(i), mode) <= r_sq) return i;
  return std::nullopt;
}

NormalityReport normality_report(const Model& model, const Dataset& data,
                                 const ParameterVector& theta, std::size_t m,
                                 std::size_t draws, RngStream& rng,
                                 EvalCounters& evals) {
  if (draws < 100)
    throw_config("normality_report needs at least 100 draws");
  const std::size_t n = data.size();
  NormalityReport rep;
  rep.draws = draws;
  rep.batch_size = m;
  rep.finite_population_factor = finite_population_factor(n, m);

  // mu is fixed across draws; only mu_hat is resampled.
  const double mu = full_mean_loglik(model, data, theta, evals);
  const double root_m = std::sqrt(static_cast<double>(m));
  std::vector<double> ts(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    const MiniBatch batch = sample_batch(n, m, rng);
    ts[i] = root_m * (mu_hat(model, data, batch, theta, evals) - mu);
  }

  double mean = 0.0;
  for (const double t : ts) mean += t;
  mean /= static_cast<double>(draws);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (const double t : ts) {
    const double d = t - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= static_cast<double>(draws);
  m3 /= static_cast<double>(draws);
  m4 /= static_cast<double>(draws);
  rep.mean = mean;
  rep.sd = std::sqrt(m2);
  if (m2 <= 0.0) {
    rep.degenerate = true;  // m = n: the estimator coincides with the mean
    return rep;
  }
  rep.skewness = m3 / (m2 * std::sqrt(m2));
  rep.excess_kurtosis = m4 / (m2 * m2) - 3.0;

  // One-sample KS against N(mean, sd).
  std::sort(ts.begin(), ts.end());
  double ks = 0.0;
  const double inv = 1.0 / static_cast<double>(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    const double f = normal_cdf((ts[i] - mean) / rep.sd);
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) * inv - f));
    ks = std::max(ks, std::abs(f - static_cast<double>(i) * inv));
  }
  rep.ks_distance = ks;
  return rep;
}

AcceptanceStats acceptance_and_step_stats(const SampleRun& run) {
  if (run.accepted.empty())
    throw_config("acceptance stats need a non-empty run");
  AcceptanceStats stats;
  std::size_t accepted = 0;
  double step_sum = 0.0;
  for (std::size_t i = 0; i < run.accepted.size(); ++i) {
    if (run.accepted[i]) {
      ++accepted;
      step_sum += run.accepted_step[i];
    }
  }
  stats.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(run.accepted.size());
  if (accepted > 0) {
    stats.mean_accepted_step = step_sum / static_cast<double>(accepted);
    stats.step_defined = true;
  }
  return stats;
}

RingTable ring_table(const MinteeRun& run) {
  RingTable table;
  for (const auto& chain : run.chains) {
    table.temperatures.push_back(chain.temperature);
    table.batch_sizes.push_back(chain.batch_size);
    std::uint64_t total = 0;
    for (const auto c : chain.ring_counts) total += c;
    std::vector<double> row(chain.ring_counts.size(), 0.0);
    if (total > 0)
      for (std::size_t j = 0; j < row.size(); ++j)
        row[j] = 100.0 * static_cast<double>(chain.ring_counts[j]) /
                 static_cast<double>(total);
    table.percent.push_back(std::move(row));
  }
  return table;
}

double test_accuracy(const SampleRun& run, const Model& model,
                     const Dataset& test_data, std::size_t thin) {
  const auto* logit = dynamic_cast<const LogisticRegressionModel*>(&model);
  if (logit == nullptr)
    throw_config("test_accuracy is defined for the logistic model");
  logit->check_dataset(test_data);
  if (thin == 0) thin = 1;
  if (run.count() == 0) throw_config("test_accuracy needs samples");

  std::vector<double> prob(test_data.size(), 0.0);
  std::size_t used = 0;
  ParameterVector theta(run.dim);
  for (std::size_t i = 0; i < run.count(); i += thin) {
    const auto s = run.sample(i);
    theta.assign(s.begin(), s.end());
    for (std::size_t r = 0; r < test_data.size(); ++r)
      prob[r] += logit->predict_probability(test_data.row(r), theta);
    ++used;
  }
  std::size_t correct = 0;
  for (std::size_t r = 0; r < test_data.size(); ++r) {
    const double p = prob[r] / static_cast<double>(used);
    const double label = test_data.row(r)[logit->features()];
    if ((p > 0.5 ? 1.0 : 0.0) == label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test_data.size());
}

double ks_against_grid(const std::vector<double>& samples_1d,
                       const GridDensity& grid) {
  if (samples_1d.empty()) throw_config("KS needs samples");
  const std::vector<double> cdf = grid_cdf(grid);
  std::vector<double> sorted(samples_1d);
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  const double inv = 1.0 / static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = eval_grid_cdf(grid, cdf, sorted[i]);
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) * inv - f));
    ks = std::max(ks, std::abs(f - static_cast<double>(i) * inv));
  }
  return ks;
}

std::vector<double> sample_from_grid(const GridDensity& grid,
                                     std::size_t count, RngStream& rng) {
  const std::vector<double> cdf = grid_cdf(grid);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = rng.next_double();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.begin()) {
      out[i] = grid.theta.front();
      continue;
    }
    if (it == cdf.end()) {
      out[i] = grid.theta.back();
      continue;
    }
    const std::size_t j = static_cast<std::size_t>(it - cdf.begin());
    const double c0 = cdf[j - 1], c1 = cdf[j];
    const double w = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
    out[i] = grid.theta[j - 1] + w * (grid.theta[j] - grid.theta[j - 1]);
  }
  return out;
}

double scaled_mode_radius(double reference_radius, std::size_t n) {
  return reference_radius * std::sqrt(1e6 / static_cast<double>(n));
}

}  // namespace mintmc
