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

#ifndef MINTMC_DIAGNOSTICS_HPP
#define MINTMC_DIAGNOSTICS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "mintmc/mintee.hpp"
#include "mintmc/model.hpp"
#include "mintmc/rng.hpp"
#include "mintmc/sample_run.hpp"
#include "mintmc/types.hpp"

namespace mintmc {

/// Ratio of empirical masses of two spherical mode neighborhoods. Returns
/// +infinity when the denominator count is zero.
double mode_ratio(const SampleRun& run, const ParameterVector& mode_a,
                  const ParameterVector& mode_b, double radius);

struct ModeOccupancy {
  std::vector<double> fractions;  // per mode, sums to 1 under nearest-mode
  double unassigned = 0.0;        // only nonzero when a radius is given
};

/// Fraction of samples assigned to each mode by the nearest-mode rule. With
/// `radius` set, samples farther than radius from every mode are reported as
/// unassigned instead.
ModeOccupancy mode_occupancy(const SampleRun& run,
                             const std::vector<ParameterVector>& modes,
                             std::optional<double> radius = std::nullopt);

/// First post-initialization iteration whose theta lies within radius of the
/// mode (0-based index into the recorded trace), or nullopt if never.
std::optional<std::size_t> hitting_time(const SampleRun& run,
                                        const ParameterVector& mode,
                                        double radius);

/// Moments of the t = sqrt(m)(mu_hat - mu) sample and a KS distance against
/// a normal with matched mean and sd.
struct NormalityReport {
  double mean = 0.0;
  double sd = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_distance = 0.0;
  bool degenerate = false;  // m = n: every t is exactly zero
  std::size_t draws = 0;
  std::size_t batch_size = 0;
  double finite_population_factor = 1.0;
};

NormalityReport normality_report(const Model& model, const Dataset& data,
                                 const ParameterVector& theta, std::size_t m,
                                 std::size_t draws, RngStream& rng,
                                 EvalCounters& evals);

struct AcceptanceStats {
  double acceptance_rate = 0.0;
  double mean_accepted_step = 0.0;
  bool step_defined = false;  // false when no move was accepted
};

AcceptanceStats acceptance_and_step_stats(const SampleRun& run);

/// Per-chain percentage of samples in each energy ring.
struct RingTable {
  std::vector<double> temperatures;          // T_k per chain
  std::vector<std::size_t> batch_sizes;      // m_k per chain
  std::vector<std::vector<double>> percent;  // [chain][ring], rows sum to 100
};

RingTable ring_table(const MinteeRun& run);

/// Posterior-mean-probability test accuracy of a logistic sample run:
/// predicted probabilities are averaged over every `thin`-th sample and
/// thresholded at 0.5.
double test_accuracy(const SampleRun& run, const Model& model,
                     const Dataset& test_data, std::size_t thin = 10);

/// A 1-d density known on a grid, used as the stationary-law oracle.
struct GridDensity {
  std::vector<double> theta;        // strictly increasing grid
  std::vector<double> log_density;  // unnormalized
};

/// Kolmogorov-Smirnov distance between the empirical CDF of scalar samples
/// and the normalized grid CDF (trapezoid rule, piecewise-linear CDF).
double ks_against_grid(const std::vector<double>& samples_1d,
                       const GridDensity& grid);

/// Inverse-CDF draws from the grid density itself (oracle self-check).
std::vector<double> sample_from_grid(const GridDensity& grid,
                                     std::size_t count, RngStream& rng);

/// Rescales a mode-neighborhood radius quoted at n = 10^6 by
/// sqrt(10^6 / n), so the ball keeps its posterior mass as the posterior
/// width grows at smaller n.
double scaled_mode_radius(double reference_radius, std::size_t n);

}  // namespace mintmc

#endif  // MINTMC_DIAGNOSTICS_HPP
