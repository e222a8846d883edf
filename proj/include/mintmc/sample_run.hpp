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

#ifndef MINTMC_SAMPLE_RUN_HPP
#define MINTMC_SAMPLE_RUN_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mintmc/types.hpp"

namespace mintmc {

/// Post-burn-in output of a sampler run. Samples are stored flat
/// (count * dim doubles, row-major); the per-step arrays run parallel to
/// them.
struct SampleRun {
  std::size_t dim = 0;
  std::size_t burn_in = 0;  // iterations discarded before the first sample
  std::vector<double> flat;
  std::vector<std::uint8_t> accepted;    // 1 if the step's move was accepted
  std::vector<double> proposed_step;     // ||theta' - theta|| per step
  std::vector<double> accepted_step;     // realized displacement (0 on reject)
  EvalCounters evals;
  std::uint64_t seed = 0;
  std::string config_echo;  // resolved config JSON, filled by the runner

  std::size_t count() const { return dim == 0 ? 0 : flat.size() / dim; }

  std::span<const double> sample(std::size_t i) const {
    return {flat.data() + i * dim, dim};
  }

  void reserve(std::size_t samples) {
    flat.reserve(samples * dim);
    accepted.reserve(samples);
    proposed_step.reserve(samples);
    accepted_step.reserve(samples);
  }

  void push(std::span<const double> theta, bool was_accepted,
            double proposed_dist, double realized_dist) {
    flat.insert(flat.end(), theta.begin(), theta.end());
    accepted.push_back(was_accepted ? 1 : 0);
    proposed_step.push_back(proposed_dist);
    accepted_step.push_back(realized_dist);
  }
};

}  // namespace mintmc

#endif  // MINTMC_SAMPLE_RUN_HPP
