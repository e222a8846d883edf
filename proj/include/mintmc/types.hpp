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

#ifndef MINTMC_TYPES_HPP
#define MINTMC_TYPES_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mintmc {

/// Point in d-dimensional parameter space.
using ParameterVector = std::vector<double>;

enum class ErrorCode {
  kConfig = 1,     // invalid configuration or arguments
  kData = 2,       // malformed dataset / file contents
  kNumeric = 3,    // non-finite likelihood or gradient
  kIo = 4,         // file system failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_config(const std::string& what) {
  throw Error(ErrorCode::kConfig, what);
}
[[noreturn]] inline void throw_data(const std::string& what) {
  throw Error(ErrorCode::kData, what);
}
[[noreturn]] inline void throw_numeric(const std::string& what) {
  throw Error(ErrorCode::kNumeric, what);
}
[[noreturn]] inline void throw_io(const std::string& what) {
  throw Error(ErrorCode::kIo, what);
}

/// Counts per-datum evaluation events. One event is one data point touched,
/// whether for its log likelihood, its gradient, or both at once in a fused
/// evaluation. `gradient` additionally tracks how many of those events
/// computed a gradient.
struct EvalCounters {
  std::uint64_t loglik = 0;
  std::uint64_t gradient = 0;

  EvalCounters& operator+=(const EvalCounters& o) {
    loglik += o.loglik;
    gradient += o.gradient;
    return *this;
  }
};

/// Immutable array of n observations, stored row-major with a fixed record
/// width. The record layout is model-specific (e.g. a scalar for the mixture
/// models, features followed by a 0/1 label for logistic regression).
class Dataset {
 public:
  Dataset(std::vector<double> values, std::size_t row_width)
      : values_(std::move(values)), width_(row_width) {
    if (width_ == 0) throw_config("Dataset: row width must be positive");
    if (values_.size() % width_ != 0)
      throw_data("Dataset: value count " + std::to_string(values_.size()) +
                 " is not a multiple of row width " + std::to_string(width_));
    n_ = values_.size() / width_;
    if (n_ == 0) throw_data("Dataset: needs at least one observation");
  }

  std::size_t size() const { return n_; }
  std::size_t row_width() const { return width_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * width_, width_};
  }

  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
  std::size_t width_;
  std::size_t n_;
};

}  // namespace mintmc

#endif  // MINTMC_TYPES_HPP
