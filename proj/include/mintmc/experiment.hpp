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

#ifndef MINTMC_EXPERIMENT_HPP
#define MINTMC_EXPERIMENT_HPP

#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "mintmc/mintee.hpp"
#include "mintmc/model.hpp"
#include "mintmc/sample_run.hpp"

namespace mintmc {

/// One configured experiment: model + data + sampler + diagnostics, driven
/// by a JSON config. All cross-field constraints are validated before any
/// sampling.
class Experiment {
 public:
  static Experiment from_json(const std::string& json_text);
  static Experiment from_file(const std::string& path);

  /// Applies a CLI-style override before running; `dotted_key` addresses the
  /// config (e.g. "seed", "sampler.algorithm", "output_dir").
  void override_field(const std::string& dotted_key,
                      const nlohmann::json& value);

  /// Runs the configured sampler and computes the diagnostics summary.
  void run();

  const nlohmann::json& resolved_config() const { return config_; }
  const nlohmann::json& diagnostics() const;

  /// The primary sample stream (chain 0 for MINTEE).
  const SampleRun& primary_run() const;
  const MinteeRun* mintee_run() const { return mintee_.get(); }

  /// Writes samples.csv, diagnostics.json and the per-diagnostic CSVs.
  void write_outputs(const std::string& dir) const;

 private:
  explicit Experiment(nlohmann::json config);
  void validate() const;

  nlohmann::json config_;
  std::unique_ptr<Model> model_;
  std::unique_ptr<Dataset> data_;
  std::unique_ptr<Dataset> test_data_;
  std::unique_ptr<SampleRun> run_;
  std::unique_ptr<MinteeRun> mintee_;
  nlohmann::json diagnostics_;
  bool ran_ = false;
};

/// Recomputes diagnostics.json from a stored run directory (samples.csv plus
/// the embedded config echo) and rewrites it. Pure recomputation: a second
/// invocation is byte-identical.
nlohmann::json diagnose_run_dir(const std::string& dir);

/// Generates the configured synthetic dataset and writes it as CSV.
void generate_data_csv(const std::string& config_json,
                       const std::string& out_csv);

/// Runs the t-statistic normality study configured under
/// diagnostics.normality and returns the report as JSON.
nlohmann::json normality_from_config(const std::string& config_json);

/// Resolves a data file path: tried as given, then under $MINT_DATA_DIR.
std::string resolve_data_path(const std::string& path);

}  // namespace mintmc

#endif  // MINTMC_EXPERIMENT_HPP
