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

#include "mintmc/capi.h"

#include <cstring>
#include <string>

#include "mintmc/experiment.hpp"
#include "mintmc/types.hpp"

namespace {

thread_local std::string g_last_error;

mintmc_status status_of(const std::exception& e) {
  if (const auto* err = dynamic_cast<const mintmc::Error*>(&e)) {
    switch (err->code()) {
      case mintmc::ErrorCode::kConfig:
      case mintmc::ErrorCode::kData:
        return MINTMC_ERR_CONFIG;
      default:
        return MINTMC_ERR_RUNTIME;
    }
  }
  return MINTMC_ERR_RUNTIME;
}

template <typename Fn>
mintmc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MINTMC_OK;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (...) {
    g_last_error = "unknown error";
    return MINTMC_ERR_RUNTIME;
  }
}

}  // namespace

struct mintmc_experiment {
  mintmc::Experiment impl;
  std::string config_text;
  std::string diagnostics_text;
};

extern "C" {

const char* mintmc_version(void) { return "0.1.0"; }

const char* mintmc_last_error(void) { return g_last_error.c_str(); }

mintmc_experiment* mintmc_experiment_from_json(const char* config_json) {
  mintmc_experiment* handle = nullptr;
  guarded([&] {
    if (config_json == nullptr) mintmc::throw_config("config_json is null");
    handle = new mintmc_experiment{
        mintmc::Experiment::from_json(config_json), {}, {}};
  });
  return handle;
}

mintmc_experiment* mintmc_experiment_from_file(const char* config_path) {
  mintmc_experiment* handle = nullptr;
  guarded([&] {
    if (config_path == nullptr) mintmc::throw_config("config_path is null");
    handle = new mintmc_experiment{
        mintmc::Experiment::from_file(config_path), {}, {}};
  });
  return handle;
}

mintmc_status mintmc_experiment_override(mintmc_experiment* exp,
                                         const char* dotted_key,
                                         const char* json_value) {
  return guarded([&] {
    if (exp == nullptr) mintmc::throw_config("null experiment handle");
    if (dotted_key == nullptr || json_value == nullptr)
      mintmc::throw_config("null override key or value");
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(json_value);
    } catch (const std::exception& e) {
      mintmc::throw_config(std::string("override value is not JSON: ") +
                           e.what());
    }
    exp->impl.override_field(dotted_key, value);
  });
}

mintmc_status mintmc_experiment_run(mintmc_experiment* exp) {
  return guarded([&] {
    if (exp == nullptr) mintmc::throw_config("null experiment handle");
    exp->impl.run();
  });
}

const char* mintmc_experiment_config(mintmc_experiment* exp) {
  if (exp == nullptr) return "";
  exp->config_text = exp->impl.resolved_config().dump(2);
  return exp->config_text.c_str();
}

const char* mintmc_experiment_diagnostics(mintmc_experiment* exp) {
  if (exp == nullptr) return "";
  const mintmc_status rc = guarded(
      [&] { exp->diagnostics_text = exp->impl.diagnostics().dump(2); });
  return rc == MINTMC_OK ? exp->diagnostics_text.c_str() : "";
}

int64_t mintmc_experiment_sample_count(const mintmc_experiment* exp) {
  if (exp == nullptr) return -1;
  int64_t count = -1;
  guarded([&] {
    count = static_cast<int64_t>(exp->impl.primary_run().count());
  });
  return count;
}

int32_t mintmc_experiment_dim(const mintmc_experiment* exp) {
  if (exp == nullptr) return -1;
  int32_t dim = -1;
  guarded(
      [&] { dim = static_cast<int32_t>(exp->impl.primary_run().dim); });
  return dim;
}

int64_t mintmc_experiment_copy_samples(const mintmc_experiment* exp,
                                       double* out, int64_t capacity) {
  if (exp == nullptr || out == nullptr) return -1;
  int64_t written = -1;
  guarded([&] {
    const auto& run = exp->impl.primary_run();
    const int64_t total = static_cast<int64_t>(run.flat.size());
    if (capacity < total)
      mintmc::throw_config("sample buffer too small: need " +
                           std::to_string(total) + " doubles");
    std::memcpy(out, run.flat.data(), sizeof(double) * run.flat.size());
    written = total;
  });
  return written;
}

mintmc_status mintmc_experiment_write_outputs(mintmc_experiment* exp,
                                              const char* dir) {
  return guarded([&] {
    if (exp == nullptr) mintmc::throw_config("null experiment handle");
    if (dir == nullptr) mintmc::throw_config("null output dir");
    exp->impl.write_outputs(dir);
  });
}

void mintmc_experiment_free(mintmc_experiment* exp) { delete exp; }

mintmc_status mintmc_generate_data(const char* config_json,
                                   const char* out_csv_path) {
  return guarded([&] {
    if (config_json == nullptr || out_csv_path == nullptr)
      mintmc::throw_config("null argument");
    mintmc::generate_data_csv(config_json, out_csv_path);
  });
}

mintmc_status mintmc_diagnose(const char* run_dir) {
  return guarded([&] {
    if (run_dir == nullptr) mintmc::throw_config("null run dir");
    mintmc::diagnose_run_dir(run_dir);
  });
}

mintmc_status mintmc_normality(const char* config_json, const char* out_path) {
  return guarded([&] {
    if (config_json == nullptr || out_path == nullptr)
      mintmc::throw_config("null argument");
    const nlohmann::json report = mintmc::normality_from_config(config_json);
    std::FILE* f = std::fopen(out_path, "wb");
    if (f == nullptr)
      mintmc::throw_io(std::string("cannot write '") + out_path + "'");
    const std::string text = report.dump(2);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fputc('\n', f);
    if (std::fclose(f) != 0)
      mintmc::throw_io(std::string("failed to flush '") + out_path + "'");
  });
}

}  // extern "C"
