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

// Experiment runner for the mintmc library. Drives everything through the
// C API of the shared library.

#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "mintmc/capi.h"

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::int64_t samples = -1;
  std::int64_t burn_in = -1;
  std::int64_t thin = -1;
  bool parallel_chains = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags,
                      bool config_required = true) {
  auto* c = cmd->add_option("--config", flags.config, "experiment config JSON");
  if (config_required) c->required();
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--seed", flags.seed, "override the run seed")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--samples", flags.samples, "override the sample count");
  cmd->add_option("--burn-in", flags.burn_in, "override the burn-in length");
  cmd->add_option("--thin", flags.thin, "keep every k-th sample");
  cmd->add_flag("--parallel-chains", flags.parallel_chains,
                "run MINTEE chains on separate threads");
}

int fail(mintmc_status rc) {
  std::fprintf(stderr, "error: %s\n", mintmc_last_error());
  return static_cast<int>(rc);
}

int run_experiment(const CommonFlags& flags, const char* forced_algorithm) {
  mintmc_experiment* exp = mintmc_experiment_from_file(flags.config.c_str());
  if (exp == nullptr) return fail(MINTMC_ERR_CONFIG);

  auto override_or_die = [&](const char* key, const std::string& value) {
    const mintmc_status rc =
        mintmc_experiment_override(exp, key, value.c_str());
    if (rc != MINTMC_OK) {
      std::fprintf(stderr, "error: %s\n", mintmc_last_error());
      mintmc_experiment_free(exp);
      std::exit(static_cast<int>(rc));
    }
  };

  if (forced_algorithm != nullptr)
    override_or_die("sampler.algorithm",
                    "\"" + std::string(forced_algorithm) + "\"");
  if (flags.seed_set) override_or_die("seed", std::to_string(flags.seed));
  if (flags.samples >= 0)
    override_or_die("samples", std::to_string(flags.samples));
  if (flags.burn_in >= 0)
    override_or_die("burn_in", std::to_string(flags.burn_in));
  if (flags.thin >= 1) override_or_die("thin", std::to_string(flags.thin));
  if (flags.parallel_chains) override_or_die("parallel_chains", "true");
  if (!flags.out.empty()) {
    // JSON-escape is unnecessary for plain paths without quotes/backslashes;
    // keep it simple and reject the troublesome ones.
    if (flags.out.find('"') != std::string::npos ||
        flags.out.find('\\') != std::string::npos) {
      std::fprintf(stderr, "error: --out path must not contain quotes\n");
      mintmc_experiment_free(exp);
      return 2;
    }
    override_or_die("output_dir", "\"" + flags.out + "\"");
  }

  const mintmc_status rc = mintmc_experiment_run(exp);
  if (rc != MINTMC_OK) {
    const int code = fail(rc);
    mintmc_experiment_free(exp);
    return code;
  }
  std::printf("%s\n", mintmc_experiment_diagnostics(exp));
  mintmc_experiment_free(exp);
  return 0;
}

std::string slurp(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (f == nullptr) return {};
  std::string text;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, got);
  std::fclose(f);
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mint - mini-batch tempered MCMC experiment runner"};
  app.require_subcommand(1);

  CommonFlags run_flags, mint_flags, mh_flags, tempered_flags, sgld_flags,
      mintee_flags, gen_flags, norm_flags;
  std::string diagnose_dir, norm_out = "normality.json",
                            gen_out = "data.csv";

  auto* cmd_run = app.add_subcommand("run", "run the configured experiment");
  add_common_flags(cmd_run, run_flags);
  auto* cmd_mint = app.add_subcommand("run-mint", "run the MINT sampler");
  add_common_flags(cmd_mint, mint_flags);
  auto* cmd_mh = app.add_subcommand("run-mh", "run full-batch MH");
  add_common_flags(cmd_mh, mh_flags);
  auto* cmd_tempered =
      app.add_subcommand("run-tempered", "run full-batch tempered MH");
  add_common_flags(cmd_tempered, tempered_flags);
  auto* cmd_sgld = app.add_subcommand("run-sgld", "run SGLD");
  add_common_flags(cmd_sgld, sgld_flags);
  auto* cmd_mintee = app.add_subcommand("run-mintee", "run MINTEE");
  add_common_flags(cmd_mintee, mintee_flags);

  auto* cmd_gen =
      app.add_subcommand("gen-data", "generate a synthetic dataset CSV");
  cmd_gen->add_option("--config", gen_flags.config)->required();
  cmd_gen->add_option("--out", gen_out, "output CSV path");

  auto* cmd_diagnose = app.add_subcommand(
      "diagnose", "recompute diagnostics.json from a stored run");
  cmd_diagnose->add_option("--run", diagnose_dir, "run directory")->required();

  auto* cmd_norm = app.add_subcommand(
      "normality", "t-statistic normality study (diagnostics.normality)");
  cmd_norm->add_option("--config", norm_flags.config)->required();
  cmd_norm->add_option("--out", norm_out, "report JSON path");

  CLI11_PARSE(app, argc, argv);

  if (cmd_run->parsed()) return run_experiment(run_flags, nullptr);
  if (cmd_mint->parsed()) return run_experiment(mint_flags, "mint");
  if (cmd_mh->parsed()) return run_experiment(mh_flags, "mh");
  if (cmd_tempered->parsed())
    return run_experiment(tempered_flags, "tempered-mh");
  if (cmd_sgld->parsed()) return run_experiment(sgld_flags, "sgld");
  if (cmd_mintee->parsed()) return run_experiment(mintee_flags, "mintee");

  if (cmd_gen->parsed()) {
    const std::string text = slurp(gen_flags.config);
    if (text.empty()) {
      std::fprintf(stderr, "error: cannot read config '%s'\n",
                   gen_flags.config.c_str());
      return 2;
    }
    const mintmc_status rc =
        mintmc_generate_data(text.c_str(), gen_out.c_str());
    if (rc != MINTMC_OK) return fail(rc);
    std::printf("wrote %s\n", gen_out.c_str());
    return 0;
  }
  if (cmd_diagnose->parsed()) {
    const mintmc_status rc = mintmc_diagnose(diagnose_dir.c_str());
    if (rc != MINTMC_OK) return fail(rc);
    std::printf("rewrote %s/diagnostics.json\n", diagnose_dir.c_str());
    return 0;
  }
  if (cmd_norm->parsed()) {
    const std::string text = slurp(norm_flags.config);
    if (text.empty()) {
      std::fprintf(stderr, "error: cannot read config '%s'\n",
                   norm_flags.config.c_str());
      return 2;
    }
    const mintmc_status rc = mintmc_normality(text.c_str(), norm_out.c_str());
    if (rc != MINTMC_OK) return fail(rc);
    std::printf("wrote %s\n", norm_out.c_str());
    return 0;
  }
  return 0;
}
