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

#include "mintmc/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mintmc/baselines.hpp"
#include "mintmc/core.hpp"
#include "mintmc/data_io.hpp"
#include "mintmc/diagnostics.hpp"
#include "mintmc/mint.hpp"
#include "mintmc/models.hpp"

namespace mintmc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config defaults and access

void set_default(json& obj, const std::string& key, const json& value) {
  if (!obj.contains(key)) obj[key] = value;
}

json expand_defaults(json cfg) {
  if (!cfg.is_object()) throw_config("config must be a JSON object");
  set_default(cfg, "seed", 0);
  set_default(cfg, "samples", 1000);
  set_default(cfg, "burn_in", 0);
  set_default(cfg, "thin", 1);
  set_default(cfg, "parallel_chains", false);
  set_default(cfg, "output_dir", "");

  if (!cfg.contains("model") || !cfg["model"].is_object())
    throw_config("config needs a 'model' object");
  json& model = cfg["model"];
  if (!model.contains("kind")) throw_config("model.kind is required");
  const std::string kind = model["kind"].get<std::string>();
  if (kind == "tied_means") {
    set_default(model, "sigma1_sq", 10.0);
    set_default(model, "sigma2_sq", 1.0);
    set_default(model, "sigmax_sq", 2.0);
  } else if (kind == "symmetric_mixture") {
    set_default(model, "d", 10);
  } else if (kind == "logistic") {
    set_default(model, "prior_variance", 0.0);
  } else {
    throw_config("unknown model kind '" + kind + "'");
  }
  set_default(model, "theta_star", json());
  if (!model.contains("data") || !model["data"].is_object())
    throw_config("model.data is required");
  set_default(model["data"], "source", "generate");
  if (model["data"]["source"] == "generate") {
    set_default(model["data"], "n", 1000);
    set_default(model["data"], "seed", 1);
  }
  set_default(model, "test_data", json());

  if (!cfg.contains("sampler") || !cfg["sampler"].is_object())
    throw_config("config needs a 'sampler' object");
  json& sampler = cfg["sampler"];
  if (!sampler.contains("algorithm"))
    throw_config("sampler.algorithm is required");
  const std::string algo = sampler["algorithm"].get<std::string>();
  if (algo != "mint" && algo != "mh" && algo != "tempered-mh" &&
      algo != "sgld" && algo != "mintee")
    throw_config("unknown sampler.algorithm '" + algo + "'");
  if (!sampler.contains("proposal")) sampler["proposal"] = json::object();
  set_default(sampler["proposal"], "kind",
              algo == "mintee" ? "langevin" : "random-walk");
  set_default(sampler["proposal"], "step", 1.0);
  if (algo == "mint") {
    set_default(sampler, "naive_scaling", false);
    set_default(sampler, "paired_estimates", false);
    if (!sampler.contains("lambda")) set_default(sampler, "alpha", 0.99);
  }
  if (algo == "mh") set_default(sampler, "temperature", 1.0);
  if (algo == "sgld") {
    if (!sampler.contains("sgld")) sampler["sgld"] = json::object();
    json& s = sampler["sgld"];
    set_default(s, "schedule", "polynomial");
    set_default(s, "eps", 0.01);
    set_default(s, "a", 0.01);
    set_default(s, "b", 1.0);
    set_default(s, "gamma_s", 1.0 / 3.0);
  }
  if (algo == "mintee") {
    if (!sampler.contains("mintee")) sampler["mintee"] = json::object();
    json& m = sampler["mintee"];
    set_default(m, "chains", 5);
    set_default(m, "gamma", 1.4);
    set_default(m, "alpha", 0.995);
    set_default(m, "p_ee", 0.1);
    set_default(m, "c", 10.0);
    set_default(m, "h0", json());
    set_default(m, "h0_margin", 0.5);  // H0 = pilot min - margin * c * T0
    set_default(m, "pilot_iters", 200);
    set_default(m, "paired_estimates", true);
    set_default(m, "initial_step_scale", 5e-4);
    set_default(m, "adapt_factor", 1.1);
    set_default(m, "adapt_window", 100);
    set_default(m, "accept_low", 0.2);
    set_default(m, "accept_high", 0.5);
  }

  if (!cfg.contains("diagnostics")) cfg["diagnostics"] = json::object();
  json& diag = cfg["diagnostics"];
  set_default(diag, "mode_radius", json());
  set_default(diag, "grid", json());
  set_default(diag, "thin_accuracy", 10);
  set_default(diag, "normality", json());
  return cfg;
}

ProposalKind proposal_kind(const json& sampler) {
  const std::string kind = sampler["proposal"]["kind"].get<std::string>();
  if (kind == "random-walk") return ProposalKind::kRandomWalk;
  if (kind == "langevin") return ProposalKind::kLangevin;
  throw_config("unknown proposal kind '" + kind + "'");
}

std::unique_ptr<Model> make_model(const json& model_cfg,
                                  std::size_t data_width) {
  const std::string kind = model_cfg["kind"].get<std::string>();
  if (kind == "tied_means")
    return std::make_unique<TiedMeansMixture>(
        model_cfg["sigma1_sq"].get<double>(),
        model_cfg["sigma2_sq"].get<double>(),
        model_cfg["sigmax_sq"].get<double>());
  if (kind == "symmetric_mixture")
    return std::make_unique<SymmetricMixture>(
        model_cfg["d"].get<std::size_t>());
  if (kind == "logistic") {
    std::size_t p = 0;
    if (model_cfg.contains("p"))
      p = model_cfg["p"].get<std::size_t>();
    else if (data_width > 1)
      p = data_width - 1;  // features inferred from loaded records
    else
      throw_config("logistic model needs 'p' (feature count)");
    return std::make_unique<LogisticRegressionModel>(
        p, model_cfg["prior_variance"].get<double>());
  }
  throw_config("unknown model kind '" + kind + "'");
}

ParameterVector theta_from_json(const json& arr, const char* what) {
  if (!arr.is_array()) throw_config(std::string(what) + " must be an array");
  ParameterVector v;
  for (const auto& x : arr) v.push_back(x.get<double>());
  return v;
}

}  // namespace

std::string resolve_data_path(const std::string& path) {
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv("MINT_DATA_DIR")) {
    const fs::path joined = fs::path(dir) / path;
    if (fs::exists(joined)) return joined.string();
  }
  return path;  // let the loader report the miss
}

namespace {

Dataset load_dataset(const json& model_cfg, const json& data_cfg,
                     const Model* model_if_known) {
  const std::string source = data_cfg["source"].get<std::string>();
  if (source == "generate") {
    if (model_if_known == nullptr)
      throw_config("generated data needs the model parameters up front");
    if (!model_cfg.contains("theta_star") || model_cfg["theta_star"].is_null())
      throw_config("model.theta_star is required to generate data");
    return generate_data(*model_if_known,
                         theta_from_json(model_cfg["theta_star"],
                                         "model.theta_star"),
                         data_cfg["n"].get<std::size_t>(),
                         data_cfg["seed"].get<std::uint64_t>());
  }
  if (source == "csv") {
    if (!data_cfg.contains("path")) throw_config("csv data needs 'path'");
    if (model_if_known == nullptr)
      throw_config("csv data needs the model parameters up front");
    CsvSchema schema{csv_columns(*model_if_known)};
    return load_csv(resolve_data_path(data_cfg["path"].get<std::string>()),
                    schema);
  }
  if (source == "idx") {
    for (const char* key : {"images", "labels", "digit_a", "digit_b"})
      if (!data_cfg.contains(key))
        throw_config(std::string("idx data needs '") + key + "'");
    return load_idx(
        resolve_data_path(data_cfg["images"].get<std::string>()),
        resolve_data_path(data_cfg["labels"].get<std::string>()),
        data_cfg["digit_a"].get<int>(), data_cfg["digit_b"].get<int>());
  }
  throw_config("unknown data source '" + source + "'");
}

// ---------------------------------------------------------------------------
// Diagnostics shared by run() and diagnose: everything here is computed from
// exactly what samples.csv retains, so recomputation is byte-stable.

struct CsvView {
  std::size_t dim = 0;
  std::size_t burn_in = 0;
  std::size_t thin = 1;
  std::vector<double> flat;            // retained samples
  std::vector<std::uint8_t> accepted;  // per retained row
};

CsvView view_of_run(const SampleRun& run, std::size_t thin) {
  CsvView view;
  view.dim = run.dim;
  view.burn_in = run.burn_in;
  view.thin = thin;
  for (std::size_t i = 0; i < run.count(); i += thin) {
    const auto s = run.sample(i);
    view.flat.insert(view.flat.end(), s.begin(), s.end());
    view.accepted.push_back(run.accepted[i]);
  }
  return view;
}

std::size_t view_count(const CsvView& v) {
  return v.dim == 0 ? 0 : v.flat.size() / v.dim;
}

std::span<const double> view_sample(const CsvView& v, std::size_t i) {
  return {v.flat.data() + i * v.dim, v.dim};
}

SampleRun view_as_run(const CsvView& v) {
  SampleRun run;
  run.dim = v.dim;
  run.burn_in = v.burn_in;
  run.flat = v.flat;
  run.accepted = v.accepted;
  run.proposed_step.assign(view_count(v), 0.0);
  run.accepted_step.assign(view_count(v), 0.0);
  return run;
}

json sample_diagnostics(const CsvView& view, const json& cfg,
                        const Model& model, const Dataset* test_data) {
  json out;
  const std::size_t count = view_count(view);

  // Acceptance and displacement stats from the retained rows only, so a
  // recomputation from samples.csv reproduces them exactly. The mean step is
  // the mean displacement between consecutive retained rows across accepted
  // rows (the realized move length when thin = 1).
  std::size_t accepted = 0;
  std::size_t accepted_with_prev = 0;
  double step_sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (!view.accepted[i]) continue;
    ++accepted;
    if (i == 0) continue;
    const auto cur = view_sample(view, i);
    const auto prev = view_sample(view, i - 1);
    double ss = 0.0;
    for (std::size_t j = 0; j < view.dim; ++j) {
      const double d = cur[j] - prev[j];
      ss += d * d;
    }
    step_sum += std::sqrt(ss);
    ++accepted_with_prev;
  }
  out["acceptance_rate"] =
      count == 0 ? 0.0
                 : static_cast<double>(accepted) / static_cast<double>(count);
  out["mean_accepted_step"] =
      accepted_with_prev == 0
          ? json()
          : json(step_sum / static_cast<double>(accepted_with_prev));

  // Mode-based diagnostics when the model has a catalogue.
  json mode_json;
  json hitting = json::array();
  json occupancy = json();
  if (cfg["model"].contains("theta_star") &&
      !cfg["model"]["theta_star"].is_null()) {
    const ParameterVector theta_star =
        theta_from_json(cfg["model"]["theta_star"], "theta_star");
    const auto modes = true_modes(model, theta_star);
    if (!modes.empty() && count > 0) {
      double radius;
      if (cfg["diagnostics"]["mode_radius"].is_null()) {
        std::size_t n = 0;
        if (cfg["model"]["data"].contains("n"))
          n = cfg["model"]["data"]["n"].get<std::size_t>();
        radius = n > 0 ? scaled_mode_radius(1e-2, n) : 0.1;
      } else {
        radius = cfg["diagnostics"]["mode_radius"].get<double>();
      }
      out["mode_radius"] = radius;
      const SampleRun as_run = view_as_run(view);
      if (modes.size() >= 2) {
        const double ratio = mode_ratio(as_run, modes[0], modes[1], radius);
        mode_json = std::isfinite(ratio) ? json(ratio) : json("inf");
      }
      const ModeOccupancy occ = mode_occupancy(as_run, modes);
      occupancy = occ.fractions;
      for (const auto& mode : modes) {
        const auto hit = hitting_time(as_run, mode, radius);
        if (hit)
          hitting.push_back(view.burn_in + 1 + *hit * view.thin);
        else
          hitting.push_back(json());
      }
    }
  }
  out["mode_ratio"] = mode_json;
  out["mode_occupancy"] = occupancy;
  out["hitting_iterations"] = hitting;

  // Stationary-law oracle for scalar models on request.
  json ks = json();
  if (!cfg["diagnostics"]["grid"].is_null() && view.dim == 1 && count > 0) {
    const json& g = cfg["diagnostics"]["grid"];
    ks = json();  // placeholder; filled by caller (needs the dataset)
    (void)g;
  }
  out["ks_distance"] = ks;

  // Bayesian-model-averaged accuracy for logistic runs with test data.
  if (test_data != nullptr && count > 0) {
    const SampleRun as_run = view_as_run(view);
    out["test_accuracy"] = test_accuracy(
        as_run, model, *test_data,
        cfg["diagnostics"]["thin_accuracy"].get<std::size_t>());
  } else {
    out["test_accuracy"] = json();
  }
  return out;
}

// KS needs the training data (to evaluate the tempered grid density), which
// is why it is filled outside sample_diagnostics.
json ks_diagnostic(const CsvView& view, const json& cfg, const Model& model,
                   const Dataset& data) {
  if (cfg["diagnostics"]["grid"].is_null() || view.dim != 1) return json();
  const std::size_t count = view_count(view);
  if (count == 0) return json();
  const json& g = cfg["diagnostics"]["grid"];
  for (const char* key : {"lo", "hi", "points"})
    if (!g.contains(key))
      throw_config(std::string("diagnostics.grid needs '") + key + "'");
  const double lo = g["lo"].get<double>();
  const double hi = g["hi"].get<double>();
  const std::size_t points = g["points"].get<std::size_t>();
  if (!(hi > lo) || points < 2) throw_config("malformed diagnostics.grid");

  double temp = 1.0;
  if (g.contains("temperature") && !g["temperature"].is_null()) {
    temp = g["temperature"].get<double>();
  } else {
    const json& sampler = cfg["sampler"];
    const std::string algo = sampler["algorithm"].get<std::string>();
    const std::size_t n = data.size();
    if (algo == "mint") {
      temp = temperature(n, sampler["lambda"].get<double>());
    } else if (algo == "tempered-mh") {
      temp = sampler.contains("temperature")
                 ? sampler["temperature"].get<double>()
                 : temperature(n, sampler["lambda"].get<double>());
    } else if (algo == "mh") {
      temp = sampler["temperature"].get<double>();
    }
    // sgld and mintee chain 0 target the T = 1 posterior.
  }

  GridDensity grid;
  grid.theta.resize(points);
  grid.log_density.resize(points);
  EvalCounters scratch;
  for (std::size_t i = 0; i < points; ++i) {
    const double x =
        lo + (hi - lo) * static_cast<double>(i) /
                 static_cast<double>(points - 1);
    grid.theta[i] = x;
    grid.log_density[i] =
        log_posterior_tempered(model, data, {x}, temp, scratch);
  }
  std::vector<double> ones(view_count(view));
  for (std::size_t i = 0; i < ones.size(); ++i)
    ones[i] = view_sample(view, i)[0];
  return json(ks_against_grid(ones, grid));
}

void write_samples_csv(const std::string& path, const CsvView& view) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw_io("cannot write '" + path + "'");
  std::fprintf(f, "iter,accepted");
  for (std::size_t j = 0; j < view.dim; ++j)
    std::fprintf(f, ",theta_%zu", j);
  std::fputc('\n', f);
  for (std::size_t i = 0; i < view_count(view); ++i) {
    std::fprintf(f, "%zu,%u", view.burn_in + 1 + i * view.thin,
                 static_cast<unsigned>(view.accepted[i]));
    const auto s = view_sample(view, i);
    for (std::size_t j = 0; j < view.dim; ++j)
      std::fprintf(f, ",%.17g", s[j]);
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw_io("failed to flush '" + path + "'");
}

CsvView read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw_data("'" + path + "' is empty");
  std::size_t dim = 0;
  {
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 3 || cells[0] != "iter" || cells[1] != "accepted")
      throw_data("'" + path + "' does not look like a samples.csv");
    dim = cells.size() - 2;
  }
  CsvView view;
  view.dim = dim;
  bool first = true;
  std::size_t first_iter = 0, second_iter = 0, rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    std::size_t iter = 0;
    while (std::getline(ss, cell, ',')) {
      if (col == 0)
        iter = static_cast<std::size_t>(std::stoull(cell));
      else if (col == 1)
        view.accepted.push_back(cell == "1" ? 1 : 0);
      else
        view.flat.push_back(std::strtod(cell.c_str(), nullptr));
      ++col;
    }
    if (col != dim + 2)
      throw_data("ragged row in '" + path + "'");
    ++rows;
    if (first) {
      first_iter = iter;
      first = false;
    } else if (rows == 2) {
      second_iter = iter;
    }
  }
  if (rows == 0) throw_data("'" + path + "' has no sample rows");
  view.burn_in = first_iter - 1;
  view.thin = rows >= 2 ? second_iter - first_iter : 1;
  return view;
}

void write_json_file(const std::string& path, const json& j) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw_io("cannot write '" + path + "'");
  const std::string text = j.dump(2);
  std::fwrite(text.data(), 1, text.size(), f);
  std::fputc('\n', f);
  if (std::fclose(f) != 0) throw_io("failed to flush '" + path + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw_data("malformed JSON in '" + path + "': " + e.what());
  }
  return j;
}

void write_ring_table_csv(const std::string& path, const json& table) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw_io("cannot write '" + path + "'");
  const std::size_t rings = table["percent"].empty()
                                ? 0
                                : table["percent"][0].size();
  std::fprintf(f, "chain,temperature,batch_size");
  for (std::size_t j = 0; j < rings; ++j) std::fprintf(f, ",ring_%zu", j);
  std::fputc('\n', f);
  for (std::size_t k = 0; k < table["percent"].size(); ++k) {
    std::fprintf(f, "%zu,%.17g,%llu", k,
                 table["temperatures"][k].get<double>(),
                 static_cast<unsigned long long>(
                     table["batch_sizes"][k].get<std::uint64_t>()));
    for (const auto& v : table["percent"][k])
      std::fprintf(f, ",%.17g", v.get<double>());
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw_io("failed to flush '" + path + "'");
}

void write_occupancy_csv(const std::string& path, const json& occupancy) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw_io("cannot write '" + path + "'");
  std::fprintf(f, "mode,fraction\n");
  for (std::size_t i = 0; i < occupancy.size(); ++i)
    std::fprintf(f, "%zu,%.17g\n", i, occupancy[i].get<double>());
  if (std::fclose(f) != 0) throw_io("failed to flush '" + path + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// Experiment

Experiment::Experiment(json config)
    : config_(expand_defaults(std::move(config))) {
  validate();
}

Experiment Experiment::from_json(const std::string& json_text) {
  json cfg;
  try {
    cfg = json::parse(json_text);
  } catch (const std::exception& e) {
    throw_config(std::string("config is not valid JSON: ") + e.what());
  }
  return Experiment(std::move(cfg));
}

Experiment Experiment::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void Experiment::override_field(const std::string& dotted_key,
                                const json& value) {
  if (ran_) throw_config("cannot override a finished experiment");
  json* node = &config_;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = dotted_key.find('.', start);
    const std::string key = dotted_key.substr(
        start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw_config("empty key in override '" + dotted_key + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
  config_ = expand_defaults(std::move(config_));
  validate();
}

void Experiment::validate() const {
  const json& cfg = config_;
  if (cfg["thin"].get<std::size_t>() == 0)
    throw_config("thin must be at least 1");
  const json& sampler = cfg["sampler"];
  const std::string algo = sampler["algorithm"].get<std::string>();
  if (!(sampler["proposal"]["step"].get<double>() > 0))
    throw_config("proposal.step must be positive");
  if (algo == "mint") {
    if (!sampler.contains("batch_size"))
      throw_config("mint needs sampler.batch_size");
    if (sampler.contains("lambda") && sampler.contains("alpha"))
      throw_config("give sampler.lambda or sampler.alpha, not both");
  }
  if (algo == "sgld" || (algo != "mintee" &&
                         sampler["proposal"]["kind"] == "langevin")) {
    // All built-in models carry gradients; this guards custom extensions.
  }
  if (algo == "mintee") {
    const json& m = sampler["mintee"];
    if (!m.contains("m_min") && m["chains"].get<std::size_t>() > 1)
      throw_config("mintee needs sampler.mintee.m_min");
    if (!(m["alpha"].get<double>() > 0 && m["alpha"].get<double>() < 1))
      throw_config("mintee alpha must lie in (0, 1)");
    if (!(m["p_ee"].get<double>() > 0 && m["p_ee"].get<double>() < 1))
      throw_config("mintee p_ee must lie in (0, 1)");
  }
}

const json& Experiment::diagnostics() const {
  if (!ran_) throw_config("experiment has not run yet");
  return diagnostics_;
}

const SampleRun& Experiment::primary_run() const {
  if (!ran_) throw_config("experiment has not run yet");
  return *run_;
}

void Experiment::run() {
  const json& cfg = config_;
  const json& model_cfg = cfg["model"];
  const json& data_cfg = model_cfg["data"];
  const std::string source = data_cfg["source"].get<std::string>();

  // Order matters for logistic records loaded from files: the feature count
  // comes out of the file, so the model may follow the data.
  if (source == "generate" || source == "csv" ||
      model_cfg.contains("p") || model_cfg["kind"] != "logistic") {
    model_ = make_model(model_cfg, 0);
    data_ = std::make_unique<Dataset>(
        load_dataset(model_cfg, data_cfg, model_.get()));
  } else {
    data_ = std::make_unique<Dataset>(
        load_dataset(model_cfg, data_cfg, nullptr));
    model_ = make_model(model_cfg, data_->row_width());
  }
  model_->check_dataset(*data_);
  if (!model_cfg["test_data"].is_null())
    test_data_ = std::make_unique<Dataset>(
        load_dataset(model_cfg, model_cfg["test_data"], model_.get()));

  ParameterVector init(model_->dim(), 0.0);
  if (cfg.contains("init") && !cfg["init"].is_null())
    init = theta_from_json(cfg["init"], "init");
  if (init.size() != model_->dim())
    throw_config("init length does not match the model dimension");

  const std::uint64_t seed = cfg["seed"].get<std::uint64_t>();
  const std::size_t samples = cfg["samples"].get<std::size_t>();
  const std::size_t burn_in = cfg["burn_in"].get<std::size_t>();
  const json& sampler = config_["sampler"];
  const std::string algo = sampler["algorithm"].get<std::string>();
  const std::size_t n = data_->size();

  if (algo == "mint" || algo == "tempered-mh") {
    // Resolve lambda from alpha when needed so the echo is complete.
    if (algo == "mint" && !sampler.contains("lambda")) {
      const double tau =
          tau_from_batch(sampler["batch_size"].get<std::size_t>(), n);
      config_["sampler"]["lambda"] = sampler["alpha"].get<double>() * tau;
    }
    if (algo == "tempered-mh" && !sampler.contains("temperature")) {
      if (!sampler.contains("lambda"))
        throw_config("tempered-mh needs temperature or lambda");
      config_["sampler"]["temperature"] =
          temperature(n, sampler["lambda"].get<double>());
    }
  }

  if (algo == "mint") {
    MintConfig mc;
    mc.batch_size = sampler["batch_size"].get<std::size_t>();
    mc.lambda = config_["sampler"]["lambda"].get<double>();
    mc.burn_in = burn_in;
    mc.samples = samples;
    mc.proposal = proposal_kind(sampler);
    mc.step = sampler["proposal"]["step"].get<double>();
    mc.naive_scaling = sampler["naive_scaling"].get<bool>();
    mc.paired_estimates = sampler["paired_estimates"].get<bool>();
    const MintParams params = derive_mint_params(mc, n);
    config_["sampler"]["tau"] = params.tau;
    config_["sampler"]["temperature"] = params.temperature;
    run_ = std::make_unique<SampleRun>(
        run_mint(*model_, *data_, mc, init, seed));
  } else if (algo == "mh" || algo == "tempered-mh") {
    MhConfig mc;
    mc.temperature = config_["sampler"]["temperature"].get<double>();
    mc.burn_in = burn_in;
    mc.samples = samples;
    mc.proposal = proposal_kind(sampler);
    mc.step = sampler["proposal"]["step"].get<double>();
    run_ = std::make_unique<SampleRun>(
        run_mh(*model_, *data_, mc, init, seed));
  } else if (algo == "sgld") {
    SgldConfig sc;
    sc.batch_size = sampler.contains("batch_size")
                        ? sampler["batch_size"].get<std::size_t>()
                        : n;
    const json& s = sampler["sgld"];
    sc.schedule = s["schedule"] == "constant" ? SgldSchedule::kConstant
                                              : SgldSchedule::kPolynomial;
    sc.eps = s["eps"].get<double>();
    sc.a = s["a"].get<double>();
    sc.b = s["b"].get<double>();
    sc.gamma_s = s["gamma_s"].get<double>();
    sc.burn_in = burn_in;
    sc.steps = samples;
    run_ = std::make_unique<SampleRun>(
        run_sgld(*model_, *data_, sc, init, seed));
  } else if (algo == "mintee") {
    const json& m = sampler["mintee"];
    const std::size_t K = m["chains"].get<std::size_t>();
    // The pilot descent provides both the default energy floor H0 and the
    // default starting point (its argmin, a posterior mode). Starting at a
    // mode rather than the origin keeps the staged chains out of the
    // high-energy plateau where rings of the adjacent chain are still empty.
    double h0;
    EvalCounters pilot_evals;
    ParameterVector pilot_argmin;
    const bool need_pilot =
        m["h0"].is_null() || !cfg.contains("init") || cfg["init"].is_null();
    if (need_pilot) {
      const double pilot = pilot_minimum_energy(
          *model_, *data_, init, m["pilot_iters"].get<std::size_t>(),
          pilot_evals, &pilot_argmin);
      if (m["h0"].is_null()) {
        h0 = pilot - m["h0_margin"].get<double>() * m["c"].get<double>();
        config_["sampler"]["mintee"]["h0"] = h0;
      } else {
        h0 = m["h0"].get<double>();
      }
      if (!cfg.contains("init") || cfg["init"].is_null()) {
        init = pilot_argmin;
        config_["init"] = init;
      }
    } else {
      h0 = m["h0"].get<double>();
    }
    LadderConfig ladder = build_ladder(
        n, K, K > 1 ? m["m_min"].get<std::size_t>() : n,
        m["gamma"].get<double>(), m["alpha"].get<double>(),
        m["c"].get<double>(), h0);
    ladder.p_ee = m["p_ee"].get<double>();
    ladder.burn_in = burn_in;
    ladder.samples = samples;
    ladder.proposal = proposal_kind(sampler);
    ladder.initial_step_scale = m["initial_step_scale"].get<double>();
    ladder.adapt_factor = m["adapt_factor"].get<double>();
    ladder.adapt_window = m["adapt_window"].get<std::size_t>();
    ladder.accept_low = m["accept_low"].get<double>();
    ladder.accept_high = m["accept_high"].get<double>();
    ladder.paired_estimates = m["paired_estimates"].get<bool>();
    config_["sampler"]["mintee"]["m"] = ladder.m;
    config_["sampler"]["mintee"]["T"] = ladder.T;
    config_["sampler"]["mintee"]["H"] = ladder.H;

    std::vector<ParameterVector> inits(K, init);
    mintee_ = std::make_unique<MinteeRun>(
        run_mintee(*model_, *data_, ladder, inits, seed,
                   cfg["parallel_chains"].get<bool>()));
    mintee_->evals_total += pilot_evals;
    run_ = std::make_unique<SampleRun>(mintee_->chains[0].run);
    run_->evals = mintee_->evals_total;
  } else {
    throw_config("unknown sampler.algorithm '" + algo + "'");
  }

  run_->config_echo = config_.dump();

  // Diagnostics on exactly what samples.csv will retain.
  const CsvView view = view_of_run(*run_, cfg["thin"].get<std::size_t>());
  diagnostics_ = sample_diagnostics(view, config_, *model_,
                                    test_data_.get());
  diagnostics_["ks_distance"] =
      ks_diagnostic(view, config_, *model_, *data_);
  diagnostics_["evaluations_total"] = run_->evals.loglik;
  diagnostics_["gradient_evaluations"] = run_->evals.gradient;
  diagnostics_["evaluations_per_sample"] =
      samples == 0 ? json()
                   : json(static_cast<double>(run_->evals.loglik) /
                          static_cast<double>(samples));
  if (mintee_ != nullptr) {
    const RingTable table = ring_table(*mintee_);
    json t;
    t["temperatures"] = table.temperatures;
    t["batch_sizes"] = table.batch_sizes;
    t["percent"] = table.percent;
    diagnostics_["ring_table"] = t;
    json chain_stats = json::array();
    for (const auto& c : mintee_->chains) {
      json cs;
      cs["temperature"] = c.temperature;
      cs["batch_size"] = c.batch_size;
      cs["mh_steps"] = c.mh_steps;
      cs["mh_accepts"] = c.mh_accepts;
      cs["jumps_attempted"] = c.jumps_attempted;
      cs["jumps_accepted"] = c.jumps_accepted;
      cs["jump_fallbacks"] = c.jump_fallbacks;
      cs["final_step"] = c.final_step;
      cs["evaluations"] = c.evals.loglik;
      cs["evaluations_at_quota"] = c.evals_at_quota.loglik;
      chain_stats.push_back(cs);
    }
    diagnostics_["mintee_chains"] = chain_stats;
  } else {
    diagnostics_["ring_table"] = json();
  }
  diagnostics_["config"] = config_;
  ran_ = true;

  const std::string out_dir = cfg["output_dir"].get<std::string>();
  if (!out_dir.empty()) write_outputs(out_dir);
}

void Experiment::write_outputs(const std::string& dir) const {
  if (!ran_) throw_config("experiment has not run yet");
  fs::create_directories(dir);
  const CsvView view =
      view_of_run(*run_, config_["thin"].get<std::size_t>());
  write_samples_csv((fs::path(dir) / "samples.csv").string(), view);
  write_json_file((fs::path(dir) / "diagnostics.json").string(),
                  diagnostics_);
  if (!diagnostics_["ring_table"].is_null())
    write_ring_table_csv((fs::path(dir) / "ring_table.csv").string(),
                         diagnostics_["ring_table"]);
  if (diagnostics_["mode_occupancy"].is_array())
    write_occupancy_csv((fs::path(dir) / "mode_occupancy.csv").string(),
                        diagnostics_["mode_occupancy"]);
}

// ---------------------------------------------------------------------------
// diagnose / gen-data / normality entry points

json diagnose_run_dir(const std::string& dir) {
  const fs::path base(dir);
  json stored = read_json_file((base / "diagnostics.json").string());
  if (!stored.contains("config"))
    throw_data("stored diagnostics.json lacks the config echo");
  json cfg = stored["config"];
  CsvView view = read_samples_csv((base / "samples.csv").string());

  // Rebuild the model and, when configured, the datasets; both are
  // deterministic functions of the config echo.
  std::unique_ptr<Model> model;
  std::unique_ptr<Dataset> data;
  std::unique_ptr<Dataset> test_data;
  const json& model_cfg = cfg["model"];
  if (model_cfg["kind"] == "logistic" && !model_cfg.contains("p")) {
    data = std::make_unique<Dataset>(
        load_dataset(model_cfg, model_cfg["data"], nullptr));
    model = make_model(model_cfg, data->row_width());
  } else {
    model = make_model(model_cfg, 0);
    data = std::make_unique<Dataset>(
        load_dataset(model_cfg, model_cfg["data"], model.get()));
  }
  if (!model_cfg["test_data"].is_null())
    test_data = std::make_unique<Dataset>(
        load_dataset(model_cfg, model_cfg["test_data"], model.get()));

  // The retained view was already thinned when written; diagnostics below
  // must treat it as-is.
  json diag = sample_diagnostics(view, cfg, *model, test_data.get());
  diag["ks_distance"] = ks_diagnostic(view, cfg, *model, *data);
  // Counters and ring contents are facts about the original run; carry them.
  for (const char* key :
       {"evaluations_total", "gradient_evaluations", "evaluations_per_sample",
        "ring_table", "mintee_chains"})
    if (stored.contains(key)) diag[key] = stored[key];
  if (!diag.contains("ring_table")) diag["ring_table"] = json();
  diag["config"] = cfg;

  write_json_file((base / "diagnostics.json").string(), diag);
  return diag;
}

void generate_data_csv(const std::string& config_json,
                       const std::string& out_csv) {
  json cfg;
  try {
    cfg = json::parse(config_json);
  } catch (const std::exception& e) {
    throw_config(std::string("config is not valid JSON: ") + e.what());
  }
  cfg = expand_defaults(std::move(cfg));
  const json& model_cfg = cfg["model"];
  if (model_cfg["data"]["source"] != "generate")
    throw_config("gen-data needs model.data.source == \"generate\"");
  auto model = make_model(model_cfg, 0);
  const Dataset data =
      load_dataset(model_cfg, model_cfg["data"], model.get());
  write_csv(out_csv, CsvSchema{csv_columns(*model)}, data);
}

json normality_from_config(const std::string& config_json) {
  json cfg;
  try {
    cfg = json::parse(config_json);
  } catch (const std::exception& e) {
    throw_config(std::string("config is not valid JSON: ") + e.what());
  }
  cfg = expand_defaults(std::move(cfg));
  if (cfg["diagnostics"]["normality"].is_null())
    throw_config("config needs a diagnostics.normality object");
  json norm_cfg = cfg["diagnostics"]["normality"];
  set_default(norm_cfg, "batch_size", 100);
  set_default(norm_cfg, "draws", 5000);
  set_default(norm_cfg, "theta", json());
  set_default(norm_cfg, "seed", 12345);

  const json& model_cfg = cfg["model"];
  std::unique_ptr<Model> model;
  std::unique_ptr<Dataset> data;
  if (model_cfg["kind"] == "logistic" && !model_cfg.contains("p")) {
    data = std::make_unique<Dataset>(
        load_dataset(model_cfg, model_cfg["data"], nullptr));
    model = make_model(model_cfg, data->row_width());
  } else {
    model = make_model(model_cfg, 0);
    data = std::make_unique<Dataset>(
        load_dataset(model_cfg, model_cfg["data"], model.get()));
  }

  EvalCounters evals;
  ParameterVector theta;
  if (!norm_cfg["theta"].is_null()) {
    theta = theta_from_json(norm_cfg["theta"], "normality.theta");
  } else {
    // A representative point: deterministic descent into the bulk of the
    // posterior.
    const ParameterVector origin(model->dim(), 0.0);
    pilot_minimum_energy(*model, *data, origin, 200, evals, &theta);
  }

  RngStream rng(norm_cfg["seed"].get<std::uint64_t>(), streams::kMoveSelect);
  const NormalityReport rep = normality_report(
      *model, *data, theta, norm_cfg["batch_size"].get<std::size_t>(),
      norm_cfg["draws"].get<std::size_t>(), rng, evals);

  json out;
  out["mean"] = rep.mean;
  out["sd"] = rep.sd;
  out["skewness"] = rep.skewness;
  out["excess_kurtosis"] = rep.excess_kurtosis;
  out["ks_distance"] = rep.ks_distance;
  out["degenerate"] = rep.degenerate;
  out["draws"] = rep.draws;
  out["batch_size"] = rep.batch_size;
  out["finite_population_factor"] = rep.finite_population_factor;
  out["theta"] = theta;
  out["evaluations_total"] = evals.loglik;
  out["config"] = cfg;
  return out;
}

}  // namespace mintmc
