#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mintmc/experiment.hpp"

using namespace mintmc;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("mintmc_exp_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json tied_means_config() {
  return json::parse(R"({
    "model": {
      "kind": "tied_means",
      "theta_star": [0.0, 1.0],
      "data": {"source": "generate", "n": 2000, "seed": 1}
    },
    "sampler": {
      "algorithm": "mint",
      "batch_size": 45,
      "lambda": 0.25,
      "proposal": {"kind": "random-walk", "step": 0.6}
    },
    "seed": 7,
    "samples": 4000,
    "burn_in": 500
  })");
}

}  // namespace

TEST_CASE("config validation: lambda >= tau exits with a named constraint") {
  json cfg = tied_means_config();
  cfg["sampler"]["lambda"] = 0.9;  // tau = ln 45 / ln 2000 ~= 0.5
  Experiment exp = Experiment::from_json(cfg.dump());
  CHECK_THROWS_WITH_AS(exp.run(), doctest::Contains("lambda"), Error);
}

TEST_CASE("config validation is structural before any computation") {
  CHECK_THROWS_AS(Experiment::from_json("not json"), Error);
  CHECK_THROWS_AS(Experiment::from_json(R"({"sampler": {}})"), Error);
  CHECK_THROWS_AS(
      Experiment::from_json(
          R"({"model": {"kind": "nope", "data": {}},
              "sampler": {"algorithm": "mint"}})"),
      Error);
  json cfg = tied_means_config();
  cfg["thin"] = 0;
  CHECK_THROWS_AS(Experiment::from_json(cfg.dump()), Error);
}

TEST_CASE("a tied-means run produces sane diagnostics") {
  Experiment exp = Experiment::from_json(tied_means_config().dump());
  exp.run();
  const json& diag = exp.diagnostics();
  CHECK(diag["acceptance_rate"].get<double>() > 0.05);
  CHECK(diag["acceptance_rate"].get<double>() < 0.95);
  CHECK(diag["mode_occupancy"].is_array());
  CHECK(diag["evaluations_total"].get<std::uint64_t>() ==
        45ull * (4000 + 500 + 1));
  CHECK(diag["config"]["sampler"]["temperature"].get<double>() ==
        doctest::Approx(std::pow(2000.0, 0.75)));
  CHECK(exp.primary_run().count() == 4000);
}

TEST_CASE("same config and seed give byte-identical outputs") {
  TempDir dir_a("det_a"), dir_b("det_b");
  {
    Experiment exp = Experiment::from_json(tied_means_config().dump());
    exp.run();
    exp.write_outputs(dir_a.path.string());
  }
  {
    Experiment exp = Experiment::from_json(tied_means_config().dump());
    exp.run();
    exp.write_outputs(dir_b.path.string());
  }
  CHECK(slurp(dir_a.file("samples.csv")) == slurp(dir_b.file("samples.csv")));
  CHECK(slurp(dir_a.file("diagnostics.json")) ==
        slurp(dir_b.file("diagnostics.json")));
  CHECK(!slurp(dir_a.file("samples.csv")).empty());
}

TEST_CASE("diagnose reproduces diagnostics.json byte-identically") {
  TempDir dir("diagnose");
  json cfg = tied_means_config();
  cfg["samples"] = 2000;
  cfg["output_dir"] = dir.path.string();
  Experiment exp = Experiment::from_json(cfg.dump());
  exp.run();
  const std::string before = slurp(dir.file("diagnostics.json"));
  REQUIRE(!before.empty());
  diagnose_run_dir(dir.path.string());
  const std::string after = slurp(dir.file("diagnostics.json"));
  CHECK(before == after);
  diagnose_run_dir(dir.path.string());
  CHECK(slurp(dir.file("diagnostics.json")) == after);
}

TEST_CASE("thinning is honored in samples.csv and diagnostics stay stable") {
  TempDir dir("thin");
  json cfg = tied_means_config();
  cfg["samples"] = 1000;
  cfg["thin"] = 10;
  cfg["output_dir"] = dir.path.string();
  Experiment exp = Experiment::from_json(cfg.dump());
  exp.run();
  const std::string csv = slurp(dir.file("samples.csv"));
  std::size_t rows = 0;
  for (const char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == 1 + 100);  // header + every 10th of 1000
  const std::string before = slurp(dir.file("diagnostics.json"));
  diagnose_run_dir(dir.path.string());
  CHECK(slurp(dir.file("diagnostics.json")) == before);
}

TEST_CASE("gen-data: reproducible CSV for the symmetric mixture") {
  TempDir dir("gen");
  const std::string cfg = R"({
    "model": {
      "kind": "symmetric_mixture", "d": 3,
      "theta_star": [2.0, 0.0, 0.0],
      "data": {"source": "generate", "n": 100, "seed": 7}
    },
    "sampler": {"algorithm": "mh"}
  })";
  generate_data_csv(cfg, dir.file("a.csv"));
  generate_data_csv(cfg, dir.file("b.csv"));
  const std::string a = slurp(dir.file("a.csv"));
  CHECK(a == slurp(dir.file("b.csv")));
  std::size_t rows = 0;
  for (const char c : a)
    if (c == '\n') ++rows;
  CHECK(rows == 101);
}

TEST_CASE("generated data can be reloaded through the csv source") {
  TempDir dir("roundtrip");
  const std::string gen_cfg = R"({
    "model": {
      "kind": "tied_means", "theta_star": [0.0, 1.0],
      "data": {"source": "generate", "n": 300, "seed": 5}
    },
    "sampler": {"algorithm": "mh"}
  })";
  generate_data_csv(gen_cfg, dir.file("tied.csv"));

  json cfg = tied_means_config();
  cfg["model"]["data"] =
      json{{"source", "csv"}, {"path", dir.file("tied.csv")}};
  cfg["sampler"]["batch_size"] = 20;
  cfg["samples"] = 500;
  cfg["burn_in"] = 50;
  Experiment exp = Experiment::from_json(cfg.dump());
  exp.run();
  CHECK(exp.primary_run().count() == 500);
}

TEST_CASE("MINT_DATA_DIR resolves relative data paths") {
  TempDir dir("datadir");
  const std::string gen_cfg = R"({
    "model": {
      "kind": "symmetric_mixture", "d": 1, "theta_star": [0.4],
      "data": {"source": "generate", "n": 50, "seed": 2}
    },
    "sampler": {"algorithm": "mh"}
  })";
  generate_data_csv(gen_cfg, dir.file("points.csv"));
  ::setenv("MINT_DATA_DIR", dir.path.string().c_str(), 1);
  CHECK(resolve_data_path("points.csv") == dir.file("points.csv"));
  ::unsetenv("MINT_DATA_DIR");
}

TEST_CASE("run-mintee with K = 1 matches run-mh sample for sample") {
  TempDir dir_ee("k1_ee"), dir_mh("k1_mh");
  const std::string base = R"({
    "model": {
      "kind": "symmetric_mixture", "d": 1, "theta_star": [0.4],
      "data": {"source": "generate", "n": 50, "seed": 17}
    },
    "seed": 91, "samples": 400, "burn_in": 100, "init": [0.0],
    "sampler": {}
  })";
  json ee_cfg = json::parse(base);
  ee_cfg["sampler"] = json::parse(R"({
    "algorithm": "mintee",
    "proposal": {"kind": "random-walk", "step": 0.45},
    "mintee": {"chains": 1, "m_min": 50, "h0": -1e15,
               "initial_step_scale": 0.45,
               "accept_low": 0.0, "accept_high": 1.0}
  })");
  ee_cfg["output_dir"] = dir_ee.path.string();
  json mh_cfg = json::parse(base);
  mh_cfg["sampler"] = json::parse(R"({
    "algorithm": "mh", "temperature": 1.0,
    "proposal": {"kind": "random-walk", "step": 0.45}
  })");
  mh_cfg["output_dir"] = dir_mh.path.string();

  Experiment ee = Experiment::from_json(ee_cfg.dump());
  ee.run();
  Experiment mh = Experiment::from_json(mh_cfg.dump());
  mh.run();
  CHECK(slurp(dir_ee.file("samples.csv")) == slurp(dir_mh.file("samples.csv")));
}

TEST_CASE("mintee runs diagnose byte-identically (ring table carried)") {
  TempDir dir("ee_diag");
  json cfg = json::parse(R"({
    "model": {
      "kind": "symmetric_mixture", "d": 1, "theta_star": [0.4],
      "data": {"source": "generate", "n": 60, "seed": 23}
    },
    "seed": 5, "samples": 400, "burn_in": 100,
    "sampler": {
      "algorithm": "mintee",
      "proposal": {"kind": "langevin"},
      "mintee": {"chains": 3, "m_min": 15, "initial_step_scale": 0.1}
    }
  })");
  cfg["output_dir"] = dir.path.string();
  Experiment exp = Experiment::from_json(cfg.dump());
  exp.run();
  CHECK(!exp.diagnostics()["ring_table"].is_null());
  CHECK(exp.resolved_config()["init"].is_array());  // pilot argmin echoed
  const std::string before = slurp(dir.file("diagnostics.json"));
  diagnose_run_dir(dir.path.string());
  CHECK(slurp(dir.file("diagnostics.json")) == before);
  CHECK(fs::exists(dir.file("ring_table.csv")));
}

TEST_CASE("overrides address nested keys") {
  Experiment exp = Experiment::from_json(tied_means_config().dump());
  exp.override_field("seed", json(99));
  exp.override_field("sampler.proposal.step", json(0.5));
  CHECK(exp.resolved_config()["seed"] == 99);
  CHECK(exp.resolved_config()["sampler"]["proposal"]["step"] == 0.5);
  CHECK_THROWS_AS(exp.override_field("", json(1)), Error);
}

TEST_CASE("normality study runs from a config") {
  json cfg = json::parse(R"({
    "model": {
      "kind": "logistic", "p": 5,
      "theta_star": [1.0, -1.0, 0.5, 0.25, -0.5, 0.2],
      "data": {"source": "generate", "n": 2000, "seed": 3}
    },
    "sampler": {"algorithm": "mint", "batch_size": 100, "lambda": 0.3},
    "diagnostics": {"normality": {"batch_size": 100, "draws": 500}}
  })");
  const json report = normality_from_config(cfg.dump());
  CHECK(report["draws"] == 500);
  CHECK(report["batch_size"] == 100);
  CHECK(std::abs(report["mean"].get<double>()) < 1.0);
  CHECK(report["finite_population_factor"].get<double>() ==
        doctest::Approx((2000.0 - 100.0) / 1999.0));
  CHECK(report["theta"].is_array());
}
