#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "pwl/effective.hpp"
#include "pwl/errors.hpp"
#include "pwl/experiments.hpp"
#include "pwl/io.hpp"
#include "pwl/stats.hpp"

using namespace pwl;
namespace fs = std::filesystem;

namespace {

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pwl_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small-but-nontrivial configs, one per experiment, tuned so the whole
// determinism sweep stays fast.
ExperimentConfig small_config(const std::string& name, const fs::path& dir) {
  ExperimentConfig cfg;
  cfg.seed = 777;
  cfg.output_dir = dir.string();
  cfg.k_range = {2, 3};
  if (name == "lemma1") {
    cfg.n_samples = 1500;  // walks
    cfg.n_steps = 300;     // qualifying-window budget
  } else if (name == "proposition-ak") {
    cfg.n_samples = 300;
  } else if (name == "lemma1.5") {
    cfg.k_range = {3, 5};
    cfg.n_samples = 2000;
  } else if (name == "lemma2") {
    cfg.k_range = {2, 4};
    cfg.n_samples = 200;
  } else if (name == "coupling") {
    cfg.n_samples = 40;
    cfg.n_steps = 1500;
  } else if (name == "theorem-q1") {
    cfg.n_samples = 2000;
    cfg.n_steps = 200;
  } else if (name == "theorem2") {
    cfg.n_samples = 12;
    cfg.n_steps = 2000;
  } else if (name == "lemma3" || name == "lemma4" || name == "lemma5-occupation") {
    cfg.n_samples = 60;
    cfg.n_steps = 3000;
  } else if (name == "lemma6") {
    cfg.n_samples = 25;
    cfg.n_steps = 2000;
  } else if (name == "lemma7-alpha") {
    cfg.n_samples = 30;
    cfg.n_steps = 3000;
  }
  return cfg;
}

}  // namespace

TEST_CASE("every experiment is byte-identical across reruns and thread counts") {
  for (const std::string& name : experiment_names()) {
    CAPTURE(name);
    const fs::path dir_a = fresh_dir(name + "-a");
    const fs::path dir_b = fresh_dir(name + "-b");

    ExperimentConfig cfg_a = small_config(name, dir_a);
    setenv("PWL_THREADS", "1", 1);
    const ExperimentReport rep_a = run_experiment(name, cfg_a);

    // Second run: same config except the (echoed) output directory, with a
    // forced multi-worker pool so merge order is exercised.
    ExperimentConfig cfg_b = small_config(name, dir_b);
    setenv("PWL_THREADS", "4", 1);
    const ExperimentReport rep_b = run_experiment(name, cfg_b);
    unsetenv("PWL_THREADS");

    CHECK(rep_a.passed == rep_b.passed);
    REQUIRE(rep_a.outputs == rep_b.outputs);
    CHECK(!rep_a.outputs.empty());
    for (const std::string& f : rep_a.outputs) {
      CAPTURE(f);
      std::string bytes_a = read_bytes(dir_a / f);
      std::string bytes_b = read_bytes(dir_b / f);
      if (f == name + ".report.json") {
        // The reports echo their own output_dir; normalize that one field.
        const std::string tok_a = "\"output_dir\": \"" + cfg_a.output_dir + "\"";
        const std::string tok_b = "\"output_dir\": \"" + cfg_b.output_dir + "\"";
        const auto pos_a = bytes_a.find(tok_a);
        const auto pos_b = bytes_b.find(tok_b);
        REQUIRE(pos_a != std::string::npos);
        REQUIRE(pos_b != std::string::npos);
        bytes_a.replace(pos_a, tok_a.size(), "\"output_dir\": \"X\"");
        bytes_b.replace(pos_b, tok_b.size(), "\"output_dir\": \"X\"");
      }
      CHECK(bytes_a == bytes_b);
    }

    // CSV format contract: header row, LF-only line endings.
    for (const std::string& f : rep_a.outputs) {
      if (f.size() < 4 || f.substr(f.size() - 4) != ".csv") continue;
      const std::string bytes = read_bytes(dir_a / f);
      CHECK(bytes.find('\r') == std::string::npos);
      CHECK(!bytes.empty());
      CHECK(bytes.back() == '\n');
      const std::string header = bytes.substr(0, bytes.find('\n'));
      CHECK(!header.empty());
    }
  }
}

TEST_CASE("rerunning into the same directory leaves identical bytes") {
  const fs::path dir = fresh_dir("rerun-same-dir");
  ExperimentConfig cfg = small_config("lemma3", dir);
  run_experiment("lemma3", cfg);
  std::map<std::string, std::string> first;
  for (const auto& entry : fs::directory_iterator(dir))
    first[entry.path().filename().string()] = read_bytes(entry.path());
  run_experiment("lemma3", cfg);
  for (const auto& [fname, bytes] : first) {
    CAPTURE(fname);
    CHECK(read_bytes(dir / fname) == bytes);
  }
}

TEST_CASE("unknown experiment names are rejected") {
  ExperimentConfig cfg;
  cfg.output_dir = fresh_dir("unknown").string();
  CHECK_THROWS_AS(run_experiment("lemma99", cfg), UnknownExperiment);
  CHECK_THROWS_AS(run_experiment("", cfg), UnknownExperiment);
}

TEST_CASE("config validation names the offending field") {
  const fs::path dir = fresh_dir("invalid");
  auto expect_invalid = [&](const Json& j, const std::string& needle) {
    CAPTURE(j.dump());
    try {
      ExperimentConfig cfg = config_from_json(j);
      cfg.output_dir = dir.string();
      run_experiment("lemma3", cfg);
      FAIL_CHECK("expected ConfigInvalid mentioning " << needle);
    } catch (const ConfigInvalid& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  expect_invalid(Json{{"n_samples", 0}}, "n_samples");
  expect_invalid(Json{{"n_steps", -5}}, "n_steps");
  expect_invalid(Json{{"delta", -0.1}}, "delta");
  expect_invalid(Json{{"epsilon", 0.0}}, "epsilon");
  expect_invalid(Json{{"grid_step", 2.0}}, "grid_step");
  expect_invalid(Json{{"k_range", Json::array()}}, "k_range");
  expect_invalid(Json{{"k_range", {4, 4}}}, "k_range");
  expect_invalid(Json{{"k_range", {8, 4}}}, "k_range");
  expect_invalid(Json{{"lattice", "hex"}}, "lattice");
  expect_invalid(Json{{"lattice", 3}}, "lattice");
  expect_invalid(Json{{"output_dir", ""}}, "output_dir");
  expect_invalid(Json{{"seed", -1}}, "seed");
  expect_invalid(Json{{"frobnicate", 1}}, "frobnicate");

  // Structural errors.
  CHECK_THROWS_AS(config_from_json(Json::array()), ConfigInvalid);
  CHECK_THROWS_AS(config_from_json(Json("text")), ConfigInvalid);
}

TEST_CASE("config round-trips through JSON") {
  ExperimentConfig cfg;
  cfg.lattice = LatticeKind::kTriangular;
  cfg.n_steps = 4242;
  cfg.n_samples = 17;
  cfg.seed = 987654321;
  cfg.k_range = {3, 9, 27};
  cfg.delta = 0.25;
  cfg.epsilon = 0.05;
  cfg.grid_step = 0.001;
  cfg.output_dir = "some/dir";

  const ExperimentConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.lattice == cfg.lattice);
  CHECK(back.n_steps == cfg.n_steps);
  CHECK(back.n_samples == cfg.n_samples);
  CHECK(back.seed == cfg.seed);
  CHECK(back.k_range == cfg.k_range);
  CHECK(back.delta == doctest::Approx(cfg.delta));
  CHECK(back.epsilon == doctest::Approx(cfg.epsilon));
  CHECK(back.grid_step == doctest::Approx(cfg.grid_step));
  CHECK(back.output_dir == cfg.output_dir);

  // Missing fields keep their defaults.
  const ExperimentConfig defaults = config_from_json(Json::object());
  CHECK(defaults.n_steps == 100000);
  CHECK(defaults.n_samples == 500);
  CHECK(defaults.seed == 12345);
  CHECK(defaults.k_range == std::vector<int>{4, 8, 16, 32, 64});
}

TEST_CASE("probability estimator hits a known exit-law value") {
  // A window of size 2 is left on the very first step iff the increment is
  // nonzero, so P(eta_2 = 1) = 1/2; the DP oracle agrees exactly.
  const ExitDistribution dp = exit_time_dp(2, 10);
  const double exact = dp.p[0];
  CHECK(exact == doctest::Approx(0.5).epsilon(1e-12));

  const Estimate est = estimate_event_probability(
      [](CounterRng& rng) { return exit_time(2, rng).eta == 1; }, 100000, 4242);
  CHECK(std::abs(est.value - exact) < 0.005);
}

TEST_CASE("report JSON carries the full bar structure") {
  const fs::path dir = fresh_dir("report-shape");
  ExperimentConfig cfg = small_config("lemma3", dir);
  const ExperimentReport rep = run_experiment("lemma3", cfg);

  const Json j = read_json_file((dir / "lemma3.report.json").string());
  CHECK(j["experiment"] == "lemma3");
  CHECK(j["passed"].is_boolean());
  CHECK(j["config"]["n_samples"] == cfg.n_samples);
  REQUIRE(j["bars"].is_array());
  REQUIRE(!j["bars"].empty());
  for (const auto& b : j["bars"]) {
    CHECK(b.contains("name"));
    CHECK(b.contains("passed"));
    CHECK(b.contains("value"));
    CHECK(b.contains("threshold"));
    CHECK(b.contains("note"));
  }
  const std::vector<std::string> outs = j["outputs"].get<std::vector<std::string>>();
  CHECK(outs == rep.outputs);
  CHECK(j["passed"].get<bool>() == rep.passed);
}
