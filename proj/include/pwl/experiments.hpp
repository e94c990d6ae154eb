#pragma once
// Named experiment suites: each runs a seeded estimator battery, writes
// plot-ready CSV plus a JSON report (config echo, estimates, pass/fail bars),
// and returns the report.  All outputs are byte-identical across reruns with
// the same config.

#include <cstdint>
#include <string>
#include <vector>

#include "pwl/io.hpp"
#include "pwl/lattice.hpp"

namespace pwl {

struct ExperimentConfig {
  LatticeKind lattice = LatticeKind::kSquare;
  long long n_steps = 100000;
  long long n_samples = 500;
  std::uint64_t seed = 12345;
  std::vector<int> k_range{4, 8, 16, 32, 64};
  double delta = 0.1;
  double epsilon = 0.1;
  double grid_step = 1e-4;
  std::string output_dir = "out";
};

// JSON mirror, field for field.  Missing fields keep defaults; unknown
// fields, wrong types, or out-of-range values throw ConfigInvalid naming the
// offending field.
ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& cfg);

// One acceptance bar: a named scalar compared against a threshold.
struct BarResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct ExperimentReport {
  std::string experiment;
  ExperimentConfig config;
  Json details;                       // experiment-specific scalars and tables
  std::vector<BarResult> bars;
  bool passed = false;                // conjunction of all bars
  std::vector<std::string> outputs;   // files written (relative to output_dir)
};

Json report_to_json(const ExperimentReport& rep);

// Valid experiment names, in canonical order.
const std::vector<std::string>& experiment_names();

// Runs one experiment, writing <output_dir>/<name>.csv (and friends) plus
// <output_dir>/<name>.report.json.  Throws UnknownExperiment for a bad name
// and ConfigInvalid for unusable configuration.
ExperimentReport run_experiment(const std::string& name, const ExperimentConfig& cfg);

}  // namespace pwl
