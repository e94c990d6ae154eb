// pwl: command-line laboratory for kinetic prudent walks.
//
//   pwl simulate   --lattice {square|tri} --steps N --seed S [--dump-path F]
//   pwl exit-times --L L --samples N --seed S --out DIR
//   pwl experiment NAME --config FILE.json [--out DIR]
//   pwl report     --dir DIR
//
// Exit codes: 0 = all pass bars held, 1 = at least one bar failed,
// 2 = usage or configuration error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pwl/effective.hpp"
#include "pwl/errors.hpp"
#include "pwl/experiments.hpp"
#include "pwl/io.hpp"
#include "pwl/lattice.hpp"
#include "pwl/prudent.hpp"
#include "pwl/stats.hpp"

namespace {

pwl::LatticeKind parse_lattice(const std::string& s) {
  if (s == "square") return pwl::LatticeKind::kSquare;
  if (s == "tri") return pwl::LatticeKind::kTriangular;
  throw pwl::ConfigInvalid("lattice: expected \"square\" or \"tri\", got \"" + s + "\"");
}

int run_simulate(const std::string& lattice, long long steps, std::uint64_t seed,
                 const std::string& dump_path) {
  const pwl::LatticeKind kind = parse_lattice(lattice);
  if (steps < 1) throw pwl::ConfigInvalid("steps: must be positive");
  const pwl::PrudentWalk walk = pwl::simulate(kind, steps, seed, /*track_visited=*/false);

  if (!dump_path.empty()) {
    std::ofstream out(dump_path, std::ios::binary);
    if (!out) throw pwl::ConfigInvalid("cannot open dump file: " + dump_path);
    const pwl::BoxDimsTimeline dims(walk);
    const auto& sites = walk.sites();
    for (std::size_t t = 0; t < sites.size(); ++t) {
      pwl::Json line;
      line["t"] = (long long)t;
      line["a"] = sites[t].a;
      line["b"] = sites[t].b;
      line["W"] = dims.width_at((long long)t);
      line["H"] = dims.height_at((long long)t);
      out << line.dump() << '\n';
    }
  }

  pwl::Json summary;
  summary["lattice"] = lattice;
  summary["steps_requested"] = steps;
  summary["steps_taken"] = walk.time();
  summary["trapped"] = walk.trapped();
  const pwl::LatticePoint end = walk.position();
  const pwl::PlanePoint e = pwl::embed(kind, end);
  summary["endpoint"] = pwl::Json{{"a", end.a}, {"b", end.b}, {"x", e.x}, {"y", e.y}};
  summary["box"] =
      pwl::Json{{"W", walk.box().width()}, {"H", walk.box().height()}};
  summary["n_growth_events"] = (long long)walk.growth_events().size();
  if (!dump_path.empty()) summary["dump_path"] = dump_path;
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int run_exit_times(int L, long long samples, std::uint64_t seed, const std::string& out_dir) {
  if (samples < 1) throw pwl::ConfigInvalid("samples: must be positive");
  pwl::ensure_directory(out_dir);
  const std::vector<pwl::ExitSample> draws = pwl::exit_samples(L, samples, seed);

  long long max_eta = 1;
  for (const pwl::ExitSample& s : draws) max_eta = std::max(max_eta, s.eta);
  const long long n_max = std::min<long long>(max_eta, 10000);

  std::vector<long long> counts((std::size_t)n_max, 0);
  long long beyond = 0;
  for (const pwl::ExitSample& s : draws) {
    if (s.eta <= n_max)
      ++counts[(std::size_t)s.eta - 1];
    else
      ++beyond;
  }
  const pwl::ExitDistribution dp = pwl::exit_time_dp(L, n_max);

  const std::string path =
      (std::filesystem::path(out_dir) / ("exit-times-L" + std::to_string(L) + ".csv")).string();
  pwl::CsvWriter csv(path, {"L", "m", "p_exact", "p_empirical", "stderr"});
  for (long long m = 1; m <= n_max; ++m) {
    const double emp = (double)counts[(std::size_t)m - 1] / (double)samples;
    csv.row_builder()
        .add(L)
        .add(m)
        .add(dp.p[(std::size_t)m - 1])
        .add(emp)
        .add(std::sqrt(std::max(emp * (1.0 - emp), 0.0) / (double)samples))
        .done();
  }
  const double tail_emp = (double)beyond / (double)samples;
  csv.row_builder()
      .add(L)
      .add((long long)-1)
      .add(dp.tail)
      .add(tail_emp)
      .add(std::sqrt(std::max(tail_emp * (1.0 - tail_emp), 0.0) / (double)samples))
      .done();

  pwl::Json summary;
  summary["L"] = L;
  summary["n_samples"] = samples;
  summary["n_max"] = n_max;
  summary["tv_distance"] = pwl::tv_distance(counts, beyond, dp.p, dp.tail);
  summary["csv"] = path;
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int run_experiment_cmd(const std::string& name, const std::string& config_path,
                       const std::string& out_override) {
  pwl::ExperimentConfig cfg = pwl::config_from_json(pwl::read_json_file(config_path));
  if (!out_override.empty()) cfg.output_dir = out_override;
  const pwl::ExperimentReport rep = pwl::run_experiment(name, cfg);
  for (const pwl::BarResult& b : rep.bars) {
    std::printf("[%s] %-24s value=%.6g threshold=%.6g\n", b.passed ? "PASS" : "FAIL",
                b.name.c_str(), b.value, b.threshold);
  }
  std::printf("%s: %s (%zu bar%s, outputs in %s)\n", rep.experiment.c_str(),
              rep.passed ? "PASS" : "FAIL", rep.bars.size(), rep.bars.size() == 1 ? "" : "s",
              cfg.output_dir.c_str());
  return rep.passed ? 0 : 1;
}

int run_report(const std::string& dir) {
  std::vector<std::string> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const std::string fname = entry.path().filename().string();
    if (fname.size() > 12 && fname.substr(fname.size() - 12) == ".report.json")
      files.push_back(entry.path().string());
  }
  if (ec) throw pwl::ConfigInvalid("cannot read directory " + dir + ": " + ec.message());
  if (files.empty()) throw pwl::ConfigInvalid("no *.report.json files in " + dir);
  std::sort(files.begin(), files.end());

  bool all_passed = true;
  for (const std::string& f : files) {
    const pwl::Json j = pwl::read_json_file(f);
    const bool passed = j.value("passed", false);
    all_passed = all_passed && passed;
    std::printf("[%s] %s\n", passed ? "PASS" : "FAIL",
                j.value("experiment", std::string("?")).c_str());
    if (j.contains("bars")) {
      for (const auto& b : j["bars"]) {
        std::printf("       %s %-24s value=%.6g threshold=%.6g\n",
                    b.value("passed", false) ? "pass" : "FAIL",
                    b.value("name", std::string("?")).c_str(), b.value("value", 0.0),
                    b.value("threshold", 0.0));
      }
    }
  }
  std::printf("%s: %zu report%s\n", all_passed ? "PASS" : "FAIL", files.size(),
              files.size() == 1 ? "" : "s");
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo laboratory for kinetic prudent walks"};
  app.require_subcommand(1);

  std::string lattice = "square";
  long long steps = 1000;
  std::uint64_t seed = 12345;
  std::string dump_path;
  CLI::App* sim = app.add_subcommand("simulate", "run one walk and print a summary");
  sim->add_option("--lattice", lattice, "square or tri")->required();
  sim->add_option("--steps", steps, "number of steps")->required();
  sim->add_option("--seed", seed, "random seed")->required();
  sim->add_option("--dump-path", dump_path,
                  "write the trajectory as NDJSON lines {t,a,b,W,H}");

  int L = 5;
  long long samples = 10000;
  std::uint64_t et_seed = 12345;
  std::string out_dir = "out";
  CLI::App* et = app.add_subcommand(
      "exit-times", "sample window exit times and compare to the exact law");
  et->add_option("--L", L, "window size (1..64)")->required();
  et->add_option("--samples", samples, "number of Monte Carlo samples")->required();
  et->add_option("--seed", et_seed, "random seed")->required();
  et->add_option("--out", out_dir, "output directory")->required();

  std::string exp_name, config_path, exp_out;
  CLI::App* exp = app.add_subcommand("experiment", "run one named experiment suite");
  exp->add_option("name", exp_name, "experiment name")->required();
  exp->add_option("--config", config_path, "JSON configuration file")->required();
  exp->add_option("--out", exp_out, "override the configured output directory");

  std::string report_dir;
  CLI::App* rpt = app.add_subcommand("report", "aggregate pass/fail over saved reports");
  rpt->add_option("--dir", report_dir, "directory holding *.report.json files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) return run_simulate(lattice, steps, seed, dump_path);
    if (et->parsed()) return run_exit_times(L, samples, et_seed, out_dir);
    if (exp->parsed()) return run_experiment_cmd(exp_name, config_path, exp_out);
    return run_report(report_dir);
  } catch (const pwl::ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const pwl::UnknownExperiment& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const pwl::ScaleExceeded& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
