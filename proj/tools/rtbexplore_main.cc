// Copyright 2026 The rtbexplore Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line entry point: run one experiment, sweep seeds, or time the
// model's hot paths.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rtbexplore/config.h"
#include "rtbexplore/ctr_model.h"
#include "rtbexplore/experiment.h"
#include "rtbexplore/report.h"
#include "rtbexplore/sweep.h"
#include "rtbexplore/uncertainty.h"

namespace {

using rtbexplore::ExperimentConfig;

constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;

ExperimentConfig LoadOrDefault(const std::string& path) {
  if (path.empty()) return ExperimentConfig{};
  return rtbexplore::LoadConfigFile(path);
}

void PrintSummary(const rtbexplore::Report& report) {
  std::cerr << "seed " << report.seed << "\n";
  for (const auto& g : report.groups) {
    std::cerr << "  " << rtbexplore::PolicyName(g.policy)
              << " impressions=" << g.ledger.impressions
              << " revenue=" << g.ledger.revenue << " ctr=" << g.ctr
              << " auc=" << g.auc << " logloss=" << g.logloss
              << " mean_unc=" << g.mean_unc << "\n";
  }
}

int CmdRun(const std::string& config_path, const std::string& out_dir,
           const std::vector<std::uint64_t>& seed, bool audit, int verbosity) {
  ExperimentConfig cfg = LoadOrDefault(config_path);
  if (!seed.empty()) cfg.seed = seed.front();
  std::filesystem::create_directories(out_dir);

  std::ofstream audit_out;
  rtbexplore::DecisionObserver observer;
  if (audit) {
    audit_out.open(std::filesystem::path(out_dir) / "audit.jsonl",
                   std::ios::binary);
    if (!audit_out) throw std::runtime_error("cannot open audit log");
    observer = [&audit_out](const rtbexplore::DecisionEvent& e) {
      if (e.phase != rtbexplore::Phase::kOnline ||
          e.group == rtbexplore::GroupPolicy::kControl) {
        return;
      }
      audit_out << rtbexplore::AuditRecord(e).dump() << '\n';
    };
  }
  const rtbexplore::Report report = rtbexplore::RunExperiment(cfg, observer);
  rtbexplore::WriteRunOutputs(out_dir, cfg, report);
  if (verbosity > 0) PrintSummary(report);
  return 0;
}

int CmdSweep(const std::string& config_path, const std::string& out_dir,
             const std::vector<std::uint64_t>& seeds, unsigned jobs,
             int verbosity) {
  const ExperimentConfig cfg = LoadOrDefault(config_path);
  const std::vector<rtbexplore::Report> reports =
      rtbexplore::RunSweep(cfg, seeds, jobs);
  const std::filesystem::path out(out_dir);
  for (const rtbexplore::Report& r : reports) {
    ExperimentConfig seeded = cfg;
    seeded.seed = r.seed;
    rtbexplore::WriteRunOutputs(out / ("seed_" + std::to_string(r.seed)),
                                seeded, r);
    if (verbosity > 0) PrintSummary(r);
  }
  const rtbexplore::SweepCounts counts = rtbexplore::AggregateReports(reports);
  std::ofstream(out / "aggregate.json", std::ios::binary)
      << rtbexplore::AggregateToJson(reports, counts).dump(2) << '\n';
  std::ofstream csv(out / "aggregate.csv", std::ios::binary);
  rtbexplore::WriteAggregateCsv(reports, csv);
  return 0;
}

int CmdBench(const std::string& config_path, std::uint64_t iterations) {
  using Clock = std::chrono::steady_clock;
  const ExperimentConfig cfg = LoadOrDefault(config_path);
  rtbexplore::CtrModel model(cfg.model, cfg.features.hash_space, cfg.seed);
  rtbexplore::Rng rng(cfg.seed);
  rtbexplore::FeatureVector fv;
  for (std::size_t f = 0; f < rtbexplore::kNumFields; ++f) {
    fv.index[f] = 1 + static_cast<std::uint32_t>(
                          rng.UniformInt(cfg.features.hash_space[f] - 1));
  }
  auto time_it = [&](const char* name, auto&& fn) {
    const auto start = Clock::now();
    double sink = 0.0;
    for (std::uint64_t i = 0; i < iterations; ++i) sink += fn();
    const std::chrono::duration<double, std::nano> dt = Clock::now() - start;
    std::cout << name << ": " << dt.count() / static_cast<double>(iterations)
              << " ns/op (checksum " << sink << ")\n";
  };
  time_it("predict", [&] { return model.Predict(fv); });
  time_it("predict_stochastic",
          [&] { return model.PredictStochastic(fv, rng); });
  time_it("mc_estimate", [&] {
    return rtbexplore::EstimateUncertainty(model, fv, cfg.mc_samples, rng).std;
  });
  time_it("train_step",
          [&] { return model.TrainStep(fv, 0, cfg.model.base_lr, rng); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty-driven supply exploration testbed for RTB"};
  app.require_subcommand(1);
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "Print per-group summaries");

  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::uint64_t> seed;
  bool audit = false;
  auto* run = app.add_subcommand("run", "Run one three-group experiment");
  run->add_option("config", config_path, "Config document (JSON)")
      ->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Override the config seed")->expected(1);
  run->add_flag("--audit", audit, "Write audit.jsonl of exploring decisions");

  std::vector<std::uint64_t> seeds;
  unsigned jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Run an experiment per seed");
  sweep->add_option("config", config_path, "Config document (JSON)")
      ->required();
  sweep->add_option("--seeds", seeds, "Comma-separated seeds")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--jobs", jobs, "Seeds run in parallel");

  std::uint64_t iterations = 100000;
  auto* bench = app.add_subcommand("bench", "Time model hot paths");
  bench->add_option("config", config_path, "Config document (JSON)");
  bench->add_option("--iterations", iterations, "Iterations per timing");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return CmdRun(config_path, out_dir, seed, audit, verbosity);
    }
    if (sweep->parsed()) {
      return CmdSweep(config_path, out_dir, seeds, jobs, verbosity);
    }
    if (bench->parsed()) return CmdBench(config_path, iterations);
  } catch (const rtbexplore::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return 0;
}
