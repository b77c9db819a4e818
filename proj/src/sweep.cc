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

#include "rtbexplore/sweep.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rtbexplore/config.h"
#include "rtbexplore/report.h"

namespace rtbexplore {
namespace {

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

SweepCounts AggregateReports(std::span<const Report> reports) {
  SweepCounts c;
  for (const Report& r : reports) {
    const GroupResult& ctl = r.group(GroupPolicy::kControl);
    const GroupResult& unc = r.group(GroupPolicy::kUncertaintyExplore);
    const GroupResult& rnd = r.group(GroupPolicy::kRandomExplore);
    ++c.seeds;
    const bool auc_ctl = unc.auc > ctl.auc;
    const bool ll_ctl = unc.logloss < ctl.logloss;
    const bool auc_rnd = unc.auc >= rnd.auc;
    const bool ll_rnd = unc.logloss <= rnd.logloss;
    c.uncertainty_beats_control_auc += auc_ctl;
    c.uncertainty_beats_control_logloss += ll_ctl;
    c.uncertainty_ge_random_revenue += unc.ledger.revenue >= rnd.ledger.revenue;
    c.uncertainty_ge_random_ctr += unc.ctr >= rnd.ctr;
    c.uncertainty_ge_random_auc += auc_rnd;
    c.uncertainty_ge_random_logloss += ll_rnd;
    c.uncertainty_lower_unc_than_random += unc.mean_unc < rnd.mean_unc;
    c.directional_reproduction += auc_ctl && ll_ctl && auc_rnd && ll_rnd;
  }
  return c;
}

nlohmann::ordered_json AggregateToJson(std::span<const Report> reports,
                                       const SweepCounts& c) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const Report& r : reports) {
    for (const GroupResult& g : r.groups) {
      rows.push_back({{"seed", r.seed},
                      {"group", std::string(PolicyName(g.policy))},
                      {"delta_revenue", g.delta_revenue},
                      {"delta_ctr", g.delta_ctr},
                      {"delta_auc", g.delta_auc},
                      {"delta_logloss", g.delta_logloss},
                      {"delta_mean_unc", g.delta_mean_unc}});
    }
  }
  j["rows"] = std::move(rows);
  j["counts"] = {
      {"seeds", c.seeds},
      {"uncertainty_beats_control_auc", c.uncertainty_beats_control_auc},
      {"uncertainty_beats_control_logloss",
       c.uncertainty_beats_control_logloss},
      {"uncertainty_ge_random_revenue", c.uncertainty_ge_random_revenue},
      {"uncertainty_ge_random_ctr", c.uncertainty_ge_random_ctr},
      {"uncertainty_ge_random_auc", c.uncertainty_ge_random_auc},
      {"uncertainty_ge_random_logloss", c.uncertainty_ge_random_logloss},
      {"uncertainty_lower_unc_than_random",
       c.uncertainty_lower_unc_than_random},
      {"directional_reproduction", c.directional_reproduction},
  };
  const auto majority = [&](std::uint32_t k) { return 2 * k > c.seeds; };
  j["majority"] = {
      {"uncertainty_ge_random_revenue", majority(c.uncertainty_ge_random_revenue)},
      {"uncertainty_ge_random_ctr", majority(c.uncertainty_ge_random_ctr)},
      {"uncertainty_ge_random_auc", majority(c.uncertainty_ge_random_auc)},
      {"uncertainty_ge_random_logloss", majority(c.uncertainty_ge_random_logloss)},
      {"uncertainty_lower_unc_than_random",
       majority(c.uncertainty_lower_unc_than_random)},
  };
  return j;
}

void WriteAggregateCsv(std::span<const Report> reports, std::ostream& out) {
  out << "seed,group,delta_revenue,delta_ctr,delta_auc,delta_logloss,"
         "delta_mean_unc\n";
  for (const Report& r : reports) {
    for (const GroupResult& g : r.groups) {
      out << r.seed << ',' << PolicyName(g.policy) << ','
          << FormatDouble(g.delta_revenue) << ',' << FormatDouble(g.delta_ctr)
          << ',' << FormatDouble(g.delta_auc) << ','
          << FormatDouble(g.delta_logloss) << ','
          << FormatDouble(g.delta_mean_unc) << '\n';
    }
  }
}

std::vector<Report> RunSweep(const ExperimentConfig& base,
                             std::span<const std::uint64_t> seeds,
                             unsigned jobs) {
  if (seeds.empty()) throw std::invalid_argument("sweep: no seeds");
  std::vector<Report> reports(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        ExperimentConfig cfg = base;
        cfg.seed = seeds[i];
        reports[i] = RunExperiment(cfg);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  jobs = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(seeds.size()));
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  return reports;
}

void WriteRunOutputs(const std::filesystem::path& dir,
                     const ExperimentConfig& config, const Report& report) {
  std::filesystem::create_directories(dir);
  WriteFile(dir / "report.json", ReportToJson(report).dump(2) + "\n");
  std::ostringstream csv;
  WriteReportCsv(report, csv);
  WriteFile(dir / "report.csv", csv.str());
  WriteFile(dir / "config.json", ConfigToJson(config).dump(2) + "\n");
}

}  // namespace rtbexplore
