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

#ifndef RTBEXPLORE_SWEEP_H_
#define RTBEXPLORE_SWEEP_H_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <vector>

#include "json.hpp"
#include "rtbexplore/experiment.h"

namespace rtbexplore {

// Seed counts in the improvement direction of each metric (higher revenue,
// CTR and AUC; lower log loss and uncertainty).
struct SweepCounts {
  std::uint32_t seeds = 0;
  std::uint32_t uncertainty_beats_control_auc = 0;
  std::uint32_t uncertainty_beats_control_logloss = 0;
  std::uint32_t uncertainty_ge_random_revenue = 0;
  std::uint32_t uncertainty_ge_random_ctr = 0;
  std::uint32_t uncertainty_ge_random_auc = 0;
  std::uint32_t uncertainty_ge_random_logloss = 0;
  // Strictly lower mean holdout uncertainty than the random group.
  std::uint32_t uncertainty_lower_unc_than_random = 0;
  // Higher AUC and lower log loss than control, and AUC >= and log loss <=
  // the random group, all in the same seed.
  std::uint32_t directional_reproduction = 0;
};

SweepCounts AggregateReports(std::span<const Report> reports);

nlohmann::ordered_json AggregateToJson(std::span<const Report> reports,
                                       const SweepCounts& counts);

// Columns: seed,group,delta_revenue,delta_ctr,delta_auc,delta_logloss,
// delta_mean_unc; one row per (seed, group).
void WriteAggregateCsv(std::span<const Report> reports, std::ostream& out);

// Runs `base` once per seed (seed field replaced). Up to `jobs` runs execute
// concurrently; the result is ordered like `seeds` regardless of jobs.
std::vector<Report> RunSweep(const ExperimentConfig& base,
                             std::span<const std::uint64_t> seeds,
                             unsigned jobs = 1);

// Writes report.json, report.csv and config.json (effective config) into
// `dir`, creating it if needed.
void WriteRunOutputs(const std::filesystem::path& dir,
                     const ExperimentConfig& config, const Report& report);

}  // namespace rtbexplore

#endif  // RTBEXPLORE_SWEEP_H_
