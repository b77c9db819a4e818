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

#ifndef RTBEXPLORE_EXPERIMENT_H_
#define RTBEXPLORE_EXPERIMENT_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rtbexplore/bidder.h"
#include "rtbexplore/controller.h"
#include "rtbexplore/ctr_model.h"
#include "rtbexplore/features.h"
#include "rtbexplore/market.h"

namespace rtbexplore {

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::uint64_t n_warmup_requests = 200000;
  std::uint64_t n_online_requests = 600000;
  std::uint64_t n_holdout_requests = 100000;
  std::uint32_t ads_per_request = 10;
  // MC-dropout samples per request.
  std::uint32_t mc_samples = 30;
  std::uint32_t pool_capacity = 50000;
  std::uint32_t pool_min_fill = 1000;
  MarketConfig market;
  FeatureConfig features;
  ModelConfig model;
  ControllerConfig controller;

  void Validate() const;
};

inline constexpr std::size_t kNumGroups = 3;
// Group order used everywhere: control, uncertainty, random.
inline constexpr std::array<GroupPolicy, kNumGroups> kGroupOrder = {
    GroupPolicy::kControl, GroupPolicy::kUncertaintyExplore,
    GroupPolicy::kRandomExplore};

struct GroupLedger {
  std::uint64_t requests = 0;
  std::uint64_t impressions = 0;
  std::uint64_t clicks = 0;
  std::uint64_t training_events = 0;
  std::uint64_t explored = 0;
  double spend = 0.0;
  double revenue = 0.0;
};

struct GroupResult {
  GroupPolicy policy = GroupPolicy::kControl;
  GroupLedger ledger;
  // Online KPIs.
  double ctr = 0.0;
  double mean_modifier = 0.0;
  // Campaigns whose spend exceeded cpc_goal * clicks.
  std::uint32_t campaigns_over_cpc_goal = 0;
  bool business_constraints_met = true;
  // Offline metrics on the held-out requests.
  double auc = 0.0;
  double logloss = 0.0;
  double mean_unc = 0.0;
  // Log loss restricted to publishers introduced by drift.
  double logloss_new_publishers = 0.0;

  // Relative change vs. control, (group - control) / control.
  double delta_revenue = 0.0;
  double delta_ctr = 0.0;
  double delta_auc = 0.0;
  double delta_logloss = 0.0;
  double delta_mean_unc = 0.0;
};

struct Report {
  std::uint64_t seed = 0;
  std::uint64_t warmup_impressions = 0;
  std::uint64_t holdout_requests = 0;
  std::uint64_t holdout_positives = 0;
  std::uint64_t holdout_new_publisher_requests = 0;
  // Reference points: ground-truth CTR used as the score.
  double holdout_oracle_auc = 0.0;
  double holdout_oracle_logloss = 0.0;
  std::uint32_t active_publishers_at_end = 0;
  std::array<GroupResult, kNumGroups> groups;

  const GroupResult& group(GroupPolicy policy) const;
};

enum class Phase { kWarmup, kOnline };

// Emitted after every auction of the warm-up and online phases.
struct DecisionEvent {
  Phase phase = Phase::kOnline;
  GroupPolicy group = GroupPolicy::kControl;
  const BidRequest* request = nullptr;
  std::size_t num_ads = 0;
  std::uint32_t mc_samples = 0;
  std::uint64_t dimension_key = 0;
  const BidDecision* decision = nullptr;
  const AuctionOutcome* outcome = nullptr;
};

using DecisionObserver = std::function<void(const DecisionEvent&)>;

// (g - control) / control, 0 when control is 0.
double RelativeDelta(double group, double control);

// Runs warm-up, the three-group online phase and the offline evaluation.
// Deterministic for a given config.
Report RunExperiment(const ExperimentConfig& config,
                     const DecisionObserver& observer = {});

// (mean_unc_random - mean_unc_uncertainty) / mean_unc_random.
double HoldoutUncertaintyGap(const Report& report);

}  // namespace rtbexplore

#endif  // RTBEXPLORE_EXPERIMENT_H_
