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

#ifndef RTBEXPLORE_BIDDER_H_
#define RTBEXPLORE_BIDDER_H_

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rtbexplore/controller.h"
#include "rtbexplore/ctr_model.h"
#include "rtbexplore/features.h"
#include "rtbexplore/market.h"
#include "rtbexplore/random.h"
#include "rtbexplore/uncertainty.h"

namespace rtbexplore {

enum class GroupPolicy { kControl, kUncertaintyExplore, kRandomExplore };

std::string_view PolicyName(GroupPolicy policy);

struct BidDecision {
  std::uint32_t chosen_ad = 0;
  // Position of the chosen ad in the candidate list.
  std::size_t chosen_index = 0;
  double pctr = 0.0;
  double base_bid = 0.0;
  std::optional<double> modifier;
  double final_bid = 0.0;
  bool explored = false;
  std::optional<UncertaintyEstimate> uncertainty;
  // Controller state the modifier was computed from (uncertainty policy).
  std::optional<ControllerSnapshot> snapshot;
  std::uint64_t forward_passes = 0;
};

// Expected value of an impression under CPC pricing.
constexpr double BaseBid(double pctr, double cpc_goal) {
  return pctr * cpc_goal;
}

// Reservoir of modifiers granted to the uncertainty group, sampled by the
// random group. Besides the modifiers it tracks how often the uncertainty
// group explored over its most recent decisions, so that both groups can
// explore at the same rate.
//
// One writer and one reader may use the pool concurrently.
class ModifierPool {
 public:
  static constexpr std::size_t kDefaultRateWindow = 10000;

  ModifierPool(std::size_t capacity, std::size_t min_fill, std::uint64_t seed,
               std::size_t rate_window = kDefaultRateWindow);

  // Writer side.
  void RecordDecision(std::optional<double> granted);

  // Reader side.
  bool ready() const;
  // Share of the last rate_window recorded decisions that explored.
  double explore_rate() const;
  // Uniform draw from the reservoir; empty while not ready.
  std::optional<double> Sample(Rng& rng) const;

  std::vector<double> Contents() const;
  std::size_t size() const;

 private:
  const std::size_t capacity_;
  const std::size_t min_fill_;
  mutable std::mutex mu_;
  Rng rng_;
  std::vector<double> reservoir_;
  std::uint64_t granted_ = 0;
  // Ring of recent explore flags and the number of set flags in it.
  std::vector<std::uint8_t> recent_;
  std::size_t recent_head_ = 0;
  std::size_t recent_granted_ = 0;
  std::size_t rate_window_ = kDefaultRateWindow;
};

// Exploration hooks a bidder needs for its policy. Control needs none,
// uncertainty exploration needs the controller and writes to the pool,
// random exploration only reads the pool.
struct ExplorationHooks {
  ExplorationController* controller = nullptr;
  ModifierPool* pool = nullptr;
};

class Bidder {
 public:
  Bidder(GroupPolicy policy, const FeatureEncoder& encoder,
         std::uint32_t mc_samples);

  // Scores every ad deterministically, picks the best base bid (ties to the
  // lowest ad_id) and applies the group's exploration strategy.
  BidDecision Decide(const BidRequest& request,
                     std::span<const AdCandidate> ads, const CtrModel& model,
                     const ExplorationHooks& hooks, Rng& rng) const;

  GroupPolicy policy() const { return policy_; }
  std::uint32_t mc_samples() const { return mc_samples_; }

 private:
  GroupPolicy policy_;
  const FeatureEncoder& encoder_;
  std::uint32_t mc_samples_;
};

}  // namespace rtbexplore

#endif  // RTBEXPLORE_BIDDER_H_
