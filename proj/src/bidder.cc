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

#include "rtbexplore/bidder.h"

#include <stdexcept>

namespace rtbexplore {

std::string_view PolicyName(GroupPolicy policy) {
  switch (policy) {
    case GroupPolicy::kControl:
      return "control";
    case GroupPolicy::kUncertaintyExplore:
      return "uncertainty";
    case GroupPolicy::kRandomExplore:
      return "random";
  }
  return "unknown";
}

ModifierPool::ModifierPool(std::size_t capacity, std::size_t min_fill,
                           std::uint64_t seed, std::size_t rate_window)
    : capacity_(capacity), min_fill_(min_fill), rng_(seed) {
  if (capacity == 0 || min_fill == 0 || min_fill > capacity) {
    throw std::invalid_argument(
        "modifier pool: require 0 < min_fill <= capacity");
  }
  if (rate_window == 0) {
    throw std::invalid_argument("modifier pool: rate window must be > 0");
  }
  reservoir_.reserve(capacity);
  recent_.reserve(rate_window);
  recent_.resize(0);
  rate_window_ = rate_window;
}

void ModifierPool::RecordDecision(std::optional<double> granted) {
  std::lock_guard<std::mutex> lock(mu_);
  const std::uint8_t flag = granted ? 1 : 0;
  if (recent_.size() < rate_window_) {
    recent_.push_back(flag);
  } else {
    recent_granted_ -= recent_[recent_head_];
    recent_[recent_head_] = flag;
    recent_head_ = (recent_head_ + 1) % rate_window_;
  }
  recent_granted_ += flag;
  if (!granted) return;
  ++granted_;
  if (reservoir_.size() < capacity_) {
    reservoir_.push_back(*granted);
    return;
  }
  const std::uint64_t j = rng_.UniformInt(granted_);
  if (j < capacity_) reservoir_[j] = *granted;
}

bool ModifierPool::ready() const {
  std::lock_guard<std::mutex> lock(mu_);
  return reservoir_.size() >= min_fill_;
}

double ModifierPool::explore_rate() const {
  std::lock_guard<std::mutex> lock(mu_);
  return recent_.empty() ? 0.0
                         : static_cast<double>(recent_granted_) /
                               static_cast<double>(recent_.size());
}

std::optional<double> ModifierPool::Sample(Rng& rng) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (reservoir_.size() < min_fill_) return std::nullopt;
  return reservoir_[rng.UniformInt(reservoir_.size())];
}

std::vector<double> ModifierPool::Contents() const {
  std::lock_guard<std::mutex> lock(mu_);
  return reservoir_;
}

std::size_t ModifierPool::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return reservoir_.size();
}

Bidder::Bidder(GroupPolicy policy, const FeatureEncoder& encoder,
               std::uint32_t mc_samples)
    : policy_(policy), encoder_(encoder), mc_samples_(mc_samples) {
  if (policy_ == GroupPolicy::kUncertaintyExplore && mc_samples_ == 0) {
    throw std::invalid_argument("bidder: mc_samples must be >= 1");
  }
}

BidDecision Bidder::Decide(const BidRequest& request,
                           std::span<const AdCandidate> ads,
                           const CtrModel& model,
                           const ExplorationHooks& hooks, Rng& rng) const {
  if (ads.empty()) throw std::invalid_argument("bidder: empty ad list");
  const std::uint64_t passes_before = model.forward_passes();

  BidDecision d;
  bool have_best = false;
  for (std::size_t i = 0; i < ads.size(); ++i) {
    const double pctr = model.Predict(encoder_.Encode(request, ads[i]));
    const double bid = BaseBid(pctr, ads[i].cpc_goal);
    if (!have_best || bid > d.base_bid ||
        (bid == d.base_bid && ads[i].ad_id < d.chosen_ad)) {
      have_best = true;
      d.chosen_ad = ads[i].ad_id;
      d.chosen_index = i;
      d.pctr = pctr;
      d.base_bid = bid;
    }
  }

  switch (policy_) {
    case GroupPolicy::kControl:
      break;
    case GroupPolicy::kUncertaintyExplore: {
      if (!hooks.controller || !hooks.pool) {
        throw std::invalid_argument(
            "bidder: uncertainty policy needs a controller and a pool");
      }
      const UncertaintyEstimate est =
          EstimateUncertainty(model, encoder_, request, mc_samples_, rng);
      const std::uint64_t key = hooks.controller->DimensionKey(request);
      hooks.controller->Ingest(key, est.std);
      const ControllerSnapshot snap = hooks.controller->Snapshot(key);
      d.modifier = hooks.controller->Modifier(est.std, snap, rng);
      d.uncertainty = est;
      d.snapshot = snap;
      hooks.pool->RecordDecision(d.modifier);
      break;
    }
    case GroupPolicy::kRandomExplore: {
      if (!hooks.pool) {
        throw std::invalid_argument("bidder: random policy needs a pool");
      }
      const ModifierPool& pool = *hooks.pool;
      if (rng.Uniform() < pool.explore_rate()) d.modifier = pool.Sample(rng);
      break;
    }
  }

  d.explored = d.modifier.has_value();
  d.final_bid = d.explored ? d.base_bid * *d.modifier : d.base_bid;
  d.forward_passes = model.forward_passes() - passes_before;
  return d;
}

}  // namespace rtbexplore
