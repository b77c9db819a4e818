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

#ifndef RTBEXPLORE_MARKET_H_
#define RTBEXPLORE_MARKET_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rtbexplore/random.h"

namespace rtbexplore {

// Supply side of an impression opportunity.
struct BidRequest {
  std::uint64_t request_id = 0;
  std::uint32_t publisher_id = 0;
  std::uint32_t user_segment = 0;
  std::uint32_t context_slot = 0;
  std::int64_t timestamp = 0;

  bool operator==(const BidRequest&) const = default;
};

// Demand side: one ad of one campaign. cpc_goal is what the advertiser pays
// per click and is shared by all ads of a campaign.
struct AdCandidate {
  std::uint32_t ad_id = 0;
  std::uint32_t campaign_id = 0;
  double cpc_goal = 0.0;

  bool operator==(const AdCandidate&) const = default;
};

// Result of one auction as seen by the bidder. Lost auctions are censored:
// neither the clearing price nor the click can be read.
class AuctionOutcome {
 public:
  static AuctionOutcome Loss() { return AuctionOutcome(); }
  static AuctionOutcome Win(double clearing_price, bool clicked) {
    AuctionOutcome o;
    o.won_ = true;
    o.clearing_price_ = clearing_price;
    o.clicked_ = clicked;
    return o;
  }

  bool won() const { return won_; }
  std::optional<double> clearing_price() const { return clearing_price_; }
  std::optional<bool> clicked() const { return clicked_; }

 private:
  AuctionOutcome() = default;

  bool won_ = false;
  std::optional<double> clearing_price_;
  std::optional<bool> clicked_;
};

// Publishers introduced (and optionally the oldest active ones retired) at a
// given tick.
struct DriftBatch {
  std::int64_t tick = 0;
  std::uint32_t new_publishers = 0;
  std::uint32_t retire_oldest = 0;
};

struct MarketConfig {
  std::uint32_t initial_publishers = 150;
  std::uint32_t num_segments = 8;
  std::uint32_t num_slots = 4;
  std::uint32_t num_campaigns = 12;
  std::uint32_t ads_per_campaign = 5;
  std::uint32_t latent_dim = 4;
  // Standard deviation of every latent coordinate.
  double latent_scale = 0.7;
  double ctr_bias = -4.0;
  double segment_offset_scale = 0.3;
  double floor_price = 0.002;
  // Competitor top bid ~ LogNormal(location, scale) with a per-publisher
  // location drawn from Normal(location_mean, location_spread).
  double competitor_location_mean = -2.3;
  double competitor_location_spread = 0.4;
  double competitor_scale = 0.5;
  double zipf_exponent = 1.1;
  double cpc_goal_min = 0.5;
  double cpc_goal_max = 2.0;
  std::vector<DriftBatch> drift;

  // Throws std::invalid_argument on an inconsistent configuration.
  void Validate() const;
};

struct PublisherProfile {
  std::vector<double> latent;
  // Unnormalized popularity weight (rank^-zipf_exponent).
  double popularity = 0.0;
  double competitor_location = 0.0;
  double competitor_scale = 1.0;
  std::int64_t introduced_at = 0;
  bool active = true;
};

// Ground truth of the simulated market.
struct MarketState {
  std::vector<PublisherProfile> publishers;
  std::vector<std::vector<double>> ad_latents;
  std::vector<double> segment_offsets;
  std::vector<AdCandidate> ads;
  double ctr_bias = -4.0;
  double floor_price = 0.0;
  std::uint32_t num_segments = 1;
  std::uint32_t num_slots = 1;
};

// Raised when a request or ad refers to an id the market does not know.
class CatalogMismatch : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Synthetic RTB environment. Generates requests one tick at a time, applies
// the drift schedule as ticks are reached, and runs second-price auctions.
class Market {
 public:
  Market(MarketConfig config, std::uint64_t seed);
  // Uses a caller-built ground truth; config supplies drift and sampling
  // parameters only.
  Market(MarketConfig config, MarketState state, std::uint64_t seed);

  // Draws the request for the current tick and advances the tick. Drift
  // scheduled for the current tick is applied first.
  BidRequest GenRequest(Rng& rng);

  // Applies every drift batch scheduled exactly at `tick`. Each tick is
  // applied at most once; ticks at or before the last applied one are no-ops.
  void DriftStep(std::int64_t tick);

  double TrueCtr(const BidRequest& request, const AdCandidate& ad) const;

  // Second-price auction against the publisher's competitor distribution.
  // Ties lose. The competitor draw is always consumed before the click draw.
  AuctionOutcome RunAuction(double bid, const BidRequest& request,
                            const AdCandidate& ad, Rng& rng) const;

  // Uniform sample of k distinct catalog ads (k clamped to catalog size),
  // in the order drawn.
  std::vector<AdCandidate> SampleCandidates(std::size_t k, Rng& rng) const;

  const MarketState& state() const { return state_; }
  const MarketConfig& config() const { return config_; }
  std::span<const std::uint32_t> active_publishers() const {
    return active_;
  }
  std::int64_t tick() const { return tick_; }

 private:
  void AddPublisher(std::int64_t tick, double rank);
  void RebuildPopularity();

  MarketConfig config_;
  MarketState state_;
  Rng drift_rng_;
  std::vector<std::uint32_t> active_;
  // Cumulative popularity over active_ for inverse-CDF sampling.
  std::vector<double> cumulative_;
  std::int64_t tick_ = 0;
  std::int64_t last_drift_tick_ = -1;
  std::uint64_t next_request_id_ = 0;
};

}  // namespace rtbexplore

#endif  // RTBEXPLORE_MARKET_H_
