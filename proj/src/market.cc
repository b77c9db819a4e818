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

#include "rtbexplore/market.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace rtbexplore {
namespace {

double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<double> SampleLatent(std::uint32_t dim, double scale, Rng& rng) {
  std::vector<double> v(dim);
  for (double& x : v) x = scale * rng.Normal();
  return v;
}

}  // namespace

void MarketConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("market: " + what);
  };
  if (initial_publishers == 0) fail("initial_publishers must be > 0");
  if (num_segments == 0) fail("num_segments must be > 0");
  if (num_slots == 0) fail("num_slots must be > 0");
  if (num_campaigns == 0 || ads_per_campaign == 0) fail("empty ad catalog");
  if (!(latent_scale >= 0.0) || !std::isfinite(latent_scale))
    fail("latent_scale must be finite and >= 0");
  if (!(competitor_scale > 0.0) || !std::isfinite(competitor_scale))
    fail("competitor_scale must be > 0");
  if (!(competitor_location_spread >= 0.0))
    fail("competitor_location_spread must be >= 0");
  if (!(floor_price >= 0.0)) fail("floor_price must be >= 0");
  if (!(zipf_exponent > 0.0)) fail("zipf_exponent must be > 0");
  if (!(cpc_goal_min > 0.0) || cpc_goal_max < cpc_goal_min)
    fail("cpc goal range must satisfy 0 < min <= max");
  for (const DriftBatch& b : drift) {
    if (b.tick < 0) fail("drift tick must be >= 0");
  }
}

Market::Market(MarketConfig config, std::uint64_t seed)
    : config_(std::move(config)), drift_rng_(DeriveSeed(seed, "drift")) {
  config_.Validate();
  Rng rng(DeriveSeed(seed, "catalog"));
  state_.ctr_bias = config_.ctr_bias;
  state_.floor_price = config_.floor_price;
  state_.num_segments = config_.num_segments;
  state_.num_slots = config_.num_slots;

  state_.segment_offsets.resize(config_.num_segments);
  for (double& o : state_.segment_offsets) {
    o = config_.segment_offset_scale * rng.Normal();
  }

  for (std::uint32_t c = 0; c < config_.num_campaigns; ++c) {
    const double goal =
        config_.cpc_goal_min +
        (config_.cpc_goal_max - config_.cpc_goal_min) * rng.Uniform();
    for (std::uint32_t k = 0; k < config_.ads_per_campaign; ++k) {
      AdCandidate ad;
      ad.ad_id = static_cast<std::uint32_t>(state_.ads.size());
      ad.campaign_id = c;
      ad.cpc_goal = goal;
      state_.ads.push_back(ad);
      state_.ad_latents.push_back(
          SampleLatent(config_.latent_dim, config_.latent_scale, rng));
    }
  }

  // Initial publishers take the Zipf ranks 1..P in shuffled order.
  std::vector<double> ranks(config_.initial_publishers);
  std::iota(ranks.begin(), ranks.end(), 1.0);
  for (std::size_t i = ranks.size(); i > 1; --i) {
    std::swap(ranks[i - 1], ranks[rng.UniformInt(i)]);
  }
  // Publisher latents for the initial population come from the drift stream
  // as well, so that every publisher is drawn by the same generator.
  for (double r : ranks) AddPublisher(0, r);
  RebuildPopularity();
}

Market::Market(MarketConfig config, MarketState state, std::uint64_t seed)
    : config_(std::move(config)),
      state_(std::move(state)),
      drift_rng_(DeriveSeed(seed, "drift")) {
  for (std::uint32_t i = 0; i < state_.publishers.size(); ++i) {
    if (state_.publishers[i].active) active_.push_back(i);
  }
  if (active_.empty()) {
    throw std::invalid_argument("market: state has no active publisher");
  }
  RebuildPopularity();
}

void Market::AddPublisher(std::int64_t tick, double rank) {
  PublisherProfile p;
  p.latent =
      SampleLatent(config_.latent_dim, config_.latent_scale, drift_rng_);
  p.popularity = std::pow(rank, -config_.zipf_exponent);
  p.competitor_location =
      config_.competitor_location_mean +
      config_.competitor_location_spread * drift_rng_.Normal();
  p.competitor_scale = config_.competitor_scale;
  p.introduced_at = tick;
  p.active = true;
  active_.push_back(static_cast<std::uint32_t>(state_.publishers.size()));
  state_.publishers.push_back(std::move(p));
}

void Market::RebuildPopularity() {
  cumulative_.resize(active_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < active_.size(); ++i) {
    total += state_.publishers[active_[i]].popularity;
    cumulative_[i] = total;
  }
}

void Market::DriftStep(std::int64_t tick) {
  if (tick <= last_drift_tick_) return;
  last_drift_tick_ = tick;
  bool changed = false;
  for (const DriftBatch& batch : config_.drift) {
    if (batch.tick != tick) continue;
    const std::size_t retire =
        std::min<std::size_t>(batch.retire_oldest, active_.size());
    for (std::size_t i = 0; i < retire; ++i) {
      state_.publishers[active_[i]].active = false;
    }
    active_.erase(active_.begin(), active_.begin() + retire);
    for (std::uint32_t k = 0; k < batch.new_publishers; ++k) {
      const double rank = static_cast<double>(
          1 + drift_rng_.UniformInt(config_.initial_publishers));
      AddPublisher(tick, rank);
    }
    changed = true;
  }
  if (active_.empty()) {
    throw std::logic_error("market: drift retired every publisher");
  }
  if (changed) RebuildPopularity();
}

BidRequest Market::GenRequest(Rng& rng) {
  DriftStep(tick_);
  BidRequest r;
  r.request_id = next_request_id_++;
  r.timestamp = tick_++;
  const double u = rng.Uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  r.publisher_id = active_[static_cast<std::size_t>(it - cumulative_.begin())];
  r.user_segment = static_cast<std::uint32_t>(rng.UniformInt(state_.num_segments));
  r.context_slot = static_cast<std::uint32_t>(rng.UniformInt(state_.num_slots));
  return r;
}

double Market::TrueCtr(const BidRequest& request, const AdCandidate& ad) const {
  if (request.publisher_id >= state_.publishers.size()) {
    throw CatalogMismatch("unknown publisher " +
                          std::to_string(request.publisher_id));
  }
  if (request.user_segment >= state_.segment_offsets.size()) {
    throw CatalogMismatch("unknown segment " +
                          std::to_string(request.user_segment));
  }
  if (ad.ad_id >= state_.ad_latents.size()) {
    throw CatalogMismatch("unknown ad " + std::to_string(ad.ad_id));
  }
  const std::vector<double>& u = state_.publishers[request.publisher_id].latent;
  const std::vector<double>& v = state_.ad_latents[ad.ad_id];
  if (u.size() != v.size()) {
    throw CatalogMismatch("latent dimension mismatch");
  }
  double z = state_.ctr_bias + state_.segment_offsets[request.user_segment];
  for (std::size_t k = 0; k < u.size(); ++k) z += u[k] * v[k];
  return Sigmoid(z);
}

AuctionOutcome Market::RunAuction(double bid, const BidRequest& request,
                                  const AdCandidate& ad, Rng& rng) const {
  if (!(bid >= 0.0) || !std::isfinite(bid)) {
    throw std::invalid_argument("auction: bid must be finite and >= 0");
  }
  if (request.publisher_id >= state_.publishers.size()) {
    throw CatalogMismatch("unknown publisher " +
                          std::to_string(request.publisher_id));
  }
  const PublisherProfile& p = state_.publishers[request.publisher_id];
  const double competitor =
      std::exp(p.competitor_location + p.competitor_scale * rng.Normal());
  const double price = std::max(competitor, state_.floor_price);
  if (!(bid > price)) return AuctionOutcome::Loss();
  const bool clicked = rng.Bernoulli(TrueCtr(request, ad));
  return AuctionOutcome::Win(price, clicked);
}

std::vector<AdCandidate> Market::SampleCandidates(std::size_t k,
                                                  Rng& rng) const {
  const std::size_t n = state_.ads.size();
  k = std::min(k, n);
  // Partial Fisher-Yates over an index permutation.
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  std::vector<AdCandidate> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.UniformInt(n - i);
    std::swap(idx[i], idx[j]);
    out.push_back(state_.ads[idx[i]]);
  }
  return out;
}

}  // namespace rtbexplore
