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

#include "rtbexplore/experiment.h"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "rtbexplore/metrics.h"
#include "rtbexplore/uncertainty.h"

namespace rtbexplore {
namespace {

// A won impression, tagged with the group that bought it.
struct TrainingEvent {
  std::size_t group = 0;
  FeatureVector features;
  int label = 0;
};

struct Group {
  Group(std::size_t id, GroupPolicy policy, CtrModel model,
        const FeatureEncoder& encoder, const ExperimentConfig& cfg)
      : id(id),
        policy(policy),
        model(std::move(model)),
        bidder(policy, encoder, cfg.mc_samples),
        bid_rng(DeriveSeed(cfg.seed, "bidder/" + std::string(PolicyName(policy)))),
        auction_rng(
            DeriveSeed(cfg.seed, "auction/" + std::string(PolicyName(policy)))),
        train_rng(DeriveSeed(cfg.seed, "train/" + std::string(PolicyName(policy)))),
        campaign_spend(cfg.market.num_campaigns, 0.0),
        campaign_clicks(cfg.market.num_campaigns, 0) {}

  void Train(const TrainingEvent& event, double base_lr) {
    if (event.group != id) {
      throw std::logic_error("experiment: training event crossed groups");
    }
    model.TrainStep(event.features, event.label, base_lr, train_rng);
    ++ledger.training_events;
  }

  std::size_t id;
  GroupPolicy policy;
  CtrModel model;
  Bidder bidder;
  Rng bid_rng;
  Rng auction_rng;
  Rng train_rng;
  GroupLedger ledger;
  std::vector<double> campaign_spend;
  std::vector<std::uint64_t> campaign_clicks;
  double modifier_sum = 0.0;
};

}  // namespace

void ExperimentConfig::Validate() const {
  if (n_warmup_requests == 0 || n_online_requests == 0 ||
      n_holdout_requests == 0) {
    throw std::invalid_argument("experiment: request counts must be > 0");
  }
  if (ads_per_request == 0) {
    throw std::invalid_argument("experiment: ads_per_request must be > 0");
  }
  if (mc_samples == 0) {
    throw std::invalid_argument("experiment: mc_samples must be > 0");
  }
  if (pool_min_fill == 0 || pool_capacity < pool_min_fill) {
    throw std::invalid_argument(
        "experiment: require 0 < pool_min_fill <= pool_capacity");
  }
  market.Validate();
  features.Validate();
  model.Validate();
  controller.Validate();
}

const GroupResult& Report::group(GroupPolicy policy) const {
  for (const GroupResult& g : groups) {
    if (g.policy == policy) return g;
  }
  throw std::out_of_range("report: missing group");
}

double RelativeDelta(double group, double control) {
  return control == 0.0 ? 0.0 : (group - control) / control;
}

double HoldoutUncertaintyGap(const Report& report) {
  const double random = report.group(GroupPolicy::kRandomExplore).mean_unc;
  const double unc = report.group(GroupPolicy::kUncertaintyExplore).mean_unc;
  return random == 0.0 ? 0.0 : (random - unc) / random;
}

Report RunExperiment(const ExperimentConfig& cfg,
                     const DecisionObserver& observer) {
  cfg.Validate();
  Market market(cfg.market, DeriveSeed(cfg.seed, "market"));
  const FeatureEncoder encoder(cfg.features);
  const double lr = cfg.model.base_lr;
  Rng request_rng(DeriveSeed(cfg.seed, "requests"));

  Report report;
  report.seed = cfg.seed;

  // Warm-up: one model buys traffic with the control policy.
  CtrModel warm(cfg.model, cfg.features.hash_space,
                DeriveSeed(cfg.seed, "model/init"));
  {
    const Bidder bidder(GroupPolicy::kControl, encoder, cfg.mc_samples);
    Rng bid_rng(DeriveSeed(cfg.seed, "bidder/warmup"));
    Rng auction_rng(DeriveSeed(cfg.seed, "auction/warmup"));
    Rng train_rng(DeriveSeed(cfg.seed, "train/warmup"));
    for (std::uint64_t i = 0; i < cfg.n_warmup_requests; ++i) {
      const BidRequest req = market.GenRequest(request_rng);
      const std::vector<AdCandidate> ads =
          market.SampleCandidates(cfg.ads_per_request, request_rng);
      const BidDecision d = bidder.Decide(req, ads, warm, {}, bid_rng);
      const AdCandidate& ad = ads[d.chosen_index];
      const AuctionOutcome out =
          market.RunAuction(d.final_bid, req, ad, auction_rng);
      if (observer) {
        observer({Phase::kWarmup, GroupPolicy::kControl, &req, ads.size(),
                  cfg.mc_samples, 0, &d, &out});
      }
      if (!out.won()) continue;
      ++report.warmup_impressions;
      warm.TrainStep(encoder.Encode(req, ad), *out.clicked() ? 1 : 0, lr,
                     train_rng);
    }
  }

  std::vector<Group> groups;
  groups.reserve(kNumGroups);
  for (std::size_t g = 0; g < kNumGroups; ++g) {
    groups.emplace_back(g, kGroupOrder[g], warm.Clone(), encoder, cfg);
  }

  ExplorationController controller(cfg.controller);
  ModifierPool pool(cfg.pool_capacity, cfg.pool_min_fill,
                    DeriveSeed(cfg.seed, "pool"));
  Rng routing(DeriveSeed(cfg.seed, "routing"));

  for (std::uint64_t i = 0; i < cfg.n_online_requests; ++i) {
    const BidRequest req = market.GenRequest(request_rng);
    const std::vector<AdCandidate> ads =
        market.SampleCandidates(cfg.ads_per_request, request_rng);
    Group& group = groups[routing.UniformInt(kNumGroups)];
    ++group.ledger.requests;

    ExplorationHooks hooks;
    if (group.policy == GroupPolicy::kUncertaintyExplore) {
      hooks.controller = &controller;
      hooks.pool = &pool;
    } else if (group.policy == GroupPolicy::kRandomExplore) {
      hooks.pool = &pool;
    }
    const BidDecision d =
        group.bidder.Decide(req, ads, group.model, hooks, group.bid_rng);
    const AdCandidate& ad = ads[d.chosen_index];
    const AuctionOutcome out =
        market.RunAuction(d.final_bid, req, ad, group.auction_rng);
    if (observer) {
      observer({Phase::kOnline, group.policy, &req, ads.size(),
                cfg.mc_samples, controller.DimensionKey(req), &d, &out});
    }
    if (d.explored) {
      ++group.ledger.explored;
      group.modifier_sum += *d.modifier;
    }
    if (!out.won()) continue;

    const double price = *out.clearing_price();
    const bool clicked = *out.clicked();
    GroupLedger& ledger = group.ledger;
    ++ledger.impressions;
    ledger.spend += price;
    group.campaign_spend[ad.campaign_id] += price;
    if (clicked) {
      ++ledger.clicks;
      ledger.revenue += ad.cpc_goal;
      ++group.campaign_clicks[ad.campaign_id];
    }
    group.Train({group.id, encoder.Encode(req, ad), clicked ? 1 : 0}, lr);
  }

  // Offline evaluation on requests generated after the online phase.
  Rng holdout_rng(DeriveSeed(cfg.seed, "holdout/requests"));
  Rng label_rng(DeriveSeed(cfg.seed, "holdout/labels"));
  const std::uint64_t mc_seed = DeriveSeed(cfg.seed, "holdout/mc");
  std::vector<Rng> mc_rngs(kNumGroups, Rng(mc_seed));

  const std::size_t n = cfg.n_holdout_requests;
  std::vector<int> labels;
  labels.reserve(n);
  std::vector<char> is_new;
  is_new.reserve(n);
  std::array<std::vector<double>, kNumGroups> scores;
  std::array<double, kNumGroups> unc_sum{};
  std::vector<double> oracle;
  oracle.reserve(n);
  for (auto& s : scores) s.reserve(n);

  const std::vector<AdCandidate>& catalog = market.state().ads;
  for (std::size_t i = 0; i < n; ++i) {
    const BidRequest req = market.GenRequest(holdout_rng);
    const AdCandidate& ad = catalog[holdout_rng.UniformInt(catalog.size())];
    const double true_ctr = market.TrueCtr(req, ad);
    oracle.push_back(true_ctr);
    labels.push_back(label_rng.Bernoulli(true_ctr) ? 1 : 0);
    is_new.push_back(
        market.state().publishers[req.publisher_id].introduced_at > 0);
    const FeatureVector fv = encoder.Encode(req, ad);
    const FeatureVector masked = MaskAdFeatures(fv);
    for (std::size_t g = 0; g < kNumGroups; ++g) {
      scores[g].push_back(groups[g].model.Predict(fv));
      unc_sum[g] += EstimateUncertainty(groups[g].model, masked,
                                        cfg.mc_samples, mc_rngs[g])
                        .std;
    }
  }

  report.holdout_requests = n;
  for (std::size_t i = 0; i < n; ++i) {
    report.holdout_positives += static_cast<std::uint64_t>(labels[i]);
    report.holdout_new_publisher_requests += is_new[i] ? 1 : 0;
  }
  report.holdout_oracle_auc = Auc(oracle, labels);
  report.holdout_oracle_logloss = LogLoss(oracle, labels);
  report.active_publishers_at_end =
      static_cast<std::uint32_t>(market.active_publishers().size());

  std::vector<double> campaign_goal(cfg.market.num_campaigns, 0.0);
  for (const AdCandidate& ad : catalog) campaign_goal[ad.campaign_id] = ad.cpc_goal;

  for (std::size_t g = 0; g < kNumGroups; ++g) {
    const Group& group = groups[g];
    GroupResult& r = report.groups[g];
    r.policy = group.policy;
    r.ledger = group.ledger;
    r.ctr = r.ledger.impressions == 0
                ? 0.0
                : static_cast<double>(r.ledger.clicks) /
                      static_cast<double>(r.ledger.impressions);
    r.mean_modifier = r.ledger.explored == 0
                          ? 0.0
                          : group.modifier_sum /
                                static_cast<double>(r.ledger.explored);
    for (std::size_t c = 0; c < group.campaign_spend.size(); ++c) {
      if (group.campaign_spend[c] >
          campaign_goal[c] * static_cast<double>(group.campaign_clicks[c])) {
        ++r.campaigns_over_cpc_goal;
      }
    }
    r.business_constraints_met = r.campaigns_over_cpc_goal == 0;
    r.auc = Auc(scores[g], labels);
    r.logloss = LogLoss(scores[g], labels);
    r.mean_unc = unc_sum[g] / static_cast<double>(n);

    std::vector<double> new_scores;
    std::vector<int> new_labels;
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_new[i]) continue;
      new_scores.push_back(scores[g][i]);
      new_labels.push_back(labels[i]);
    }
    r.logloss_new_publishers =
        new_scores.empty() ? 0.0 : LogLoss(new_scores, new_labels);
  }

  const GroupResult control = report.groups[0];
  for (GroupResult& r : report.groups) {
    r.delta_revenue = RelativeDelta(r.ledger.revenue, control.ledger.revenue);
    r.delta_ctr = RelativeDelta(r.ctr, control.ctr);
    r.delta_auc = RelativeDelta(r.auc, control.auc);
    r.delta_logloss = RelativeDelta(r.logloss, control.logloss);
    r.delta_mean_unc = RelativeDelta(r.mean_unc, control.mean_unc);
  }
  return report;
}

}  // namespace rtbexplore
