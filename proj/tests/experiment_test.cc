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

#include "doctest.h"
#include "rtbexplore/report.h"
#include "small_config.h"

namespace rtbexplore {
namespace {

using testing::SmallExperimentConfig;

struct Tally {
  std::array<std::uint64_t, kNumGroups> requests{};
  std::array<std::uint64_t, kNumGroups> wins{};
  std::array<std::uint64_t, kNumGroups> explored{};
  std::uint64_t warmup = 0;
  std::uint64_t warmup_wins = 0;
  std::uint64_t budget_violations = 0;
  std::uint64_t raised_bids = 0;
};

std::size_t Index(GroupPolicy p) {
  for (std::size_t g = 0; g < kNumGroups; ++g) {
    if (kGroupOrder[g] == p) return g;
  }
  return 0;
}

Tally Observe(const ExperimentConfig& cfg, Report* out = nullptr) {
  Tally t;
  Report r = RunExperiment(cfg, [&](const DecisionEvent& e) {
    const std::uint64_t expect =
        e.group == GroupPolicy::kUncertaintyExplore
            ? e.num_ads + e.mc_samples
            : e.num_ads;
    t.budget_violations += e.decision->forward_passes != expect;
    if (e.phase == Phase::kWarmup) {
      ++t.warmup;
      t.warmup_wins += e.outcome->won();
      CHECK(e.group == GroupPolicy::kControl);
      return;
    }
    const std::size_t g = Index(e.group);
    ++t.requests[g];
    t.wins[g] += e.outcome->won();
    t.explored[g] += e.decision->explored;
    if (e.group == GroupPolicy::kUncertaintyExplore) {
      t.raised_bids += e.decision->final_bid != e.decision->base_bid;
    }
    if (!e.outcome->won()) {
      CHECK_FALSE(e.outcome->clicked().has_value());
      CHECK_FALSE(e.outcome->clearing_price().has_value());
    }
  });
  if (out) *out = r;
  return t;
}

TEST_CASE("ledgers agree with the observed decision stream") {
  const ExperimentConfig cfg = SmallExperimentConfig();
  Report r;
  const Tally t = Observe(cfg, &r);
  CHECK(t.warmup == cfg.n_warmup_requests);
  CHECK(t.warmup_wins == r.warmup_impressions);
  CHECK(t.budget_violations == 0);
  std::uint64_t total = 0;
  for (std::size_t g = 0; g < kNumGroups; ++g) {
    const GroupResult& gr = r.groups[g];
    CHECK(gr.policy == kGroupOrder[g]);
    CHECK(gr.ledger.requests == t.requests[g]);
    CHECK(gr.ledger.impressions == t.wins[g]);
    // Censoring end to end: a group trains on exactly what it bought.
    CHECK(gr.ledger.training_events == gr.ledger.impressions);
    CHECK(gr.ledger.explored == t.explored[g]);
    CHECK(gr.ledger.clicks <= gr.ledger.impressions);
    CHECK(gr.ledger.spend >= 0.0);
    total += gr.ledger.requests;
  }
  CHECK(total == cfg.n_online_requests);
  CHECK(r.group(GroupPolicy::kControl).ledger.explored == 0);
  CHECK(r.group(GroupPolicy::kUncertaintyExplore).ledger.explored > 0);
  CHECK(r.group(GroupPolicy::kRandomExplore).ledger.explored > 0);
}

TEST_CASE("routing splits traffic evenly") {
  ExperimentConfig cfg = SmallExperimentConfig(5);
  cfg.n_online_requests = 30000;
  const Tally t = Observe(cfg);
  const double n = static_cast<double>(cfg.n_online_requests);
  const double sigma = std::sqrt(n * (1.0 / 3.0) * (2.0 / 3.0));
  for (std::uint64_t c : t.requests) {
    CHECK(std::abs(static_cast<double>(c) - n / 3.0) <= 3.0 * sigma);
  }
}

TEST_CASE("zero explore fraction means no bid increases") {
  ExperimentConfig cfg = SmallExperimentConfig();
  cfg.controller.explore_fraction = 0.0;
  Report r;
  const Tally t = Observe(cfg, &r);
  CHECK(t.raised_bids == 0);
  CHECK(r.group(GroupPolicy::kUncertaintyExplore).ledger.explored == 0);
  // Nothing enters the pool, so the random group cannot explore either.
  CHECK(r.group(GroupPolicy::kRandomExplore).ledger.explored == 0);
}

TEST_CASE("a seed reproduces the same report") {
  const ExperimentConfig cfg = SmallExperimentConfig(11);
  const Report a = RunExperiment(cfg);
  const Report b = RunExperiment(cfg);
  CHECK(ReportToJson(a).dump() == ReportToJson(b).dump());
  ExperimentConfig other = cfg;
  other.seed = 12;
  CHECK(ReportToJson(RunExperiment(other)).dump() != ReportToJson(a).dump());
}

TEST_CASE("report metrics are well formed") {
  const Report r = RunExperiment(SmallExperimentConfig());
  CHECK(r.holdout_requests == 3000);
  CHECK(r.holdout_positives > 0);
  CHECK(r.holdout_new_publisher_requests > 0);
  CHECK(r.active_publishers_at_end == 35);
  CHECK(r.holdout_oracle_auc > 0.5);
  const GroupResult& control = r.group(GroupPolicy::kControl);
  for (const GroupResult& g : r.groups) {
    CHECK(g.auc >= 0.0);
    CHECK(g.auc <= 1.0);
    CHECK(g.logloss > 0.0);
    CHECK(g.mean_unc >= 0.0);
    CHECK(g.delta_auc == doctest::Approx((g.auc - control.auc) / control.auc));
    CHECK(g.delta_logloss ==
          doctest::Approx((g.logloss - control.logloss) / control.logloss));
    CHECK(g.delta_revenue == RelativeDelta(g.ledger.revenue,
                                           control.ledger.revenue));
    CHECK(g.business_constraints_met == (g.campaigns_over_cpc_goal == 0));
  }
  CHECK(control.delta_auc == 0.0);
}

TEST_CASE("relative delta and uncertainty gap formulas") {
  CHECK(RelativeDelta(1.1, 1.0) == doctest::Approx(0.1));
  CHECK(RelativeDelta(3.0, 0.0) == 0.0);
  Report r;
  for (std::size_t g = 0; g < kNumGroups; ++g) r.groups[g].policy = kGroupOrder[g];
  r.groups[1].mean_unc = 0.086;
  r.groups[2].mean_unc = 0.10;
  CHECK(HoldoutUncertaintyGap(r) == doctest::Approx(0.14));
  r.groups[1].mean_unc = 0.10;
  CHECK(HoldoutUncertaintyGap(r) == 0.0);
}

TEST_CASE("invalid experiment configuration is rejected") {
  ExperimentConfig cfg = SmallExperimentConfig();
  cfg.n_holdout_requests = 0;
  CHECK_THROWS_AS(RunExperiment(cfg), std::invalid_argument);
  cfg = SmallExperimentConfig();
  cfg.pool_min_fill = cfg.pool_capacity + 1;
  CHECK_THROWS_AS(RunExperiment(cfg), std::invalid_argument);
}

}  // namespace
}  // namespace rtbexplore
