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

#include "rtbexplore/controller.h"

#include <cmath>
#include <deque>

#include "doctest.h"
#include "oracles.h"

namespace rtbexplore {
namespace {

using testing::BruteSnapshot;

void CheckSame(const ControllerSnapshot& a, const ControllerSnapshot& b) {
  CHECK(a.mu_unc == b.mu_unc);
  CHECK(a.q_low_value == b.q_low_value);
  CHECK(a.q_high_value == b.q_high_value);
  CHECK(a.count == b.count);
  CHECK(a.ready == b.ready);
}

ControllerSnapshot ReadySnap(double mu, double lo, double hi) {
  ControllerSnapshot s;
  s.mu_unc = mu;
  s.q_low_value = lo;
  s.q_high_value = hi;
  s.count = 1000;
  s.ready = true;
  return s;
}

TEST_CASE("snapshot of a small window uses nearest-rank quantiles") {
  UncertaintyWindow w(10);
  for (double v : {3.0, 1.0, 4.0, 2.0}) w.Push(v);
  const auto s = w.Snapshot(0.25, 0.75, 1);
  CHECK(s.mu_unc == 2.5);
  CHECK(s.q_low_value == 1.0);
  CHECK(s.q_high_value == 3.0);
  CHECK(s.count == 4);
  CHECK(s.ready);
}

TEST_CASE("an all-equal window collapses every statistic") {
  UncertaintyWindow w(5);
  for (int i = 0; i < 5; ++i) w.Push(0.125);
  const auto s = w.Snapshot(0.3, 0.99, 1);
  CHECK(s.mu_unc == 0.125);
  CHECK(s.q_low_value == 0.125);
  CHECK(s.q_high_value == 0.125);
}

TEST_CASE("nearest-rank edge cases") {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(NearestRankQuantile(v, 0.0) == 1.0);
  CHECK(NearestRankQuantile(v, 1.0) == 5.0);
  CHECK(NearestRankQuantile(v, 0.2) == 1.0);
  CHECK(NearestRankQuantile(v, 0.21) == 2.0);
  CHECK(NearestRankQuantile({}, 0.5) == 0.0);
}

TEST_CASE("count, readiness and eviction") {
  UncertaintyWindow w(4);
  for (int k = 1; k <= 4; ++k) {
    w.Push(k);
    CHECK(w.Snapshot(0.3, 0.99, 3).count == static_cast<std::uint32_t>(k));
    CHECK(w.Snapshot(0.3, 0.99, 3).ready == (k >= 3));
  }
  w.Push(100.0);
  CHECK(w.Values() == std::vector<double>{2.0, 3.0, 4.0, 100.0});
  const auto s = w.Snapshot(0.0, 1.0, 1);
  CHECK(s.count == 4);
  CHECK(s.q_low_value == 2.0);
  CHECK(s.mu_unc == 109.0 / 4.0);
}

TEST_CASE("window snapshots equal the sort-based oracle") {
  Rng rng(1);
  for (std::uint32_t cap : {1u, 7u, 64u, 500u}) {
    UncertaintyWindow w(cap);
    std::deque<double> mirror;
    for (int i = 0; i < 3000; ++i) {
      // Repeated values exercise duplicate handling in the sorted copy.
      const double v = rng.Uniform() < 0.2 ? 0.5 : rng.Uniform();
      w.Push(v);
      mirror.push_back(v);
      if (mirror.size() > cap) mirror.pop_front();
      if (i % 37 == 0) {
        const std::vector<double> vals(mirror.begin(), mirror.end());
        REQUIRE(w.Values() == vals);
        const double ql = rng.Uniform();
        const double qh = ql + (1.0 - ql) * rng.Uniform();
        CheckSame(w.Snapshot(ql, qh, 5), BruteSnapshot(vals, ql, qh, 5));
      }
    }
  }
}

TEST_CASE("dimensions never contaminate each other") {
  ControllerConfig cfg;
  cfg.window_len = 50;
  cfg.min_window_fill = 10;
  ExplorationController c(cfg);
  Rng rng(2);
  std::vector<std::deque<double>> mirror(3);
  for (int i = 0; i < 2000; ++i) {
    const auto key = rng.UniformInt(3);
    // Disjoint ranges: key k lives in [k, k + 1).
    const double v = static_cast<double>(key) + rng.Uniform();
    c.Ingest(key, v);
    mirror[key].push_back(v);
    if (mirror[key].size() > 50) mirror[key].pop_front();
  }
  for (std::uint64_t k = 0; k < 3; ++k) {
    const auto s = c.Snapshot(k);
    CHECK(s.q_low_value >= static_cast<double>(k));
    CHECK(s.q_high_value < static_cast<double>(k + 1));
    const std::vector<double> vals(mirror[k].begin(), mirror[k].end());
    CheckSame(s, BruteSnapshot(vals, cfg.q_low, cfg.q_high, 10));
  }
  CHECK_FALSE(c.Snapshot(99).ready);
  CHECK(c.Snapshot(99).count == 0);
}

TEST_CASE("ingest rejects invalid uncertainty") {
  ExplorationController c(ControllerConfig{});
  CHECK_THROWS_AS(c.Ingest(0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(c.Ingest(0, std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(c.Ingest(0, INFINITY), std::invalid_argument);
  c.Ingest(0, 0.0);
  CHECK(c.Snapshot(0).count == 1);
}

TEST_CASE("modifier examples") {
  ControllerConfig cfg;
  cfg.explore_fraction = 1.0;
  Rng rng(3);
  const auto snap = ReadySnap(0.01, 0.001, 1.0);
  CHECK(ComputeModifier(0.01, snap, cfg, rng) == 1.0);
  CHECK(ComputeModifier(0.1, snap, cfg, rng) == 3.0);
  CHECK(ComputeModifier(0.02, snap, cfg, rng) == doctest::Approx(2.0));
  CHECK(ComputeModifier(0.005, snap, cfg, rng) == 1.0);
  CHECK_FALSE(ComputeModifier(0.0005, snap, cfg, rng).has_value());
  CHECK_FALSE(ComputeModifier(1.5, snap, cfg, rng).has_value());
}

TEST_CASE("a not-ready or degenerate window never explores") {
  ControllerConfig cfg;
  cfg.explore_fraction = 1.0;
  Rng rng(4);
  auto snap = ReadySnap(0.01, 0.0, 1.0);
  snap.ready = false;
  CHECK_FALSE(ComputeModifier(0.01, snap, cfg, rng).has_value());
  snap = ReadySnap(0.0, 0.0, 0.0);
  CHECK_FALSE(ComputeModifier(0.0, snap, cfg, rng).has_value());
}

TEST_CASE("the explore coin is drawn before any other check") {
  ControllerConfig cfg;
  Rng a(5);
  Rng b(5);
  auto snap = ReadySnap(0.01, 0.0, 1.0);
  snap.ready = false;
  ComputeModifier(0.01, snap, cfg, a);
  b.Uniform();
  CHECK(a.NextU64() == b.NextU64());
}

TEST_CASE("zero explore fraction never explores") {
  ControllerConfig cfg;
  cfg.explore_fraction = 0.0;
  Rng rng(6);
  const auto snap = ReadySnap(0.01, 0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    REQUIRE_FALSE(ComputeModifier(0.01, snap, cfg, rng).has_value());
  }
}

TEST_CASE("in-band requests explore at the configured rate") {
  ControllerConfig cfg;
  cfg.m_min = 1.2;
  cfg.m_max = 2.5;
  ExplorationController c(cfg);
  Rng data(7);
  Rng coin(8);
  for (int i = 0; i < 20000; ++i) c.Ingest(0, 0.01 * std::exp(data.Normal()));
  int eligible = 0;
  int explored = 0;
  while (eligible < 100000) {
    const double unc = 0.01 * std::exp(data.Normal());
    c.Ingest(0, unc);
    const auto snap = c.Snapshot(0);
    REQUIRE(snap.ready);
    if (unc < snap.q_low_value || unc > snap.q_high_value) continue;
    ++eligible;
    const auto m = c.Modifier(unc, snap, coin);
    if (m) {
      ++explored;
      REQUIRE(*m >= cfg.m_min);
      REQUIRE(*m <= cfg.m_max);
    }
  }
  CHECK(std::abs(explored / 100000.0 - cfg.explore_fraction) <= 0.01);
}

TEST_CASE("the unclamped modifier is scale-free") {
  ControllerConfig cfg;
  cfg.explore_fraction = 1.0;
  cfg.m_min = 1.0;
  cfg.m_max = 1e300;
  Rng data(9);
  for (double c : {0.25, 8.0, 3.7, 1e-3}) {
    UncertaintyWindow base(200);
    UncertaintyWindow scaled(200);
    for (int i = 0; i < 200; ++i) {
      const double v = data.Uniform();
      base.Push(v);
      scaled.Push(c * v);
    }
    const double q = 0.8;
    const auto s0 = base.Snapshot(0.0, 1.0, 1);
    const auto s1 = scaled.Snapshot(0.0, 1.0, 1);
    Rng r0(1);
    Rng r1(1);
    const auto m0 = ComputeModifier(q, s0, cfg, r0);
    const auto m1 = ComputeModifier(c * q, s1, cfg, r1);
    REQUIRE(m0.has_value());
    REQUIRE(m1.has_value());
    CHECK(*m1 == doctest::Approx(*m0).epsilon(1e-12));
  }
}

TEST_CASE("dimension keys follow the configured attribute") {
  const BidRequest r{0, 17, 3, 2, 0};
  auto key = [&](Dimension d) {
    ControllerConfig cfg;
    cfg.dimension = d;
    return ExplorationController(cfg).DimensionKey(r);
  };
  CHECK(key(Dimension::kGlobal) == 0);
  CHECK(key(Dimension::kPublisher) == 17);
  CHECK(key(Dimension::kSegment) == 3);
  CHECK(key(Dimension::kSlot) == 2);
  CHECK(key(Dimension::kSegmentSlot) == ((std::uint64_t{3} << 32) | 2));
  for (Dimension d : {Dimension::kGlobal, Dimension::kPublisher,
                      Dimension::kSegment, Dimension::kSlot,
                      Dimension::kSegmentSlot}) {
    CHECK(ParseDimension(DimensionName(d)) == d);
  }
  CHECK_THROWS_AS(ParseDimension("country"), std::invalid_argument);
}

TEST_CASE("invalid controller configuration is rejected") {
  ControllerConfig cfg;
  cfg.q_low = 0.9;
  cfg.q_high = 0.5;
  CHECK_THROWS_AS(ExplorationController{cfg}, std::invalid_argument);
  cfg = ControllerConfig{};
  cfg.m_min = 0.5;
  CHECK_THROWS_AS(ExplorationController{cfg}, std::invalid_argument);
  cfg = ControllerConfig{};
  cfg.min_window_fill = cfg.window_len + 1;
  CHECK_THROWS_AS(ExplorationController{cfg}, std::invalid_argument);
  cfg = ControllerConfig{};
  cfg.explore_fraction = 1.5;
  CHECK_THROWS_AS(ExplorationController{cfg}, std::invalid_argument);
}

}  // namespace
}  // namespace rtbexplore
