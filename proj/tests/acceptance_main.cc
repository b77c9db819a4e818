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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "rtbexplore/bidder.h"
#include "rtbexplore/config.h"
#include "rtbexplore/controller.h"
#include "rtbexplore/ctr_model.h"
#include "rtbexplore/experiment.h"
#include "rtbexplore/features.h"
#include "rtbexplore/market.h"
#include "rtbexplore/metrics.h"
#include "rtbexplore/sweep.h"
#include "rtbexplore/uncertainty.h"

namespace rtbexplore {
namespace {

namespace fs = std::filesystem;
using namespace testing;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b);
  return buf;
}

// Directional comparison and uncertainty gap share one sweep.
std::vector<Report> AcceptanceSweep() {
  ExperimentConfig cfg =
      LoadConfigFile(std::string(RTBEXPLORE_CONFIG_DIR) + "/acceptance.json");
  const std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<Report> reports = RunSweep(cfg, seeds, 1);
  for (const Report& r : reports) {
    const GroupResult& c = r.group(GroupPolicy::kControl);
    const GroupResult& u = r.group(GroupPolicy::kUncertaintyExplore);
    const GroupResult& x = r.group(GroupPolicy::kRandomExplore);
    std::printf(
        "  seed %llu  auc c/u/r %.5f %.5f %.5f  logloss c/u/r %.6f %.6f %.6f"
        "  unc u/r %.6f %.6f\n",
        static_cast<unsigned long long>(r.seed), c.auc, u.auc, x.auc,
        c.logloss, u.logloss, x.logloss, u.mean_unc, x.mean_unc);
  }
  return reports;
}

Outcome DirectionalReproduction(const SweepCounts& counts) {
  return {counts.directional_reproduction >= 4,
          std::to_string(counts.directional_reproduction) + "/" +
              std::to_string(counts.seeds) + " seeds, need 4"};
}

Outcome UncertaintyGap(const SweepCounts& counts) {
  return {counts.uncertainty_lower_unc_than_random >= 4,
          std::to_string(counts.uncertainty_lower_unc_than_random) + "/" +
              std::to_string(counts.seeds) + " seeds, need 4"};
}

Outcome McDropoutOracle() {
  Rng feats(31);
  Rng pick(32);
  int ok = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const double p = 0.1 + 0.4 * pick.Uniform();
    CtrModel m = RandomTinyModel(9000 + s, {4, 4}, p);
    const FeatureVector fv = RandomFeatures(m, feats);
    const MaskMoments exact = ExactMaskMoments(m, fv);
    Rng rng(7000 + s);
    const double est = EstimateUncertainty(m, fv, 10000, rng).std;
    const double z = std::abs(est - std::sqrt(exact.variance)) /
                     SampleStdStandardError(exact, 10000);
    worst = std::max(worst, z);
    ok += z <= 3.0;
  }
  return {ok == 20, std::to_string(ok) + "/20 within 3 SE, worst " +
                        Fmt("%.2f SE", worst)};
}

Outcome GradientCheck50() {
  Rng feats(41);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::vector<std::uint32_t> hidden =
        s % 3 == 0 ? std::vector<std::uint32_t>{3}
                   : std::vector<std::uint32_t>{4, 3};
    CtrModel m = RandomTinyModel(3000 + s, hidden, 0.0);
    const FeatureVector fv = RandomFeatures(m, feats);
    worst = std::max(worst, GradientCheck(m, fv, static_cast<int>(s % 2),
                                          nullptr, 1e-5));
  }
  return {worst < 1e-4, Fmt("max relative error %.3g over 50 models", worst)};
}

Outcome MetricOracles() {
  Rng rng(51);
  double auc_err = 0.0;
  double ll_err = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.UniformInt(999);
    std::vector<double> s(n);
    std::vector<double> p(n);
    std::vector<int> y(n);
    // Half the instances use coarse scores to force ties.
    const bool coarse = t % 2 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = coarse ? static_cast<double>(rng.UniformInt(25)) / 25.0
                    : rng.Uniform();
      p[i] = rng.UniformOpen();
      y[i] = rng.Bernoulli(0.35) ? 1 : 0;
    }
    y[0] = 1;
    y[1] = 0;
    auc_err = std::max(auc_err, std::abs(Auc(s, y) - PairwiseAuc(s, y)));
    ll_err = std::max(ll_err, std::abs(LogLoss(p, y) - DirectLogLoss(p, y)));
  }
  return {auc_err <= 1e-12 && ll_err <= 1e-12,
          Fmt("max AUC error %.3g, max log loss error %.3g", auc_err, ll_err)};
}

bool SameSnapshot(const ControllerSnapshot& a, const ControllerSnapshot& b) {
  return a.count == b.count && a.ready == b.ready && a.mu_unc == b.mu_unc &&
         a.q_low_value == b.q_low_value && a.q_high_value == b.q_high_value;
}

Outcome ControllerProperties() {
  ControllerConfig cfg;
  cfg.m_min = 1.2;
  cfg.m_max = 2.5;
  ExplorationController c(cfg);
  Rng data(61);
  Rng coin(62);
  for (std::uint32_t i = 0; i < cfg.window_len; ++i) {
    c.Ingest(0, 0.01 * std::exp(data.Normal()));
  }
  int eligible = 0;
  int explored = 0;
  bool clamped = true;
  while (eligible < 100000) {
    const double unc = 0.01 * std::exp(data.Normal());
    c.Ingest(0, unc);
    const ControllerSnapshot snap = c.Snapshot(0);
    if (!snap.ready || unc < snap.q_low_value || unc > snap.q_high_value) {
      continue;
    }
    ++eligible;
    if (const auto m = c.Modifier(unc, snap, coin)) {
      ++explored;
      clamped = clamped && *m >= cfg.m_min && *m <= cfg.m_max;
    }
  }
  const double rate = explored / 100000.0;
  const bool rate_ok = std::abs(rate - cfg.explore_fraction) <= 0.01;

  bool oracle_ok = true;
  int compared = 0;
  Rng rng(63);
  for (std::uint32_t cap : {1u, 2u, 9u, 100u, 1000u}) {
    UncertaintyWindow w(cap);
    std::deque<double> mirror;
    for (int i = 0; i < 5000; ++i) {
      const double v =
          rng.Uniform() < 0.25 ? 0.125 * rng.UniformInt(4) : rng.Uniform();
      w.Push(v);
      mirror.push_back(v);
      if (mirror.size() > cap) mirror.pop_front();
      if (i % 11 != 0) continue;
      const std::vector<double> vals(mirror.begin(), mirror.end());
      const double ql = rng.Uniform();
      const double qh = ql + (1.0 - ql) * rng.Uniform();
      const std::uint32_t fill = 1 + static_cast<std::uint32_t>(rng.UniformInt(cap));
      oracle_ok = oracle_ok && SameSnapshot(w.Snapshot(ql, qh, fill),
                                            BruteSnapshot(vals, ql, qh, fill));
      ++compared;
    }
  }

  ControllerConfig free = cfg;
  free.explore_fraction = 1.0;
  free.m_min = 1.0;
  free.m_max = 1e300;
  double scale_err = 0.0;
  for (double k : {1e-4, 0.3, 2.0, 17.5, 1e5}) {
    UncertaintyWindow base(300);
    UncertaintyWindow scaled(300);
    for (int i = 0; i < 300; ++i) {
      const double v = 0.01 * std::exp(data.Normal());
      base.Push(v);
      scaled.Push(k * v);
    }
    const double q = 0.01 * std::exp(data.Normal());
    Rng r0(5);
    Rng r1(5);
    const auto m0 = ComputeModifier(q, base.Snapshot(0.0, 1.0, 1), free, r0);
    const auto m1 =
        ComputeModifier(k * q, scaled.Snapshot(0.0, 1.0, 1), free, r1);
    if (!m0 || !m1) {
      scale_err = INFINITY;
      break;
    }
    scale_err = std::max(scale_err, std::abs(*m1 - *m0) / *m0);
  }
  const bool scale_ok = scale_err <= 1e-12;

  std::ostringstream d;
  d << "explore rate " << rate << " (target " << cfg.explore_fraction
    << "), modifiers in [" << cfg.m_min << ", " << cfg.m_max
    << "]: " << (clamped ? "yes" : "no") << ", " << compared
    << " oracle snapshots equal: " << (oracle_ok ? "yes" : "no")
    << ", scaling relative error " << scale_err;
  return {rate_ok && clamped && oracle_ok && scale_ok, d.str()};
}

Outcome DistributionMatching() {
  ExperimentConfig cfg;
  Market market(cfg.market, 71);
  const FeatureEncoder encoder(cfg.features);
  CtrModel model(cfg.model, cfg.features.hash_space, 72);
  ExplorationController controller(cfg.controller);
  ModifierPool pool(cfg.pool_capacity, cfg.pool_min_fill, 73);
  const Bidder unc_bidder(GroupPolicy::kUncertaintyExplore, encoder,
                          cfg.mc_samples);
  const Bidder rnd_bidder(GroupPolicy::kRandomExplore, encoder,
                          cfg.mc_samples);
  Rng requests(74);
  Rng unc_rng(75);
  Rng rnd_rng(76);
  std::vector<double> drawn;
  drawn.reserve(100000);
  // The uncertainty group keeps feeding the pool while the random group
  // samples from it, as in the online phase. The model is frozen, so the
  // final pool represents the distribution every draw came from.
  while (drawn.size() < 100000) {
    const BidRequest a = market.GenRequest(requests);
    const auto ads_a = market.SampleCandidates(cfg.ads_per_request, requests);
    unc_bidder.Decide(a, ads_a, model, {&controller, &pool}, unc_rng);
    const BidRequest b = market.GenRequest(requests);
    const auto ads_b = market.SampleCandidates(cfg.ads_per_request, requests);
    const BidDecision d =
        rnd_bidder.Decide(b, ads_b, model, {nullptr, &pool}, rnd_rng);
    if (d.explored) drawn.push_back(*d.modifier);
  }
  const double ks = KsStatistic(drawn, pool.Contents());
  return {ks < 0.02, Fmt("KS %.4f between 100000 draws and ", ks) +
                         std::to_string(pool.size()) + " pooled modifiers"};
}

Outcome BudgetInstrumentation() {
  const ExperimentConfig cfg =
      LoadConfigFile(std::string(RTBEXPLORE_CONFIG_DIR) + "/quick.json");
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  RunExperiment(cfg, [&](const DecisionEvent& e) {
    const std::uint64_t expect = e.group == GroupPolicy::kUncertaintyExplore
                                     ? PredictionBudget(e.num_ads, e.mc_samples)
                                     : e.num_ads;
    violations += e.decision->forward_passes != expect;
    ++checked;
  });
  return {violations == 0 && checked == cfg.n_warmup_requests +
                                            cfg.n_online_requests,
          std::to_string(violations) + " violations over " +
              std::to_string(checked) + " requests"};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome Determinism() {
  const fs::path dir = fs::temp_directory_path() / "rtbexplore_acceptance";
  fs::remove_all(dir);
  const std::string config =
      std::string(RTBEXPLORE_CONFIG_DIR) + "/quick.json";
  for (const char* run : {"a", "b"}) {
    const std::string cmd = std::string("\"") + RTBEXPLORE_CLI + "\" run \"" +
                            config + "\" --out \"" + (dir / run).string() +
                            "\" > /dev/null";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      return {false, std::string("run ") + run + " failed"};
    }
  }
  int same = 0;
  for (const char* f : {"report.json", "report.csv", "config.json"}) {
    const std::string a = Slurp(dir / "a" / f);
    same += !a.empty() && a == Slurp(dir / "b" / f);
  }
  fs::remove_all(dir);
  return {same == 3, std::to_string(same) + "/3 report files byte-identical"};
}

}  // namespace
}  // namespace rtbexplore

int main() {
  using namespace rtbexplore;
  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id,
                name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  };
  auto guarded = [&](int id, const char* name,
                     const std::function<Outcome()>& fn) {
    try {
      report(id, name, fn());
    } catch (const std::exception& e) {
      report(id, name, {false, std::string("exception: ") + e.what()});
    }
  };

  guarded(3, "MC dropout vs exact mask enumeration", McDropoutOracle);
  guarded(4, "gradient check", GradientCheck50);
  guarded(5, "metric oracles", MetricOracles);
  guarded(6, "controller properties", ControllerProperties);
  guarded(7, "random-group modifier distribution", DistributionMatching);
  guarded(8, "prediction budget", BudgetInstrumentation);
  guarded(9, "determinism", Determinism);

  SweepCounts counts;
  bool swept = false;
  try {
    counts = AggregateReports(AcceptanceSweep());
    swept = true;
  } catch (const std::exception& e) {
    report(1, "directional comparison", {false, e.what()});
    report(2, "uncertainty gap direction", {false, e.what()});
  }
  if (swept) {
    report(1, "directional comparison", DirectionalReproduction(counts));
    report(2, "uncertainty gap direction", UncertaintyGap(counts));
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
