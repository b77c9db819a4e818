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

#include "rtbexplore/report.h"

#include <charconv>
#include <stdexcept>

namespace rtbexplore {
namespace {

GroupPolicy PolicyFromName(const std::string& name) {
  for (GroupPolicy p : kGroupOrder) {
    if (PolicyName(p) == name) return p;
  }
  throw std::invalid_argument("report: unknown group '" + name + "'");
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

nlohmann::ordered_json ReportToJson(const Report& report) {
  nlohmann::ordered_json j;
  j["seed"] = report.seed;
  j["warmup_impressions"] = report.warmup_impressions;
  j["holdout"] = {
      {"requests", report.holdout_requests},
      {"positives", report.holdout_positives},
      {"new_publisher_requests", report.holdout_new_publisher_requests},
      {"oracle_auc", report.holdout_oracle_auc},
      {"oracle_logloss", report.holdout_oracle_logloss},
  };
  j["active_publishers_at_end"] = report.active_publishers_at_end;
  nlohmann::ordered_json groups = nlohmann::ordered_json::array();
  for (const GroupResult& g : report.groups) {
    const GroupLedger& l = g.ledger;
    nlohmann::ordered_json e;
    e["group"] = std::string(PolicyName(g.policy));
    e["online"] = {
        {"requests", l.requests},
        {"impressions", l.impressions},
        {"clicks", l.clicks},
        {"training_events", l.training_events},
        {"explored", l.explored},
        {"spend", l.spend},
        {"revenue", l.revenue},
        {"ctr", g.ctr},
        {"mean_modifier", g.mean_modifier},
        {"campaigns_over_cpc_goal", g.campaigns_over_cpc_goal},
        {"business_constraints_met", g.business_constraints_met},
    };
    e["offline"] = {
        {"auc", g.auc},
        {"logloss", g.logloss},
        {"mean_unc", g.mean_unc},
        {"logloss_new_publishers", g.logloss_new_publishers},
    };
    e["delta_vs_control"] = {
        {"revenue", g.delta_revenue}, {"ctr", g.delta_ctr},
        {"auc", g.delta_auc},         {"logloss", g.delta_logloss},
        {"mean_unc", g.delta_mean_unc},
    };
    groups.push_back(std::move(e));
  }
  j["groups"] = std::move(groups);
  j["holdout_uncertainty_gap"] = HoldoutUncertaintyGap(report);
  return j;
}

Report ReportFromJson(const nlohmann::json& j) {
  Report r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.warmup_impressions = j.at("warmup_impressions").get<std::uint64_t>();
  r.holdout_requests = j.at("holdout").at("requests").get<std::uint64_t>();
  r.holdout_positives = j.at("holdout").at("positives").get<std::uint64_t>();
  r.holdout_new_publisher_requests =
      j.at("holdout").at("new_publisher_requests").get<std::uint64_t>();
  r.holdout_oracle_auc = j.at("holdout").at("oracle_auc").get<double>();
  r.holdout_oracle_logloss =
      j.at("holdout").at("oracle_logloss").get<double>();
  r.active_publishers_at_end =
      j.at("active_publishers_at_end").get<std::uint32_t>();
  const auto& groups = j.at("groups");
  if (groups.size() != kNumGroups) {
    throw std::invalid_argument("report: expected three groups");
  }
  for (std::size_t i = 0; i < kNumGroups; ++i) {
    const auto& e = groups[i];
    GroupResult& g = r.groups[i];
    g.policy = PolicyFromName(e.at("group").get<std::string>());
    const auto& on = e.at("online");
    g.ledger.requests = on.at("requests").get<std::uint64_t>();
    g.ledger.impressions = on.at("impressions").get<std::uint64_t>();
    g.ledger.clicks = on.at("clicks").get<std::uint64_t>();
    g.ledger.training_events = on.at("training_events").get<std::uint64_t>();
    g.ledger.explored = on.at("explored").get<std::uint64_t>();
    g.ledger.spend = on.at("spend").get<double>();
    g.ledger.revenue = on.at("revenue").get<double>();
    g.ctr = on.at("ctr").get<double>();
    g.mean_modifier = on.at("mean_modifier").get<double>();
    g.campaigns_over_cpc_goal =
        on.at("campaigns_over_cpc_goal").get<std::uint32_t>();
    g.business_constraints_met = on.at("business_constraints_met").get<bool>();
    const auto& off = e.at("offline");
    g.auc = off.at("auc").get<double>();
    g.logloss = off.at("logloss").get<double>();
    g.mean_unc = off.at("mean_unc").get<double>();
    g.logloss_new_publishers = off.at("logloss_new_publishers").get<double>();
    const auto& d = e.at("delta_vs_control");
    g.delta_revenue = d.at("revenue").get<double>();
    g.delta_ctr = d.at("ctr").get<double>();
    g.delta_auc = d.at("auc").get<double>();
    g.delta_logloss = d.at("logloss").get<double>();
    g.delta_mean_unc = d.at("mean_unc").get<double>();
  }
  return r;
}

void WriteReportCsv(const Report& report, std::ostream& out) {
  out << kReportCsvHeader << '\n';
  for (const GroupResult& g : report.groups) {
    out << PolicyName(g.policy) << ',' << FormatDouble(g.ledger.revenue) << ','
        << FormatDouble(g.ctr) << ',' << FormatDouble(g.auc) << ','
        << FormatDouble(g.logloss) << ',' << FormatDouble(g.mean_unc) << ','
        << FormatDouble(g.delta_revenue) << ',' << FormatDouble(g.delta_ctr)
        << ',' << FormatDouble(g.delta_auc) << ','
        << FormatDouble(g.delta_logloss) << '\n';
  }
}

nlohmann::ordered_json AuditRecord(const DecisionEvent& event) {
  const BidDecision& d = *event.decision;
  nlohmann::ordered_json j;
  j["tick"] = event.request->timestamp;
  j["group"] = std::string(PolicyName(event.group));
  j["publisher"] = event.request->publisher_id;
  j["dimension"] = event.dimension_key;
  j["unc"] = d.uncertainty ? nlohmann::ordered_json(d.uncertainty->std)
                           : nlohmann::ordered_json(nullptr);
  j["mu_unc"] = d.snapshot ? nlohmann::ordered_json(d.snapshot->mu_unc)
                           : nlohmann::ordered_json(nullptr);
  j["modifier"] = d.modifier ? nlohmann::ordered_json(*d.modifier)
                             : nlohmann::ordered_json(nullptr);
  j["base_bid"] = d.base_bid;
  j["final_bid"] = d.final_bid;
  j["won"] = event.outcome->won();
  return j;
}

}  // namespace rtbexplore
