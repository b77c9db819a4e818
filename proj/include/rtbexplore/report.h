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

#ifndef RTBEXPLORE_REPORT_H_
#define RTBEXPLORE_REPORT_H_

#include <ostream>
#include <string>

#include "json.hpp"
#include "rtbexplore/experiment.h"

namespace rtbexplore {

// Header of the per-group CSV.
inline constexpr const char* kReportCsvHeader =
    "group,revenue,ctr,auc,logloss,mean_unc,delta_revenue,delta_ctr,"
    "delta_auc,delta_logloss";

nlohmann::ordered_json ReportToJson(const Report& report);
// Inverse of ReportToJson for the fields it writes.
Report ReportFromJson(const nlohmann::json& j);

// One row per group in control, uncertainty, random order.
void WriteReportCsv(const Report& report, std::ostream& out);

// Shortest round-trip decimal form used in CSV output.
std::string FormatDouble(double v);

// JSONL audit record for an online decision of an exploring group:
// tick, group, dimension, unc, mu_unc, modifier, base and final bid.
nlohmann::ordered_json AuditRecord(const DecisionEvent& event);

}  // namespace rtbexplore

#endif  // RTBEXPLORE_REPORT_H_
