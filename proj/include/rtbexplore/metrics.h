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

#ifndef RTBEXPLORE_METRICS_H_
#define RTBEXPLORE_METRICS_H_

#include <span>

namespace rtbexplore {

// Probability that a random positive outscores a random negative; ties count
// one half. Throws std::invalid_argument when a class is missing or the
// inputs have different lengths.
double Auc(std::span<const double> scores, std::span<const int> labels);

// Mean negative log-likelihood. Every score must lie strictly inside (0, 1).
double LogLoss(std::span<const double> scores, std::span<const int> labels);

}  // namespace rtbexplore

#endif  // RTBEXPLORE_METRICS_H_
