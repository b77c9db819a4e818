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

#ifndef RTBEXPLORE_UNCERTAINTY_H_
#define RTBEXPLORE_UNCERTAINTY_H_

#include <cstdint>

#include "rtbexplore/ctr_model.h"
#include "rtbexplore/features.h"
#include "rtbexplore/market.h"
#include "rtbexplore/random.h"

namespace rtbexplore {

// Mean and sample standard deviation of repeated stochastic predictions.
struct UncertaintyEstimate {
  double mean = 0.0;
  double std = 0.0;
  std::uint32_t n_samples = 0;

  bool operator==(const UncertaintyEstimate&) const = default;
};

// MC-dropout estimate over n stochastic passes on `fv` (Bessel-corrected
// std; zero for n == 1). Performs exactly n forward passes.
UncertaintyEstimate EstimateUncertainty(const CtrModel& model,
                                        const FeatureVector& fv,
                                        std::uint32_t n, Rng& rng);

// Request-level estimate: ad fields of the encoding are masked, so the
// result depends on request fields only.
UncertaintyEstimate EstimateUncertainty(const CtrModel& model,
                                        const FeatureEncoder& encoder,
                                        const BidRequest& request,
                                        std::uint32_t n, Rng& rng);

// Forward passes needed to score num_ads ads and estimate request
// uncertainty with n samples.
constexpr std::uint64_t PredictionBudget(std::uint64_t num_ads,
                                         std::uint64_t n) {
  return num_ads + n;
}

}  // namespace rtbexplore

#endif  // RTBEXPLORE_UNCERTAINTY_H_
