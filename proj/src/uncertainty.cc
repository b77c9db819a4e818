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

#include "rtbexplore/uncertainty.h"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rtbexplore {

UncertaintyEstimate EstimateUncertainty(const CtrModel& model,
                                        const FeatureVector& fv,
                                        std::uint32_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("uncertainty: n must be >= 1");
  // Samples are shifted by the first one so that identical predictions give
  // a mean equal to that prediction and a std of exactly zero.
  std::vector<double> shifted(n);
  double pivot = 0.0;
  double sum = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    const double s = model.PredictStochastic(fv, rng);
    if (i == 0) pivot = s;
    shifted[i] = s - pivot;
    sum += shifted[i];
  }
  const double shift_mean = sum / n;
  UncertaintyEstimate est;
  est.n_samples = n;
  est.mean = pivot + shift_mean;
  if (n >= 2) {
    double ss = 0.0;
    for (double d : shifted) ss += (d - shift_mean) * (d - shift_mean);
    est.std = std::sqrt(ss / (n - 1));
  }
  return est;
}

UncertaintyEstimate EstimateUncertainty(const CtrModel& model,
                                        const FeatureEncoder& encoder,
                                        const BidRequest& request,
                                        std::uint32_t n, Rng& rng) {
  return EstimateUncertainty(model, encoder.EncodeMasked(request), n, rng);
}

}  // namespace rtbexplore
