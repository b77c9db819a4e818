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

#include "rtbexplore/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace rtbexplore {
namespace {

void CheckInputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("metrics: scores and labels differ in length");
  }
  if (scores.empty()) throw std::invalid_argument("metrics: empty input");
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("metrics: label not 0/1");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw std::invalid_argument("metrics: non-finite score");
  }
}

}  // namespace

double Auc(std::span<const double> scores, std::span<const int> labels) {
  CheckInputs(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // Walk groups of equal score in ascending order. Counts stay integral (or
  // half-integral) so the numerator is exact in double.
  double numerator = 0.0;
  std::uint64_t neg_below = 0;
  std::uint64_t pos_total = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? pos : neg) += 1;
      ++j;
    }
    numerator += static_cast<double>(pos) * static_cast<double>(neg_below) +
                 0.5 * static_cast<double>(pos) * static_cast<double>(neg);
    neg_below += neg;
    pos_total += pos;
    i = j;
  }
  if (pos_total == 0 || neg_below == 0) {
    throw std::invalid_argument("metrics: AUC needs both classes");
  }
  return numerator /
         (static_cast<double>(pos_total) * static_cast<double>(neg_below));
}

double LogLoss(std::span<const double> scores, std::span<const int> labels) {
  CheckInputs(scores, labels);
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double p = scores[i];
    if (!(p > 0.0 && p < 1.0)) {
      throw std::invalid_argument("metrics: log loss needs scores in (0, 1)");
    }
    total -= labels[i] == 1 ? std::log(p) : std::log1p(-p);
  }
  return total / static_cast<double>(scores.size());
}

}  // namespace rtbexplore
