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

#ifndef RTBEXPLORE_CONTROLLER_H_
#define RTBEXPLORE_CONTROLLER_H_

#include <cstdint>
#include <mutex>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rtbexplore/market.h"
#include "rtbexplore/random.h"

namespace rtbexplore {

// Request attributes the controller keeps separate statistics for.
enum class Dimension {
  kGlobal,
  kPublisher,
  kSegment,
  kSlot,
  kSegmentSlot,
};

std::string_view DimensionName(Dimension d);
// Throws std::invalid_argument on an unknown name.
Dimension ParseDimension(std::string_view name);

struct ControllerConfig {
  // Share of requests eligible for exploration.
  double explore_fraction = 0.10;
  double q_low = 0.30;
  double q_high = 0.99;
  double m_min = 1.0;
  double m_max = 3.0;
  std::uint32_t window_len = 10000;
  std::uint32_t min_window_fill = 500;
  Dimension dimension = Dimension::kPublisher;

  void Validate() const;
};

struct ControllerSnapshot {
  double mu_unc = 0.0;
  double q_low_value = 0.0;
  double q_high_value = 0.0;
  std::uint32_t count = 0;
  bool ready = false;
};

// Fixed-length window of the most recent observations. Keeps a sorted copy
// next to the ring so quantiles are exact without re-sorting.
class UncertaintyWindow {
 public:
  explicit UncertaintyWindow(std::uint32_t capacity);

  void Push(double value);
  // Mean (summed oldest to newest) and nearest-rank quantiles.
  ControllerSnapshot Snapshot(double q_low, double q_high,
                              std::uint32_t min_fill) const;

  std::uint32_t size() const { return static_cast<std::uint32_t>(sorted_.size()); }
  // Retained values, oldest first.
  std::vector<double> Values() const;

 private:
  std::uint32_t capacity_;
  std::vector<double> ring_;
  std::size_t head_ = 0;  // Index of the oldest value once full.
  std::vector<double> sorted_;
};

// Nearest-rank quantile of an ascending sequence: element ceil(q * n), with
// the rank clamped to [1, n].
double NearestRankQuantile(const std::vector<double>& sorted, double q);

// Exploration gate and bid modifier. The explore coin is always drawn first,
// then the window must be ready and the uncertainty must lie inside the
// quantile band. Returns clamp(unc / mu_unc, m_min, m_max) when all pass.
std::optional<double> ComputeModifier(double unc,
                                      const ControllerSnapshot& snap,
                                      const ControllerConfig& config,
                                      Rng& rng);

// Windowed uncertainty statistics per dimension key. Ingest and Snapshot are
// serialized internally, so a snapshot never sees a partial ingest.
class ExplorationController {
 public:
  explicit ExplorationController(ControllerConfig config);

  void Ingest(std::uint64_t key, double unc);
  ControllerSnapshot Snapshot(std::uint64_t key) const;
  std::optional<double> Modifier(double unc, const ControllerSnapshot& snap,
                                 Rng& rng) const {
    return ComputeModifier(unc, snap, config_, rng);
  }

  std::uint64_t DimensionKey(const BidRequest& request) const;
  const ControllerConfig& config() const { return config_; }

 private:
  ControllerConfig config_;
  mutable std::mutex mu_;
  std::unordered_map<std::uint64_t, UncertaintyWindow> windows_;
};

}  // namespace rtbexplore

#endif  // RTBEXPLORE_CONTROLLER_H_
