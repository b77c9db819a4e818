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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rtbexplore {

std::string_view DimensionName(Dimension d) {
  switch (d) {
    case Dimension::kGlobal:
      return "global";
    case Dimension::kPublisher:
      return "publisher";
    case Dimension::kSegment:
      return "segment";
    case Dimension::kSlot:
      return "slot";
    case Dimension::kSegmentSlot:
      return "segment_slot";
  }
  return "unknown";
}

Dimension ParseDimension(std::string_view name) {
  for (Dimension d : {Dimension::kGlobal, Dimension::kPublisher,
                      Dimension::kSegment, Dimension::kSlot,
                      Dimension::kSegmentSlot}) {
    if (DimensionName(d) == name) return d;
  }
  throw std::invalid_argument("controller: unknown dimension '" +
                              std::string(name) + "'");
}

void ControllerConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("controller: " + what);
  };
  if (!(explore_fraction >= 0.0 && explore_fraction <= 1.0)) {
    fail("explore_fraction must be in [0, 1]");
  }
  if (!(q_low >= 0.0 && q_high <= 1.0 && q_low < q_high)) {
    fail("quantile levels must satisfy 0 <= q_low < q_high <= 1");
  }
  if (!(m_min >= 1.0 && m_max >= m_min)) {
    fail("modifier clamps must satisfy 1 <= m_min <= m_max");
  }
  if (!(min_window_fill >= 1 && window_len >= min_window_fill)) {
    fail("window_len >= min_window_fill >= 1 required");
  }
}

UncertaintyWindow::UncertaintyWindow(std::uint32_t capacity)
    : capacity_(capacity) {
  if (capacity == 0) {
    throw std::invalid_argument("controller: window capacity must be > 0");
  }
}

void UncertaintyWindow::Push(double value) {
  if (ring_.size() < capacity_) {
    ring_.push_back(value);
  } else {
    const double evicted = ring_[head_];
    ring_[head_] = value;
    head_ = (head_ + 1) % capacity_;
    sorted_.erase(std::lower_bound(sorted_.begin(), sorted_.end(), evicted));
  }
  sorted_.insert(std::upper_bound(sorted_.begin(), sorted_.end(), value),
                 value);
}

std::vector<double> UncertaintyWindow::Values() const {
  std::vector<double> out;
  out.reserve(ring_.size());
  for (std::size_t i = 0; i < ring_.size(); ++i) {
    out.push_back(ring_[(head_ + i) % ring_.size()]);
  }
  return out;
}

double NearestRankQuantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

ControllerSnapshot UncertaintyWindow::Snapshot(double q_low, double q_high,
                                               std::uint32_t min_fill) const {
  ControllerSnapshot snap;
  snap.count = size();
  if (ring_.empty()) return snap;
  double sum = 0.0;
  for (std::size_t i = 0; i < ring_.size(); ++i) {
    sum += ring_[(head_ + i) % ring_.size()];
  }
  snap.mu_unc = sum / static_cast<double>(ring_.size());
  snap.q_low_value = NearestRankQuantile(sorted_, q_low);
  snap.q_high_value = NearestRankQuantile(sorted_, q_high);
  snap.ready = snap.count >= min_fill;
  return snap;
}

std::optional<double> ComputeModifier(double unc,
                                      const ControllerSnapshot& snap,
                                      const ControllerConfig& config,
                                      Rng& rng) {
  if (!(rng.Uniform() < config.explore_fraction)) return std::nullopt;
  if (!snap.ready || !(snap.mu_unc > 0.0)) return std::nullopt;
  if (unc < snap.q_low_value || unc > snap.q_high_value) return std::nullopt;
  return std::clamp(unc / snap.mu_unc, config.m_min, config.m_max);
}

ExplorationController::ExplorationController(ControllerConfig config)
    : config_(std::move(config)) {
  config_.Validate();
}

void ExplorationController::Ingest(std::uint64_t key, double unc) {
  if (!std::isfinite(unc) || unc < 0.0) {
    throw std::invalid_argument("controller: uncertainty must be finite and >= 0");
  }
  std::lock_guard<std::mutex> lock(mu_);
  auto it = windows_.try_emplace(key, config_.window_len).first;
  it->second.Push(unc);
}

ControllerSnapshot ExplorationController::Snapshot(std::uint64_t key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = windows_.find(key);
  if (it == windows_.end()) return ControllerSnapshot{};
  return it->second.Snapshot(config_.q_low, config_.q_high,
                             config_.min_window_fill);
}

std::uint64_t ExplorationController::DimensionKey(
    const BidRequest& request) const {
  switch (config_.dimension) {
    case Dimension::kGlobal:
      return 0;
    case Dimension::kPublisher:
      return request.publisher_id;
    case Dimension::kSegment:
      return request.user_segment;
    case Dimension::kSlot:
      return request.context_slot;
    case Dimension::kSegmentSlot:
      return (std::uint64_t{request.user_segment} << 32) |
             request.context_slot;
  }
  return 0;
}

}  // namespace rtbexplore
