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

#ifndef RTBEXPLORE_FEATURES_H_
#define RTBEXPLORE_FEATURES_H_

#include <array>
#include <cstdint>

#include "rtbexplore/market.h"

namespace rtbexplore {

// Feature fields in model order. Request-owned fields come first.
enum class Field : std::uint32_t {
  kPublisher = 0,
  kSegment = 1,
  kSlot = 2,
  kAd = 3,
  kCampaign = 4,
};

inline constexpr std::size_t kNumFields = 5;

constexpr bool IsAdField(Field f) {
  return f == Field::kAd || f == Field::kCampaign;
}

// Index reserved in every field for masked values. Real values never hash
// to it.
inline constexpr std::uint32_t kDummyIndex = 0;

// One hashed index per field, stored in field order.
struct FeatureVector {
  std::array<std::uint32_t, kNumFields> index{};

  std::uint32_t operator[](Field f) const {
    return index[static_cast<std::size_t>(f)];
  }
  bool operator==(const FeatureVector&) const = default;
};

struct FeatureConfig {
  std::uint64_t salt = 0x5EED5A17C0FFEE01ULL;
  std::array<std::uint32_t, kNumFields> hash_space = {
      1u << 14, 1u << 10, 1u << 10, 1u << 10, 1u << 10};

  void Validate() const;
};

// Salted hash of one categorical value into [1, space).
std::uint32_t HashFeature(std::uint64_t salt, Field field, std::uint64_t value,
                          std::uint32_t space);

class FeatureEncoder {
 public:
  explicit FeatureEncoder(FeatureConfig config);

  FeatureVector Encode(const BidRequest& request, const AdCandidate& ad) const;

  // Encode() followed by MaskAdFeatures(); independent of any ad.
  FeatureVector EncodeMasked(const BidRequest& request) const;

  const FeatureConfig& config() const { return config_; }

 private:
  FeatureConfig config_;
};

// Replaces every ad-owned field with kDummyIndex.
FeatureVector MaskAdFeatures(const FeatureVector& fv);

}  // namespace rtbexplore

#endif  // RTBEXPLORE_FEATURES_H_
