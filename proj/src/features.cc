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

#include "rtbexplore/features.h"

#include <stdexcept>
#include <string>

#include "rtbexplore/random.h"

namespace rtbexplore {

void FeatureConfig::Validate() const {
  for (std::size_t f = 0; f < kNumFields; ++f) {
    if (hash_space[f] < 2) {
      throw std::invalid_argument("features: hash space of field " +
                                  std::to_string(f) + " must be >= 2");
    }
  }
}

std::uint32_t HashFeature(std::uint64_t salt, Field field, std::uint64_t value,
                          std::uint32_t space) {
  const std::uint64_t key =
      salt ^ (static_cast<std::uint64_t>(field) << 56) ^ value;
  return 1u + static_cast<std::uint32_t>(SplitMix64(key) % (space - 1u));
}

FeatureEncoder::FeatureEncoder(FeatureConfig config)
    : config_(std::move(config)) {
  config_.Validate();
}

FeatureVector FeatureEncoder::Encode(const BidRequest& request,
                                     const AdCandidate& ad) const {
  auto h = [this](Field f, std::uint64_t v) {
    return HashFeature(config_.salt, f, v,
                       config_.hash_space[static_cast<std::size_t>(f)]);
  };
  FeatureVector fv;
  fv.index[0] = h(Field::kPublisher, request.publisher_id);
  fv.index[1] = h(Field::kSegment, request.user_segment);
  fv.index[2] = h(Field::kSlot, request.context_slot);
  fv.index[3] = h(Field::kAd, ad.ad_id);
  fv.index[4] = h(Field::kCampaign, ad.campaign_id);
  return fv;
}

FeatureVector FeatureEncoder::EncodeMasked(const BidRequest& request) const {
  return MaskAdFeatures(Encode(request, AdCandidate{}));
}

FeatureVector MaskAdFeatures(const FeatureVector& fv) {
  FeatureVector out = fv;
  for (std::size_t f = 0; f < kNumFields; ++f) {
    if (IsAdField(static_cast<Field>(f))) out.index[f] = kDummyIndex;
  }
  return out;
}

}  // namespace rtbexplore
