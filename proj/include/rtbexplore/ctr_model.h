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

#ifndef RTBEXPLORE_CTR_MODEL_H_
#define RTBEXPLORE_CTR_MODEL_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtbexplore/features.h"
#include "rtbexplore/random.h"

namespace rtbexplore {

struct ModelConfig {
  std::uint32_t embedding_dim = 8;
  std::vector<std::uint32_t> hidden = {32, 16};
  // Dropout probability on hidden units, used both for training and for
  // stochastic prediction.
  double dropout = 0.2;
  double base_lr = 0.05;
  double adagrad_eps = 1e-8;
  // Starting value of every squared-gradient accumulator. Zero makes the
  // first updates sign steps of size base_lr on every coordinate.
  double adagrad_init_accum = 0.1;
  double embedding_init_std = 0.1;
  // L2 penalty added to the gradient of every parameter an update touches.
  double l2 = 0.0;
  // Initial global bias (logit of the base rate).
  double init_bias = -3.9;

  void Validate() const;
};

// Fully connected layer, weight stored row-major as out x in.
struct DenseLayer {
  std::uint32_t in = 0;
  std::uint32_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  double& w(std::uint32_t o, std::uint32_t i) { return weight[o * in + i]; }
  double w(std::uint32_t o, std::uint32_t i) const {
    return weight[o * in + i];
  }
};

struct ModelParameters {
  double bias = 0.0;
  // Per field: hash_space entries.
  std::array<std::vector<double>, kNumFields> first_order;
  // Per field: hash_space x embedding_dim, row-major.
  std::array<std::vector<double>, kNumFields> embedding;
  // Hidden layers followed by the scalar output layer.
  std::vector<DenseLayer> layers;

  bool operator==(const ModelParameters& other) const;
};

// Keep flags for every hidden unit of one forward pass.
struct DropoutMask {
  std::vector<std::vector<std::uint8_t>> keep;

  static DropoutMask Sample(std::span<const std::uint32_t> hidden,
                            double dropout, Rng& rng);
  static DropoutMask AllKept(std::span<const std::uint32_t> hidden);
};

// Gradient of the log loss for a single example. Only the rows touched by
// the example are represented for the sparse tables.
struct Gradient {
  // Entries of dense layers whose unit was inactive are left at zero.
  double loss = 0.0;
  double prediction = 0.0;
  double bias = 0.0;
  std::array<double, kNumFields> first_order{};
  std::array<std::vector<double>, kNumFields> embedding;
  std::vector<DenseLayer> layers;
};

// Raised when a forward or backward pass produces a non-finite value.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PredictMode { kDeterministic, kStochastic };

// CTR model: first-order weights, a factorization-machine pairwise term over
// field embeddings, and an MLP with inverted dropout on its hidden layers.
// The three parts are summed into one logit.
//
// An instance is single-writer: callers serialize training and prediction.
class CtrModel {
 public:
  using FieldSpaces = std::array<std::uint32_t, kNumFields>;

  CtrModel(ModelConfig config, FieldSpaces field_spaces, std::uint64_t seed);

  // Deterministic forward pass (no dropout).
  double Predict(const FeatureVector& fv) const;
  // Forward pass with a freshly sampled dropout mask.
  double PredictStochastic(const FeatureVector& fv, Rng& rng) const;
  double Predict(const FeatureVector& fv, PredictMode mode, Rng& rng) const;
  // Forward pass with an explicit mask. Counts as a stochastic pass.
  double PredictWithMask(const FeatureVector& fv,
                         const DropoutMask& mask) const;

  // Log-loss gradient; a null mask means dropout off.
  Gradient ComputeGradient(const FeatureVector& fv, int label,
                           const DropoutMask* mask) const;

  // One Adagrad step on a single example with training-time dropout.
  // Returns the loss before the update.
  double TrainStep(const FeatureVector& fv, int label, double base_lr,
                   Rng& rng);

  CtrModel Clone() const { return *this; }

  // Number of inference forward passes (Predict*) since the last reset.
  std::uint64_t forward_passes() const { return forward_passes_; }
  void ResetForwardPasses() { forward_passes_ = 0; }

  const ModelConfig& config() const { return config_; }
  const FieldSpaces& field_spaces() const { return field_spaces_; }
  const ModelParameters& params() const { return params_; }
  ModelParameters& mutable_params() { return params_; }

  // Versioned binary snapshot of configuration, parameters and optimizer
  // state.
  void Save(std::ostream& out) const;
  static CtrModel Load(std::istream& in);

 private:
  struct Trace;

  CtrModel() = default;

  double Forward(const FeatureVector& fv, const DropoutMask* mask, Rng* rng,
                 Trace* trace) const;
  void Backward(const FeatureVector& fv, int label, const DropoutMask* mask,
                Gradient& g) const;
  void CheckFeatures(const FeatureVector& fv) const;

  ModelConfig config_;
  FieldSpaces field_spaces_{};
  ModelParameters params_;
  ModelParameters accum_;
  mutable std::uint64_t forward_passes_ = 0;
  mutable std::vector<double> scratch_a_;
  mutable std::vector<double> scratch_b_;
  Gradient grad_scratch_;
};

}  // namespace rtbexplore

#endif  // RTBEXPLORE_CTR_MODEL_H_
