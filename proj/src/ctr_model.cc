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

#include "rtbexplore/ctr_model.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <utility>

namespace rtbexplore {
namespace {

constexpr double kLogitClamp = 35.0;
constexpr char kSnapshotMagic[8] = {'R', 'T', 'B', 'X', 'C', 'T', 'R', '\0'};
constexpr std::uint32_t kSnapshotVersion = 1;

double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

void AdagradUpdate(double& param, double& accum, double grad, double lr,
                   double eps) {
  accum += grad * grad;
  param -= lr * grad / std::sqrt(accum + eps);
}

DenseLayer ZeroLike(const DenseLayer& l) {
  DenseLayer z;
  z.in = l.in;
  z.out = l.out;
  z.weight.assign(l.weight.size(), 0.0);
  z.bias.assign(l.bias.size(), 0.0);
  return z;
}

template <typename T>
void WritePod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T ReadPod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("model snapshot: truncated");
  return v;
}

void WriteArray(std::ostream& out, const std::vector<double>& v) {
  WritePod<std::uint64_t>(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void ReadArray(std::istream& in, std::vector<double>& v) {
  const auto n = ReadPod<std::uint64_t>(in);
  if (n != v.size()) throw std::runtime_error("model snapshot: shape mismatch");
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error("model snapshot: truncated");
}

void WriteParams(std::ostream& out, const ModelParameters& p) {
  WritePod(out, p.bias);
  for (const auto& t : p.first_order) WriteArray(out, t);
  for (const auto& t : p.embedding) WriteArray(out, t);
  for (const DenseLayer& l : p.layers) {
    WriteArray(out, l.weight);
    WriteArray(out, l.bias);
  }
}

void ReadParams(std::istream& in, ModelParameters& p) {
  p.bias = ReadPod<double>(in);
  for (auto& t : p.first_order) ReadArray(in, t);
  for (auto& t : p.embedding) ReadArray(in, t);
  for (DenseLayer& l : p.layers) {
    ReadArray(in, l.weight);
    ReadArray(in, l.bias);
  }
}

}  // namespace

void ModelConfig::Validate() const {
  if (embedding_dim == 0) {
    throw std::invalid_argument("model: embedding_dim must be > 0");
  }
  if (hidden.empty()) {
    throw std::invalid_argument("model: at least one hidden layer required");
  }
  for (std::uint32_t h : hidden) {
    if (h == 0) throw std::invalid_argument("model: empty hidden layer");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw std::invalid_argument("model: dropout must be in [0, 1)");
  }
  if (!(base_lr > 0.0) || !std::isfinite(base_lr)) {
    throw std::invalid_argument("model: base_lr must be > 0");
  }
  if (!(adagrad_eps > 0.0)) {
    throw std::invalid_argument("model: adagrad_eps must be > 0");
  }
  if (!(adagrad_init_accum >= 0.0)) {
    throw std::invalid_argument("model: adagrad_init_accum must be >= 0");
  }
  if (!(l2 >= 0.0) || !std::isfinite(l2)) {
    throw std::invalid_argument("model: l2 must be finite and >= 0");
  }
  if (!std::isfinite(init_bias)) {
    throw std::invalid_argument("model: init_bias must be finite");
  }
  if (!(embedding_init_std >= 0.0)) {
    throw std::invalid_argument("model: embedding_init_std must be >= 0");
  }
}

bool ModelParameters::operator==(const ModelParameters& other) const {
  if (bias != other.bias || first_order != other.first_order ||
      embedding != other.embedding || layers.size() != other.layers.size()) {
    return false;
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const DenseLayer& a = layers[i];
    const DenseLayer& b = other.layers[i];
    if (a.in != b.in || a.out != b.out || a.weight != b.weight ||
        a.bias != b.bias) {
      return false;
    }
  }
  return true;
}

DropoutMask DropoutMask::Sample(std::span<const std::uint32_t> hidden,
                                double dropout, Rng& rng) {
  DropoutMask m;
  m.keep.resize(hidden.size());
  const double keep_prob = 1.0 - dropout;
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    m.keep[l].resize(hidden[l]);
    for (auto& k : m.keep[l]) k = rng.Uniform() < keep_prob ? 1 : 0;
  }
  return m;
}

DropoutMask DropoutMask::AllKept(std::span<const std::uint32_t> hidden) {
  DropoutMask m;
  for (std::uint32_t h : hidden) m.keep.emplace_back(h, std::uint8_t{1});
  return m;
}

struct CtrModel::Trace {
  std::vector<double> input;
  // Concatenated over hidden layers.
  std::vector<double> pre;
  std::vector<double> act;
  std::vector<std::uint8_t> keep;
  double emb_sum[64];
  double logit = 0.0;
};

CtrModel::CtrModel(ModelConfig config, FieldSpaces field_spaces,
                   std::uint64_t seed)
    : config_(std::move(config)), field_spaces_(field_spaces) {
  config_.Validate();
  if (config_.embedding_dim > 64) {
    throw std::invalid_argument("model: embedding_dim must be <= 64");
  }
  Rng rng(seed);
  const std::uint32_t dim = config_.embedding_dim;
  for (std::size_t f = 0; f < kNumFields; ++f) {
    if (field_spaces_[f] == 0) {
      throw std::invalid_argument("model: empty field space");
    }
    params_.first_order[f].assign(field_spaces_[f], 0.0);
    params_.embedding[f].resize(std::size_t{field_spaces_[f]} * dim);
    for (double& e : params_.embedding[f]) {
      e = config_.embedding_init_std * rng.Normal();
    }
  }
  std::uint32_t in = static_cast<std::uint32_t>(kNumFields) * dim;
  std::vector<std::uint32_t> sizes = config_.hidden;
  sizes.push_back(1);
  for (std::uint32_t out : sizes) {
    DenseLayer layer;
    layer.in = in;
    layer.out = out;
    layer.weight.resize(std::size_t{in} * out);
    layer.bias.assign(out, 0.0);
    // He initialization for ReLU layers, Glorot-style for the output.
    const double stddev =
        out == 1 ? std::sqrt(1.0 / in) : std::sqrt(2.0 / in);
    for (double& w : layer.weight) w = stddev * rng.Normal();
    params_.layers.push_back(std::move(layer));
    in = out;
  }

  params_.bias = config_.init_bias;

  const double a0 = config_.adagrad_init_accum;
  accum_.bias = a0;
  for (std::size_t f = 0; f < kNumFields; ++f) {
    accum_.first_order[f].assign(params_.first_order[f].size(), a0);
    accum_.embedding[f].assign(params_.embedding[f].size(), a0);
  }
  for (const DenseLayer& l : params_.layers) {
    DenseLayer acc = ZeroLike(l);
    std::fill(acc.weight.begin(), acc.weight.end(), a0);
    std::fill(acc.bias.begin(), acc.bias.end(), a0);
    accum_.layers.push_back(std::move(acc));
  }
}

void CtrModel::CheckFeatures(const FeatureVector& fv) const {
  for (std::size_t f = 0; f < kNumFields; ++f) {
    if (fv.index[f] >= field_spaces_[f]) {
      throw std::out_of_range("model: feature index outside hash space");
    }
  }
}

double CtrModel::Forward(const FeatureVector& fv, const DropoutMask* mask,
                         Rng* rng, Trace* trace) const {
  CheckFeatures(fv);
  const std::uint32_t dim = config_.embedding_dim;
  const std::size_t in0 = kNumFields * dim;

  std::vector<double>& x = trace ? trace->input : scratch_a_;
  x.resize(in0);
  double first = params_.bias;
  for (std::size_t f = 0; f < kNumFields; ++f) {
    const std::uint32_t idx = fv.index[f];
    first += params_.first_order[f][idx];
    const double* row = params_.embedding[f].data() + std::size_t{idx} * dim;
    std::copy(row, row + dim, x.begin() + static_cast<std::ptrdiff_t>(f * dim));
  }

  double fm = 0.0;
  for (std::uint32_t k = 0; k < dim; ++k) {
    double sum = 0.0;
    double sq = 0.0;
    for (std::size_t f = 0; f < kNumFields; ++f) {
      const double e = x[f * dim + k];
      sum += e;
      sq += e * e;
    }
    if (trace) trace->emb_sum[k] = sum;
    fm += 0.5 * (sum * sum - sq);
  }

  std::size_t total_hidden = 0;
  for (std::uint32_t h : config_.hidden) total_hidden += h;
  std::vector<double>& act = trace ? trace->act : scratch_b_;
  act.resize(total_hidden);
  if (trace) {
    trace->pre.resize(total_hidden);
    trace->keep.resize(total_hidden);
  }

  const bool stochastic = mask != nullptr || rng != nullptr;
  const double keep_prob = 1.0 - config_.dropout;
  const double scale = 1.0 / keep_prob;
  const double* a = x.data();
  std::size_t offset = 0;
  for (std::size_t l = 0; l < config_.hidden.size(); ++l) {
    const DenseLayer& layer = params_.layers[l];
    double* out = act.data() + offset;
    for (std::uint32_t o = 0; o < layer.out; ++o) {
      const double* w = layer.weight.data() + std::size_t{o} * layer.in;
      double z = layer.bias[o];
      for (std::uint32_t i = 0; i < layer.in; ++i) z += w[i] * a[i];
      double h = z > 0.0 ? z : 0.0;
      std::uint8_t keep = 1;
      if (stochastic) {
        keep = mask ? mask->keep[l][o]
                    : static_cast<std::uint8_t>(rng->Uniform() < keep_prob);
        h = keep ? h * scale : 0.0;
      }
      out[o] = h;
      if (trace) {
        trace->pre[offset + o] = z;
        trace->keep[offset + o] = keep;
      }
    }
    a = out;
    offset += layer.out;
  }

  const DenseLayer& head = params_.layers.back();
  double mlp = head.bias[0];
  for (std::uint32_t i = 0; i < head.in; ++i) mlp += head.weight[i] * a[i];

  const double logit = first + fm + mlp;
  if (!std::isfinite(logit)) {
    throw DivergenceError("model: non-finite logit");
  }
  if (trace) trace->logit = logit;
  return logit;
}

double CtrModel::Predict(const FeatureVector& fv) const {
  ++forward_passes_;
  return Sigmoid(std::clamp(Forward(fv, nullptr, nullptr, nullptr),
                            -kLogitClamp, kLogitClamp));
}

double CtrModel::PredictStochastic(const FeatureVector& fv, Rng& rng) const {
  ++forward_passes_;
  return Sigmoid(std::clamp(Forward(fv, nullptr, &rng, nullptr),
                            -kLogitClamp, kLogitClamp));
}

double CtrModel::Predict(const FeatureVector& fv, PredictMode mode,
                         Rng& rng) const {
  return mode == PredictMode::kDeterministic ? Predict(fv)
                                             : PredictStochastic(fv, rng);
}

double CtrModel::PredictWithMask(const FeatureVector& fv,
                                 const DropoutMask& mask) const {
  if (mask.keep.size() != config_.hidden.size()) {
    throw std::invalid_argument("model: mask layer count mismatch");
  }
  for (std::size_t l = 0; l < mask.keep.size(); ++l) {
    if (mask.keep[l].size() != config_.hidden[l]) {
      throw std::invalid_argument("model: mask width mismatch");
    }
  }
  ++forward_passes_;
  return Sigmoid(std::clamp(Forward(fv, &mask, nullptr, nullptr),
                            -kLogitClamp, kLogitClamp));
}

Gradient CtrModel::ComputeGradient(const FeatureVector& fv, int label,
                                   const DropoutMask* mask) const {
  Gradient g;
  Backward(fv, label, mask, g);
  return g;
}

void CtrModel::Backward(const FeatureVector& fv, int label,
                        const DropoutMask* mask, Gradient& g) const {
  if (label != 0 && label != 1) {
    throw std::invalid_argument("model: label must be 0 or 1");
  }
  thread_local Trace trace;
  Forward(fv, mask, nullptr, &trace);
  const double z = trace.logit;
  const double y = static_cast<double>(label);

  g.loss = Softplus(z) - y * z;
  g.prediction = Sigmoid(z);
  const double dz = g.prediction - y;
  g.bias = dz;
  g.first_order.fill(dz);

  const std::uint32_t dim = config_.embedding_dim;
  const double scale = mask ? 1.0 / (1.0 - config_.dropout) : 1.0;

  g.layers.resize(params_.layers.size());
  for (std::size_t l = 0; l < params_.layers.size(); ++l) {
    const DenseLayer& p = params_.layers[l];
    DenseLayer& gl = g.layers[l];
    gl.in = p.in;
    gl.out = p.out;
    gl.weight.assign(p.weight.size(), 0.0);
    gl.bias.assign(p.bias.size(), 0.0);
  }

  // Output layer.
  const std::size_t n_hidden = config_.hidden.size();
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < n_hidden; ++l) offset += config_.hidden[l];
  const DenseLayer& head = params_.layers.back();
  {
    DenseLayer& gh = g.layers.back();
    const double* a = trace.act.data() + offset;
    for (std::uint32_t i = 0; i < head.in; ++i) gh.weight[i] = dz * a[i];
    gh.bias[0] = dz;
  }

  // Gradient w.r.t. the activations feeding the current layer.
  thread_local std::vector<double> d_act;
  thread_local std::vector<double> d_prev;
  d_act.assign(head.weight.begin(), head.weight.end());
  for (double& d : d_act) d *= dz;

  for (std::size_t l = n_hidden; l-- > 0;) {
    const DenseLayer& layer = params_.layers[l];
    DenseLayer& gl = g.layers[l];
    const double* a_prev = l == 0 ? trace.input.data()
                                  : trace.act.data() + offset -
                                        config_.hidden[l - 1];
    d_prev.assign(layer.in, 0.0);
    for (std::uint32_t o = 0; o < layer.out; ++o) {
      const std::size_t u = offset + o;
      if (!(trace.pre[u] > 0.0) || !trace.keep[u]) continue;
      const double dpre = d_act[o] * scale;
      gl.bias[o] = dpre;
      const double* w = layer.weight.data() + std::size_t{o} * layer.in;
      double* gw = gl.weight.data() + std::size_t{o} * layer.in;
      for (std::uint32_t i = 0; i < layer.in; ++i) {
        gw[i] = dpre * a_prev[i];
        d_prev[i] += dpre * w[i];
      }
    }
    d_act.swap(d_prev);
    if (l > 0) offset -= config_.hidden[l - 1];
  }

  // d_act now holds the gradient w.r.t. the concatenated embeddings.
  for (std::size_t f = 0; f < kNumFields; ++f) {
    g.embedding[f].resize(dim);
    for (std::uint32_t k = 0; k < dim; ++k) {
      const double e = trace.input[f * dim + k];
      g.embedding[f][k] = dz * (trace.emb_sum[k] - e) + d_act[f * dim + k];
    }
  }

  bool ok = std::isfinite(g.loss) && std::isfinite(dz);
  for (std::size_t i = 0; ok && i < d_act.size(); ++i) {
    ok = std::isfinite(d_act[i]);
  }
  for (const DenseLayer& l : g.layers) {
    for (std::size_t i = 0; ok && i < l.weight.size(); ++i) {
      ok = std::isfinite(l.weight[i]);
    }
  }
  if (!ok) throw DivergenceError("model: non-finite gradient");
}

double CtrModel::TrainStep(const FeatureVector& fv, int label, double base_lr,
                           Rng& rng) {
  if (!(base_lr > 0.0)) {
    throw std::invalid_argument("model: base_lr must be > 0");
  }
  thread_local DropoutMask mask;
  mask = DropoutMask::Sample(config_.hidden, config_.dropout, rng);
  Gradient& g = grad_scratch_;
  Backward(fv, label, &mask, g);
  const double eps = config_.adagrad_eps;
  const double l2 = config_.l2;

  AdagradUpdate(params_.bias, accum_.bias, g.bias, base_lr, eps);
  const std::uint32_t dim = config_.embedding_dim;
  for (std::size_t f = 0; f < kNumFields; ++f) {
    const std::uint32_t idx = fv.index[f];
    double& w = params_.first_order[f][idx];
    AdagradUpdate(w, accum_.first_order[f][idx], g.first_order[f] + l2 * w,
                  base_lr, eps);
    double* row = params_.embedding[f].data() + std::size_t{idx} * dim;
    double* acc = accum_.embedding[f].data() + std::size_t{idx} * dim;
    for (std::uint32_t k = 0; k < dim; ++k) {
      AdagradUpdate(row[k], acc[k], g.embedding[f][k] + l2 * row[k], base_lr,
                    eps);
    }
  }
  for (std::size_t l = 0; l < params_.layers.size(); ++l) {
    DenseLayer& p = params_.layers[l];
    DenseLayer& a = accum_.layers[l];
    const DenseLayer& gl = g.layers[l];
    // Zero gradients leave both the parameter and its accumulator unchanged.
    for (std::size_t i = 0; i < p.weight.size(); ++i) {
      if (gl.weight[i] != 0.0) {
        AdagradUpdate(p.weight[i], a.weight[i], gl.weight[i], base_lr, eps);
      }
    }
    for (std::size_t i = 0; i < p.bias.size(); ++i) {
      if (gl.bias[i] != 0.0) {
        AdagradUpdate(p.bias[i], a.bias[i], gl.bias[i], base_lr, eps);
      }
    }
  }
  return g.loss;
}

void CtrModel::Save(std::ostream& out) const {
  out.write(kSnapshotMagic, sizeof(kSnapshotMagic));
  WritePod(out, kSnapshotVersion);
  WritePod(out, config_.embedding_dim);
  WritePod<std::uint32_t>(out, static_cast<std::uint32_t>(config_.hidden.size()));
  for (std::uint32_t h : config_.hidden) WritePod(out, h);
  WritePod(out, config_.dropout);
  WritePod(out, config_.base_lr);
  WritePod(out, config_.adagrad_eps);
  WritePod(out, config_.adagrad_init_accum);
  WritePod(out, config_.embedding_init_std);
  WritePod(out, config_.l2);
  WritePod(out, config_.init_bias);
  for (std::uint32_t s : field_spaces_) WritePod(out, s);
  WriteParams(out, params_);
  WriteParams(out, accum_);
  if (!out) throw std::runtime_error("model snapshot: write failed");
}

CtrModel CtrModel::Load(std::istream& in) {
  char magic[sizeof(kSnapshotMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("model snapshot: bad magic");
  }
  if (ReadPod<std::uint32_t>(in) != kSnapshotVersion) {
    throw std::runtime_error("model snapshot: unsupported version");
  }
  ModelConfig cfg;
  cfg.embedding_dim = ReadPod<std::uint32_t>(in);
  const auto n_hidden = ReadPod<std::uint32_t>(in);
  if (n_hidden > 64) throw std::runtime_error("model snapshot: corrupt header");
  cfg.hidden.resize(n_hidden);
  for (std::uint32_t& h : cfg.hidden) h = ReadPod<std::uint32_t>(in);
  cfg.dropout = ReadPod<double>(in);
  cfg.base_lr = ReadPod<double>(in);
  cfg.adagrad_eps = ReadPod<double>(in);
  cfg.adagrad_init_accum = ReadPod<double>(in);
  cfg.embedding_init_std = ReadPod<double>(in);
  cfg.l2 = ReadPod<double>(in);
  cfg.init_bias = ReadPod<double>(in);
  FieldSpaces spaces{};
  for (std::uint32_t& s : spaces) s = ReadPod<std::uint32_t>(in);
  CtrModel model(cfg, spaces, 0);
  ReadParams(in, model.params_);
  ReadParams(in, model.accum_);
  return model;
}

}  // namespace rtbexplore
