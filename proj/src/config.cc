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

#include "rtbexplore/config.h"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

namespace rtbexplore {
namespace {

using nlohmann::json;

constexpr std::array<const char*, kNumFields> kFieldNames = {
    "publisher", "segment", "slot", "ad", "campaign"};

// Best-effort line of a dotted key path in the source text: each component
// is searched after the position of its parent.
int LineOf(const std::string& source, const std::vector<std::string>& path) {
  if (source.empty()) return 0;
  std::size_t pos = 0;
  for (const std::string& key : path) {
    const std::size_t found = source.find("\"" + key + "\"", pos);
    if (found == std::string::npos) break;
    pos = found;
  }
  int line = 1;
  for (std::size_t i = 0; i < pos && i < source.size(); ++i) {
    if (source[i] == '\n') ++line;
  }
  return line;
}

// Reads the fields of one JSON object, remembering which keys were used so
// that leftovers can be reported.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::vector<std::string> path,
               const std::string& source)
      : obj_(obj), path_(std::move(path)), source_(source) {
    if (!obj_.is_object()) Fail(path_, "expected an object");
  }

  template <typename T>
  void Read(const char* key, T& out) {
    used_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    std::vector<std::string> p = path_;
    p.push_back(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) Fail(p, "expected a boolean");
      out = it->template get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) Fail(p, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (!it->is_number_unsigned()) Fail(p, "expected a non-negative integer");
        if (it->template get<std::uint64_t>() > std::numeric_limits<T>::max()) {
          Fail(p, "integer out of range");
        }
      }
      out = it->template get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) Fail(p, "expected a number");
      out = it->template get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) Fail(p, "expected a string");
      out = it->template get<std::string>();
    } else {
      static_assert(sizeof(T) == 0, "unsupported config field type");
    }
  }

  // Returns the child object (or null when absent) and marks it used.
  const json* Child(const char* key) {
    used_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::vector<std::string> ChildPath(const char* key) const {
    std::vector<std::string> p = path_;
    p.push_back(key);
    return p;
  }

  void Finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (used_.count(it.key()) == 0) {
        std::vector<std::string> p = path_;
        p.push_back(it.key());
        Fail(p, "unknown key");
      }
    }
  }

  [[noreturn]] void Fail(const std::vector<std::string>& p,
                         const std::string& what) const {
    std::string dotted;
    for (const std::string& k : p) dotted += (dotted.empty() ? "" : ".") + k;
    if (dotted.empty()) dotted = "<root>";
    std::string msg = "config field '" + dotted + "': " + what;
    const int line = LineOf(source_, p);
    if (line > 0) msg += " (line " + std::to_string(line) + ")";
    throw ConfigError(msg);
  }

 private:
  const json& obj_;
  std::vector<std::string> path_;
  const std::string& source_;
  std::set<std::string> used_;
};

void ReadMarket(const json& j, const std::vector<std::string>& path,
                const std::string& src, MarketConfig& m) {
  ObjectReader r(j, path, src);
  r.Read("initial_publishers", m.initial_publishers);
  r.Read("num_segments", m.num_segments);
  r.Read("num_slots", m.num_slots);
  r.Read("num_campaigns", m.num_campaigns);
  r.Read("ads_per_campaign", m.ads_per_campaign);
  r.Read("latent_dim", m.latent_dim);
  r.Read("latent_scale", m.latent_scale);
  r.Read("ctr_bias", m.ctr_bias);
  r.Read("segment_offset_scale", m.segment_offset_scale);
  r.Read("floor_price", m.floor_price);
  r.Read("competitor_location_mean", m.competitor_location_mean);
  r.Read("competitor_location_spread", m.competitor_location_spread);
  r.Read("competitor_scale", m.competitor_scale);
  r.Read("zipf_exponent", m.zipf_exponent);
  r.Read("cpc_goal_min", m.cpc_goal_min);
  r.Read("cpc_goal_max", m.cpc_goal_max);
  if (const json* drift = r.Child("drift")) {
    const auto dpath = r.ChildPath("drift");
    if (!drift->is_array()) r.Fail(dpath, "expected an array");
    m.drift.clear();
    for (std::size_t i = 0; i < drift->size(); ++i) {
      auto p = dpath;
      p.push_back(std::to_string(i));
      ObjectReader br((*drift)[i], p, src);
      DriftBatch b;
      br.Read("tick", b.tick);
      br.Read("new_publishers", b.new_publishers);
      br.Read("retire_oldest", b.retire_oldest);
      br.Finish();
      m.drift.push_back(b);
    }
  }
  r.Finish();
}

void ReadFeatures(const json& j, const std::vector<std::string>& path,
                  const std::string& src, FeatureConfig& f) {
  ObjectReader r(j, path, src);
  r.Read("salt", f.salt);
  if (const json* spaces = r.Child("hash_space")) {
    ObjectReader sr(*spaces, r.ChildPath("hash_space"), src);
    for (std::size_t i = 0; i < kNumFields; ++i) {
      sr.Read(kFieldNames[i], f.hash_space[i]);
    }
    sr.Finish();
  }
  r.Finish();
}

void ReadModel(const json& j, const std::vector<std::string>& path,
               const std::string& src, ModelConfig& m) {
  ObjectReader r(j, path, src);
  r.Read("embedding_dim", m.embedding_dim);
  if (const json* hidden = r.Child("hidden")) {
    if (!hidden->is_array()) r.Fail(r.ChildPath("hidden"), "expected an array");
    m.hidden.clear();
    for (const json& h : *hidden) {
      if (!h.is_number_unsigned()) {
        r.Fail(r.ChildPath("hidden"), "expected positive integers");
      }
      m.hidden.push_back(h.get<std::uint32_t>());
    }
  }
  r.Read("dropout", m.dropout);
  r.Read("base_lr", m.base_lr);
  r.Read("adagrad_eps", m.adagrad_eps);
  r.Read("adagrad_init_accum", m.adagrad_init_accum);
  r.Read("embedding_init_std", m.embedding_init_std);
  r.Read("l2", m.l2);
  r.Read("init_bias", m.init_bias);
  r.Finish();
}

void ReadController(const json& j, const std::vector<std::string>& path,
                    const std::string& src, ControllerConfig& c) {
  ObjectReader r(j, path, src);
  r.Read("explore_fraction", c.explore_fraction);
  r.Read("q_low", c.q_low);
  r.Read("q_high", c.q_high);
  r.Read("m_min", c.m_min);
  r.Read("m_max", c.m_max);
  r.Read("window_len", c.window_len);
  r.Read("min_window_fill", c.min_window_fill);
  std::string dim(DimensionName(c.dimension));
  r.Read("dimension", dim);
  try {
    c.dimension = ParseDimension(dim);
  } catch (const std::invalid_argument& e) {
    r.Fail(r.ChildPath("dimension"), e.what());
  }
  r.Finish();
}

}  // namespace

ExperimentConfig ConfigFromJson(const json& doc, const std::string& source) {
  ExperimentConfig cfg;
  ObjectReader r(doc, {}, source);
  r.Read("seed", cfg.seed);
  r.Read("n_warmup_requests", cfg.n_warmup_requests);
  r.Read("n_online_requests", cfg.n_online_requests);
  r.Read("n_holdout_requests", cfg.n_holdout_requests);
  r.Read("ads_per_request", cfg.ads_per_request);
  r.Read("mc_samples", cfg.mc_samples);
  r.Read("pool_capacity", cfg.pool_capacity);
  r.Read("pool_min_fill", cfg.pool_min_fill);
  if (const json* m = r.Child("market")) {
    ReadMarket(*m, r.ChildPath("market"), source, cfg.market);
  }
  if (const json* f = r.Child("features")) {
    ReadFeatures(*f, r.ChildPath("features"), source, cfg.features);
  }
  if (const json* m = r.Child("model")) {
    ReadModel(*m, r.ChildPath("model"), source, cfg.model);
  }
  if (const json* c = r.Child("controller")) {
    ReadController(*c, r.ChildPath("controller"), source, cfg.controller);
  }
  r.Finish();
  try {
    cfg.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return cfg;
}

nlohmann::ordered_json ConfigToJson(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["n_warmup_requests"] = c.n_warmup_requests;
  j["n_online_requests"] = c.n_online_requests;
  j["n_holdout_requests"] = c.n_holdout_requests;
  j["ads_per_request"] = c.ads_per_request;
  j["mc_samples"] = c.mc_samples;
  j["pool_capacity"] = c.pool_capacity;
  j["pool_min_fill"] = c.pool_min_fill;

  const MarketConfig& m = c.market;
  nlohmann::ordered_json drift = nlohmann::ordered_json::array();
  for (const DriftBatch& b : m.drift) {
    drift.push_back({{"tick", b.tick},
                     {"new_publishers", b.new_publishers},
                     {"retire_oldest", b.retire_oldest}});
  }
  j["market"] = {
      {"initial_publishers", m.initial_publishers},
      {"num_segments", m.num_segments},
      {"num_slots", m.num_slots},
      {"num_campaigns", m.num_campaigns},
      {"ads_per_campaign", m.ads_per_campaign},
      {"latent_dim", m.latent_dim},
      {"latent_scale", m.latent_scale},
      {"ctr_bias", m.ctr_bias},
      {"segment_offset_scale", m.segment_offset_scale},
      {"floor_price", m.floor_price},
      {"competitor_location_mean", m.competitor_location_mean},
      {"competitor_location_spread", m.competitor_location_spread},
      {"competitor_scale", m.competitor_scale},
      {"zipf_exponent", m.zipf_exponent},
      {"cpc_goal_min", m.cpc_goal_min},
      {"cpc_goal_max", m.cpc_goal_max},
      {"drift", drift},
  };

  nlohmann::ordered_json spaces;
  for (std::size_t i = 0; i < kNumFields; ++i) {
    spaces[kFieldNames[i]] = c.features.hash_space[i];
  }
  j["features"] = {{"salt", c.features.salt}, {"hash_space", spaces}};

  j["model"] = {
      {"embedding_dim", c.model.embedding_dim},
      {"hidden", c.model.hidden},
      {"dropout", c.model.dropout},
      {"base_lr", c.model.base_lr},
      {"adagrad_eps", c.model.adagrad_eps},
      {"adagrad_init_accum", c.model.adagrad_init_accum},
      {"embedding_init_std", c.model.embedding_init_std},
      {"l2", c.model.l2},
      {"init_bias", c.model.init_bias},
  };

  const ControllerConfig& k = c.controller;
  j["controller"] = {
      {"explore_fraction", k.explore_fraction},
      {"q_low", k.q_low},
      {"q_high", k.q_high},
      {"m_min", k.m_min},
      {"m_max", k.m_max},
      {"window_len", k.window_len},
      {"min_window_fill", k.min_window_fill},
      {"dimension", std::string(DimensionName(k.dimension))},
  };
  return j;
}

ExperimentConfig ParseConfig(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') ++line;
    }
    throw ConfigError("config parse error at line " + std::to_string(line) +
                      ": " + e.what());
  }
  return ConfigFromJson(doc, text);
}

ExperimentConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return ParseConfig(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace rtbexplore
