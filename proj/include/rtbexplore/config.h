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

#ifndef RTBEXPLORE_CONFIG_H_
#define RTBEXPLORE_CONFIG_H_

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "rtbexplore/experiment.h"

namespace rtbexplore {

// Bad configuration document. The message names the offending field and,
// when the source text is known, its line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every key is optional and defaults to ExperimentConfig{}; unknown keys are
// rejected. `source` is the original text, used only for line numbers.
ExperimentConfig ConfigFromJson(const nlohmann::json& doc,
                                const std::string& source = "");

// Effective configuration with every field spelled out.
nlohmann::ordered_json ConfigToJson(const ExperimentConfig& config);

ExperimentConfig ParseConfig(const std::string& text);
ExperimentConfig LoadConfigFile(const std::string& path);

}  // namespace rtbexplore

#endif  // RTBEXPLORE_CONFIG_H_
