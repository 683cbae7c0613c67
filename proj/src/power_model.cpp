// Copyright 2026 The vmalloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vmalloc/power_model.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "vmalloc/error.hpp"

namespace vmalloc {

PowerModel::PowerModel(std::string name, const Samples& samples)
    : name_(std::move(name)), samples_(samples) {
  if (name_.empty()) throw ConfigError("power model name must not be empty");
  for (double w : samples_) {
    if (!std::isfinite(w) || w < 0.0)
      throw ConfigError("power model " + name_ + ": samples must be finite and >= 0");
  }
}

PowerModel PowerModel::from_span(std::string name, std::span<const double> samples) {
  if (samples.size() != kSampleCount) {
    throw ConfigError("power model " + name + ": expected 11 samples, got " +
                      std::to_string(samples.size()));
  }
  Samples s{};
  std::copy(samples.begin(), samples.end(), s.begin());
  return PowerModel(std::move(name), s);
}

namespace power_models {

PowerModel ibm_x3250() {
  return PowerModel(std::string(kIbmX3250),
                    {41.6, 46.7, 52.3, 57.9, 65.4, 73.0, 80.7, 89.5, 99.6, 105.0, 113.0});
}

PowerModel dell_r620() {
  return PowerModel(std::string(kDellR620),
                    {56.1, 79.3, 89.6, 102.0, 121.0, 132.0, 149.0, 171.0, 195.0, 225.0, 263.0});
}

std::vector<PowerModel> builtins() { return {ibm_x3250(), dell_r620()}; }

}  // namespace power_models

PowerModelRegistry::PowerModelRegistry() : models_(power_models::builtins()) {}

void PowerModelRegistry::add(PowerModel model) {
  auto it = std::find_if(models_.begin(), models_.end(),
                         [&](const PowerModel& m) { return m.name() == model.name(); });
  if (it != models_.end()) {
    *it = std::move(model);
  } else {
    models_.push_back(std::move(model));
  }
}

bool PowerModelRegistry::contains(std::string_view name) const {
  return std::any_of(models_.begin(), models_.end(),
                     [&](const PowerModel& m) { return m.name() == name; });
}

const PowerModel& PowerModelRegistry::get(std::string_view name) const {
  for (const PowerModel& m : models_) {
    if (m.name() == name) return m;
  }
  throw LookupError("unknown power model " + std::string(name));
}

void PowerModelRegistry::load_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("power models: ") + e.what());
  }
  if (!doc.is_array()) throw ConfigError("power models: expected a JSON array");
  for (const auto& entry : doc) {
    if (!entry.is_object() || !entry.contains("name") || !entry.contains("samples"))
      throw ConfigError("power models: each entry needs name and samples");
    try {
      auto samples = entry.at("samples").get<std::vector<double>>();
      add(PowerModel::from_span(entry.at("name").get<std::string>(), samples));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("power models: ") + e.what());
    }
  }
}

}  // namespace vmalloc
