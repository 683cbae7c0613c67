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

#ifndef VMALLOC_POWER_MODEL_HPP
#define VMALLOC_POWER_MODEL_HPP

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vmalloc {

/// Server power draw sampled at utilizations 0.0, 0.1, ..., 1.0.
///
/// samples()[0] is the idle draw and samples()[10] the full-load draw, in
/// watts. Values between samples are linearly interpolated (see
/// interpolate_power). Curves need not be monotone.
class PowerModel {
 public:
  static constexpr std::size_t kSampleCount = 11;
  using Samples = std::array<double, kSampleCount>;

  /// Throws ConfigError on a negative or non-finite sample.
  PowerModel(std::string name, const Samples& samples);

  /// Throws ConfigError unless exactly 11 samples are supplied.
  static PowerModel from_span(std::string name, std::span<const double> samples);

  const std::string& name() const noexcept { return name_; }
  const Samples& samples() const noexcept { return samples_; }
  double idle_watts() const noexcept { return samples_.front(); }
  double max_watts() const noexcept { return samples_.back(); }

  friend bool operator==(const PowerModel&, const PowerModel&) = default;

 private:
  std::string name_;
  Samples samples_;
};

namespace power_models {

inline constexpr std::string_view kIbmX3250 = "ibm_x3250";
inline constexpr std::string_view kDellR620 = "dell_r620";

/// IBM System x3250 (1 x Xeon X3470, 4 cores).
PowerModel ibm_x3250();

/// Dell PowerEdge R620 (1 x Xeon E5-2660, 16 cores).
PowerModel dell_r620();

std::vector<PowerModel> builtins();

}  // namespace power_models

/// Name -> model lookup seeded with the built-ins.
class PowerModelRegistry {
 public:
  PowerModelRegistry();

  /// Adds or replaces a model with the same name.
  void add(PowerModel model);

  /// Throws LookupError for unknown names.
  const PowerModel& get(std::string_view name) const;
  bool contains(std::string_view name) const;
  const std::vector<PowerModel>& models() const noexcept { return models_; }

  /// Parses a JSON array of {"name": ..., "samples": [11 watts]} objects
  /// and adds each entry. Throws ConfigError on malformed input.
  void load_json(std::string_view text);

 private:
  std::vector<PowerModel> models_;
};

}  // namespace vmalloc

#endif  // VMALLOC_POWER_MODEL_HPP
