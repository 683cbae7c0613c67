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

#include <algorithm>
#include <limits>

#include <nlohmann/json.hpp>

#include "vmalloc/error.hpp"
#include "vmalloc/workload.hpp"

namespace vmalloc {

namespace {

// Both classes are rated at the same per-core MIPS so that a one-core VM
// fills exactly one core on either machine.
constexpr double kDefaultCoreMips = 2200.0;

}  // namespace

std::size_t FleetSpec::host_count() const {
  std::size_t n = 0;
  for (const FleetEntry& e : entries) n += e.count;
  return n;
}

FleetSpec FleetSpec::default_datacenter() {
  return {{{std::string(power_models::kIbmX3250), 50, 4, kDefaultCoreMips},
           {std::string(power_models::kDellR620), 50, 16, kDefaultCoreMips}}};
}

FleetSpec FleetSpec::worked_example() {
  return {{{std::string(power_models::kIbmX3250), 4, 4, kDefaultCoreMips},
           {std::string(power_models::kDellR620), 1, 16, kDefaultCoreMips}}};
}

FleetFile parse_fleet_json(std::string_view text) {
  FleetFile file;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (!doc.is_object() || !doc.contains("entries"))
      throw ConfigError("fleet: expected an object with an \"entries\" array");
    if (doc.contains("power_models")) file.models.load_json(doc.at("power_models").dump());
    for (const auto& e : doc.at("entries")) {
      FleetEntry entry;
      entry.model = e.at("model").get<std::string>();
      const auto count = e.at("count").get<long long>();
      const auto pe = e.at("pe").get<long long>();
      if (count < 0) throw ConfigError("fleet: count must be non-negative");
      if (pe < 1 || pe > std::numeric_limits<std::uint32_t>::max())
        throw ConfigError("fleet: pe must be a positive integer");
      entry.count = static_cast<std::size_t>(count);
      entry.pe_count = static_cast<std::uint32_t>(pe);
      entry.mips_per_pe = e.at("mips").get<double>();
      file.spec.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("fleet: ") + e.what());
  }
  return file;
}

std::string fleet_to_json(const FleetSpec& spec) {
  nlohmann::ordered_json doc;
  doc["entries"] = nlohmann::ordered_json::array();
  for (const FleetEntry& e : spec.entries) {
    nlohmann::ordered_json j;
    j["model"] = e.model;
    j["count"] = e.count;
    j["pe"] = e.pe_count;
    j["mips"] = e.mips_per_pe;
    doc["entries"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::vector<HostSpec> build_fleet(const FleetSpec& spec, const PowerModelRegistry& models) {
  if (spec.host_count() == 0) throw ConfigError("fleet has no hosts");
  std::vector<HostSpec> hosts;
  hosts.reserve(spec.host_count());
  for (const FleetEntry& e : spec.entries) {
    if (!models.contains(e.model)) throw ConfigError("unknown power model " + e.model);
    if (e.pe_count < 1 || !(e.mips_per_pe > 0.0))
      throw ConfigError("fleet entry " + e.model + ": pe and mips must be positive");
    const PowerModel& model = models.get(e.model);
    for (std::size_t k = 0; k < e.count; ++k) {
      hosts.push_back(HostSpec{std::to_string(hosts.size()), e.pe_count, e.mips_per_pe, model});
    }
  }
  return hosts;
}

double min_core_mips(std::span<const HostSpec> hosts) {
  if (hosts.empty()) throw ConfigError("fleet has no hosts");
  double best = hosts.front().mips_per_pe;
  for (const HostSpec& h : hosts) best = std::min(best, h.mips_per_pe);
  return best;
}

}  // namespace vmalloc
